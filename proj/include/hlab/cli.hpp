#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hlab::cli {

enum ExitCode : int { kOk = 0, kVerdictFailed = 1, kUsage = 2, kInputError = 3, kNumericError = 4 };

struct RunConfig {
  std::string command;
  std::string graph;
  std::string connection;
  std::string function;
  std::string group;
  std::string family;
  std::string loops;
  std::string path;
  std::optional<std::uint64_t> seed;
  int steps = 32;
  double tolerance = 1e-6;
  int bound = 12;
  std::uint64_t samples = 0;  // 0: per-command default
  std::string out;            // report directory; stdout when empty
  bool strict = false;
};

/// Parses argv into a RunConfig. Throws CLI::ParseError subclasses on bad
/// usage; `--help` is reported through the same channel.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes one configured command and writes its report.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace hlab::cli
