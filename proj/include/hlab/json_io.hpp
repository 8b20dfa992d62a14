#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hlab/connections.hpp"
#include "hlab/cylindrical.hpp"
#include "hlab/spectra.hpp"

namespace hlab::io {

using nlohmann::json;

/// Malformed input; the message names the file and, for JSON syntax
/// errors, the line and column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline; key order is sorted, so equal
/// documents serialize to identical bytes.
std::string dump(const json& j);
void write_text_file(const std::string& path, const std::string& text);

json to_json(const Graph& g);
Graph graph_from_json(const json& j);

json to_json(const PathWord& p);
PathWord path_from_json(const Graph& g, const json& j);

/// Row-major list of [re, im] pairs.
json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json to_json(const GroupDescriptor& d);
GroupDescriptor descriptor_from_json(const json& j);
/// su2, su3, suN, uN, tN (torus), u2-quotient for (T^1 x SU(2))/{+-1},
/// otherwise a path to a descriptor JSON file.
GroupDescriptor descriptor_from_shorthand(const std::string& s);

json to_json(const SmoothConnection& a);
/// {"group": descriptor?, "terms": [{"X", "center", "radius", "direction"}]}.
SmoothConnection smooth_connection_from_json(const json& j, const std::optional<GroupDescriptor>& fallback);

json to_json(const GeneralizedConnection& h);
/// {"group": descriptor, "values": [{"edge": e, "U": matrix}]}.
GeneralizedConnection generalized_connection_from_json(const json& j);

json to_json(const Expr& e);
Expr expr_from_json(const json& j);

/// {"paths": [[signed ids]...], "expr": node}.
CylFunction cyl_function_from_json(const Graph& g, const json& j);

/// {"paths": [{"path": [...], "private_edge": e}], "targets": [matrix...]?}.
/// A missing private_edge is the first edge used once by its own path and
/// never by another.
std::vector<FamilyMember> family_from_json(const Graph& g, const json& j);

}  // namespace hlab::io
