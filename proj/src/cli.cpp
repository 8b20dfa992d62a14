#include "hlab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "CLI11.hpp"

#include "hlab/json_io.hpp"

namespace hlab::cli {

namespace {

using io::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs a module operation, tagging any failure with its name.
template <typename F>
auto op(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const io::ParseError&) {
    throw;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericFailure(std::string(name) + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

struct Inputs {
  const RunConfig& cfg;

  std::uint64_t seed(const char* why) const {
    if (!cfg.seed) throw UsageError(cfg.command + ": --seed is required (" + why + ")");
    return *cfg.seed;
  }

  Graph graph() const {
    if (cfg.graph.empty()) throw UsageError(cfg.command + ": --graph is required");
    try {
      return io::graph_from_json(io::read_json_file(cfg.graph));
    } catch (const GraphError& e) {
      throw io::ParseError(cfg.graph + ": " + e.what());
    } catch (const io::ParseError& e) {
      throw io::ParseError(std::string(e.what()).rfind(cfg.graph, 0) == 0 ? e.what() : cfg.graph + ": " + e.what());
    }
  }

  std::optional<GroupDescriptor> group() const {
    if (cfg.group.empty()) return std::nullopt;
    return io::descriptor_from_shorthand(cfg.group);
  }

  std::string require_path() const {
    if (cfg.path.empty()) throw UsageError(cfg.command + ": --path is required");
    return cfg.path;
  }

  json connection_json() const {
    if (cfg.connection.empty()) throw UsageError(cfg.command + ": --connection is required");
    return io::read_json_file(cfg.connection);
  }

  static bool is_generalized(const json& j) { return j.is_object() && j.contains("values"); }

  SmoothConnection smooth(const json& j) const {
    try {
      return io::smooth_connection_from_json(j, group());
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.connection + ": " + e.what());
    }
  }

  // From --connection, restricting smooth ones to the graph, or else a Haar
  // random assignment over --group.
  GeneralizedConnection generalized(const Graph& g) const {
    if (cfg.connection.empty()) {
      const auto d = group();
      if (!d) throw UsageError(cfg.command + ": give --connection, or --group and --seed for a Haar random one");
      Rng rng(mix_seed(seed("Haar random connection"), 0x4841));
      return GeneralizedConnection::haar_random(g, *d, rng);
    }
    const json j = connection_json();
    if (is_generalized(j)) {
      try {
        GeneralizedConnection h = io::generalized_connection_from_json(j);
        h.validate(g);
        return h;
      } catch (const std::exception& e) {
        throw io::ParseError(cfg.connection + ": " + e.what());
      }
    }
    const SmoothConnection a = smooth(j);
    return op("restrict_to_graph", [&] { return restrict_to_graph(a, g, cfg.steps); });
  }
};

std::vector<std::int64_t> parse_ids(const std::string& s, const std::string& what) {
  std::vector<std::int64_t> ids;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    tok = tok.substr(b, tok.find_last_not_of(" \t") - b + 1);
    if (!tok.empty() && (tok[0] == 'e' || tok[0] == 'E')) tok = tok.substr(1);
    if (tok.size() > 1 && tok[0] == '-' && (tok[1] == 'e' || tok[1] == 'E')) tok = "-" + tok.substr(2);
    try {
      std::size_t used = 0;
      ids.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(what + ": \"" + tok + "\" is not a signed edge id");
    }
  }
  return ids;
}

PathWord parse_path(const Graph& g, const std::string& s) {
  const auto ids = parse_ids(s, "--path");
  return op("path_from_signed_ids", [&] { return path_from_signed_ids(g, ids, g.basepoint()); });
}

json base_report(const RunConfig& cfg, const std::optional<GroupDescriptor>& d) {
  json r;
  r["experiment"] = cfg.command;
  r["descriptor"] = d ? io::to_json(*d) : json(nullptr);
  r["errors"] = json::array();
  r["verdict"] = "ok";
  r["bound"] = nullptr;
  r["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  return r;
}

struct Outcome {
  json report;
  std::vector<std::pair<double, double>> plot;
};

Outcome cmd_holonomy(const RunConfig& cfg, bool wilson) {
  Inputs in{cfg};
  const Graph g = in.graph();
  const PathWord p = parse_path(g, in.require_path());
  if (wilson && !(p.is_loop() && p.source() == g.basepoint())) {
    throw UsageError("wilson: --path must be a loop at the basepoint");
  }
  const json cj = in.connection_json();
  std::optional<GroupElement> h;
  if (Inputs::is_generalized(cj)) {
    const GeneralizedConnection gc = in.generalized(g);
    h = op("holonomy_general", [&] { return holonomy_general(gc, p); });
  } else {
    const SmoothConnection a = in.smooth(cj);
    h = op("holonomy_smooth", [&] { return holonomy_smooth(a, curve_of(g, p), cfg.steps); });
  }
  json r = base_report(cfg, h->descriptor());
  r["path"] = io::to_json(p);
  if (wilson) {
    r["value"] = complex_json(trace_normalized(*h));
  } else {
    r["matrix"] = io::to_json(h->matrix());
    r["trace"] = complex_json(h->matrix().trace());
    r["steps"] = cfg.steps;
  }
  return {r, {}};
}

Outcome cmd_gauge_orbit(const RunConfig& cfg) {
  Inputs in{cfg};
  const Graph g = in.graph();
  const GeneralizedConnection h = in.generalized(g);
  const std::uint64_t seed = in.seed("random gauges");
  const std::uint64_t trials = cfg.samples ? cfg.samples : 8;
  const ThetaData t = make_theta_data(g);
  const auto q0 = op("q_star", [&] { return q_star(h, t); });
  Outcome o{base_report(cfg, h.descriptor()), {}};
  bool ok = true;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Rng rng(mix_seed(seed, i));
    const DiscreteGauge gauge = random_discrete_gauge(g, h.descriptor(), rng);
    const GeneralizedConnection hg = op("gauge_act_general", [&] { return gauge_act_general(g, h, gauge); });
    const auto q1 = op("q_star", [&] { return q_star(hg, t); });
    double worst = 0.0;
    for (std::size_t k = 0; k < t.generators.size(); ++k) {
      const Complex w0 = trace_normalized(holonomy_general(h, t.generators[k]));
      const Complex w1 = trace_normalized(holonomy_general(hg, t.generators[k]));
      worst = std::max({worst, std::abs(w1 - w0), distance(q0[k], q1[k])});
    }
    o.report["errors"].push_back(worst);
    o.plot.emplace_back(static_cast<double>(i), worst);
    ok = ok && worst <= 1e-9;
  }
  o.report["verdict"] = ok ? "invariant" : "not-invariant";
  o.report["trials"] = trials;
  return o;
}

Outcome cmd_haar_mean(const RunConfig& cfg) {
  Inputs in{cfg};
  const Graph g = in.graph();
  if (cfg.function.empty()) throw UsageError("haar-mean: --function is required");
  const CylFunction f = [&] {
    try {
      return io::cyl_function_from_json(g, io::read_json_file(cfg.function));
    } catch (const io::ParseError& e) {
      throw io::ParseError(std::string(e.what()).rfind(cfg.function, 0) == 0 ? e.what() : cfg.function + ": " + e.what());
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.function + ": " + e.what());
    }
  }();
  const std::uint64_t seed = in.seed("Monte Carlo sampling");
  const GeneralizedConnection h = in.generalized(g);
  HaarMeanOptions options;
  options.seed = seed;
  if (cfg.samples) options.samples = cfg.samples;
  const MeanValue m = op("haar_mean", [&] { return haar_mean(f, h.descriptor(), options)(h); });
  const Complex direct = op("eval", [&] { return eval(f, h); });
  json r = base_report(cfg, h.descriptor());
  r["value"] = complex_json(m.value);
  r["std_error"] = m.std_error;
  r["samples"] = options.samples;
  r["unaveraged"] = complex_json(direct);
  return {r, {}};
}

Outcome cmd_theta(const RunConfig& cfg) {
  Inputs in{cfg};
  const Graph g = in.graph();
  const GeneralizedConnection h = in.generalized(g);
  const ThetaData t = make_theta_data(g);
  const ThetaImage img = op("theta", [&] { return theta(h, t); });
  const GeneralizedConnection back = op("theta_inverse", [&] { return theta_inverse(g, h.descriptor(), img, t); });
  double err = 0.0;
  for (const auto& [e, u] : h.values()) err = std::max(err, distance(back.value(e), u));

  json r = base_report(cfg, h.descriptor());
  json gens = json::array();
  for (std::size_t k = 0; k < t.generators.size(); ++k) {
    gens.push_back({{"edge", t.generator_edges[k]},
                    {"loop", io::to_json(t.generators[k])},
                    {"value", io::to_json(img.loops[k].matrix())}});
  }
  json frame = json::array();
  for (const auto& [v, u] : img.frame) frame.push_back({{"vertex", v}, {"U", io::to_json(u.matrix())}});
  r["generators"] = gens;
  r["frame"] = frame;
  r["errors"].push_back(err);
  r["verdict"] = err <= 1e-12 ? "roundtrip" : "failure";
  return {r, {}};
}

Outcome cmd_approx(const RunConfig& cfg) {
  Inputs in{cfg};
  if (cfg.family.empty()) throw UsageError("approx: --family is required");
  const json fj = io::read_json_file(cfg.family);
  const auto d = in.group();
  if (!d) throw UsageError("approx: --group is required");
  const Graph g = [&] {
    if (!cfg.graph.empty()) return in.graph();
    if (!fj.contains("graph")) throw UsageError("approx: give --graph or a \"graph\" entry in " + cfg.family);
    try {
      const json& gj = fj["graph"];
      if (gj.is_string()) {
        const auto rel = std::filesystem::path(cfg.family).parent_path() / gj.get<std::string>();
        return io::graph_from_json(io::read_json_file(rel.string()));
      }
      return io::graph_from_json(gj);
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.family + ": " + e.what());
    }
  }();
  const auto family = [&] {
    try {
      return io::family_from_json(g, fj);
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.family + ": " + e.what());
    }
  }();
  std::vector<GroupElement> targets;
  if (fj.contains("targets")) {
    try {
      for (const json& m : fj["targets"]) targets.emplace_back(*d, io::matrix_from_json(m));
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.family + ": targets: " + e.what());
    }
  } else {
    const std::uint64_t seed = in.seed("Haar targets");
    for (std::size_t k = 0; k < family.size(); ++k) targets.push_back(haar_sample(*d, mix_seed(seed, k)));
  }
  const ApproximationReport rep = op("approximation_experiment", [&] {
    return approximation_experiment(g, *d, family, targets, cfg.tolerance, cfg.steps);
  });
  Outcome o{base_report(cfg, *d), {}};
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    o.report["errors"].push_back(rep.errors[k]);
    o.plot.emplace_back(static_cast<double>(k + 1), rep.errors[k]);
  }
  o.report["max_error"] = rep.max_error;
  o.report["cross_talk"] = rep.cross_talk;
  o.report["tolerance"] = rep.tolerance;
  o.report["steps"] = cfg.steps;
  o.report["connection"] = io::to_json(rep.connection);
  o.report["verdict"] = rep.success ? "success" : "failure";
  return o;
}

std::vector<PathWord> parse_loops(const Graph& g, const RunConfig& cfg) {
  if (cfg.loops.empty()) throw UsageError("obstruction: --loops is required");
  std::vector<PathWord> loops;
  auto add_ids = [&](const std::vector<std::int64_t>& ids) {
    loops.push_back(op("path_from_signed_ids", [&] { return path_from_signed_ids(g, ids, g.basepoint()); }));
  };
  std::stringstream ss(cfg.loops);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item == "commutator") {
      const ThetaData t = make_theta_data(g);
      if (t.generators.size() < 2) throw UsageError("--loops commutator needs a graph with two independent loops");
      const PathWord& a = t.generators[0];
      const PathWord& b = t.generators[1];
      // a b a^-1 b^-1 in composition order: b^-1 runs first.
      loops.push_back(compose(g, a, compose(g, b, compose(g, inverse(a), inverse(b)))));
    } else if (item == "generators") {
      for (const auto& p : make_theta_data(g).generators) loops.push_back(p);
    } else if (std::filesystem::exists(item)) {
      const json j = io::read_json_file(item);
      for (const json& l : j) add_ids(l.get<std::vector<std::int64_t>>());
    } else {
      add_ids(parse_ids(item, "--loops"));
    }
  }
  return loops;
}

Outcome cmd_obstruction(const RunConfig& cfg) {
  Inputs in{cfg};
  const Graph g = in.graph();
  const auto loops = parse_loops(g, cfg);
  const std::uint64_t seed = cfg.seed.value_or(0);
  const auto entries = op("abelian_obstruction_witness", [&] { return abelian_obstruction_witness(g, loops, seed); });
  json r = base_report(cfg, GroupDescriptor::torus(1));
  json list = json::array();
  bool any = false;
  for (const auto& e : entries) {
    json je{{"loop", io::to_json(e.loop)}};
    json ex = json::object();
    for (const auto& [edge, c] : e.exponents) {
      if (c != 0) ex[std::to_string(edge)] = c;
    }
    je["exponents"] = ex;
    const bool obstructed = e.verdict == ObstructionVerdict::Obstructed;
    any = any || obstructed;
    je["verdict"] = obstructed ? "Obstructed" : "Unobstructed";
    if (e.witness) {
      je["witness"] = {{"nonabelian", io::to_json(e.witness->nonabelian)},
                       {"loop_holonomy", io::to_json(e.witness->loop_holonomy.matrix())},
                       {"torus_value", io::to_json(e.witness->torus_value.matrix())},
                       {"torus_value_in_closure", e.witness->torus_value_in_closure}};
    }
    list.push_back(je);
  }
  r["loops"] = list;
  r["verdict"] = any ? "Obstructed" : "Unobstructed";
  return {r, {}};
}

Outcome cmd_closure(const RunConfig& cfg) {
  Inputs in{cfg};
  const Graph g = in.graph();
  ClosureReport rep;
  GroupDescriptor d = GroupDescriptor::torus(1);
  if (!cfg.family.empty()) {
    // Explicit family assignment: {"paths": [...], "values": [matrix...]}.
    const json fj = io::read_json_file(cfg.family);
    const auto gd = in.group();
    if (!gd) throw UsageError("closure: --family needs --group");
    d = *gd;
    std::vector<PathWord> paths;
    std::vector<GroupElement> values;
    try {
      for (const json& p : fj.at("paths")) paths.push_back(io::path_from_json(g, p.is_object() ? p.at("path") : p));
      for (const json& m : fj.at("values")) values.emplace_back(d, io::matrix_from_json(m));
    } catch (const std::exception& e) {
      throw io::ParseError(cfg.family + ": " + e.what());
    }
    const ClosureDescriptor cd = op("closure_descriptor_for", [&] { return closure_descriptor_for(d); });
    rep = op("family_closure_membership",
             [&] { return family_closure_membership(g, paths, values, cd, cfg.bound); });
  } else {
    const GeneralizedConnection h = in.generalized(g);
    d = h.descriptor();
    const ClosureDescriptor cd = op("closure_descriptor_for", [&] { return closure_descriptor_for(d); });
    const ThetaData t = make_theta_data(g);
    rep = op("closure_membership", [&] { return closure_membership(g, h, cd, t, cfg.bound); });
  }
  json r = base_report(cfg, d);
  r["bound"] = rep.bound;
  r["certificate"] = rep.certificate;
  if (rep.witness) {
    json w = json::array();
    for (const auto& f : *rep.witness) w.push_back(json::array({f.index + 1, f.orient}));
    r["witness"] = w;
  }
  if (!rep.block_verdicts.empty()) {
    json b = json::array();
    for (bool v : rep.block_verdicts) b.push_back(v);
    r["block_verdicts"] = b;
  }
  if (!rep.lift.empty()) {
    json l = json::array();
    for (const auto& v : rep.lift) l.push_back(io::to_json(v.matrix()));
    r["lift"] = l;
  }
  r["verdict"] = rep.member ? "member" : "not-member";
  return {r, {}};
}

bool failing(const std::string& verdict) {
  return verdict == "failure" || verdict == "not-member" || verdict == "not-invariant";
}

std::string csv_summary(const json& r) {
  double max_error = 0.0;
  for (const auto& e : r["errors"]) max_error = std::max(max_error, e.get<double>());
  std::string out = "experiment,descriptor,verdict,max_error,bound,seed\n";
  out += r["experiment"].get<std::string>() + ",";
  if (!r["descriptor"].is_null()) {
    // CSV quoting: the descriptor JSON holds commas and quotes.
    std::string quoted = "\"";
    for (char c : r["descriptor"].dump()) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    out += quoted + "\"";
  }
  out += ",";
  out += r["verdict"].get<std::string>() + "," + fmt(max_error) + ",";
  out += (r["bound"].is_null() ? "" : r["bound"].dump()) + ",";
  out += (r["seed"].is_null() ? "" : r["seed"].dump()) + "\n";
  return out;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Outcome o;
    if (cfg.command == "holonomy") o = cmd_holonomy(cfg, false);
    else if (cfg.command == "wilson") o = cmd_holonomy(cfg, true);
    else if (cfg.command == "gauge-orbit") o = cmd_gauge_orbit(cfg);
    else if (cfg.command == "haar-mean") o = cmd_haar_mean(cfg);
    else if (cfg.command == "theta") o = cmd_theta(cfg);
    else if (cfg.command == "approx") o = cmd_approx(cfg);
    else if (cfg.command == "obstruction") o = cmd_obstruction(cfg);
    else if (cfg.command == "closure") o = cmd_closure(cfg);
    else throw UsageError("unknown command \"" + cfg.command + "\"");

    const std::string text = io::dump(o.report);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::filesystem::create_directories(cfg.out);
      const std::filesystem::path dir(cfg.out);
      io::write_text_file((dir / (cfg.command + ".json")).string(), text);
      std::string csv = csv_summary(o.report);
      io::write_text_file((dir / (cfg.command + "_summary.csv")).string(), csv);
      if (!o.plot.empty()) {
        std::string dat = "# x value\n";
        for (const auto& [x, y] : o.plot) dat += fmt(x) + " " + fmt(y) + "\n";
        io::write_text_file((dir / (cfg.command + "_plot.dat")).string(), dat);
      }
      out << (dir / (cfg.command + ".json")).string() << "\n";
    }
    return cfg.strict && failing(o.report["verdict"].get<std::string>()) ? kVerdictFailed : kOk;
  } catch (const UsageError& e) {
    err << "holonomy-lab: " << e.what() << "\n";
    return kUsage;
  } catch (const io::ParseError& e) {
    err << "holonomy-lab: " << cfg.command << ": " << e.what() << "\n";
    return kInputError;
  } catch (const NumericFailure& e) {
    err << "holonomy-lab: " << cfg.command << ": " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    err << "holonomy-lab: " << cfg.command << ": " << e.what() << "\n";
    return kNumericError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Holonomy, gauge and closure experiments on graph path groupoids", "holonomy-lab"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"holonomy", "holonomy matrix and trace along --path"},
      {"wilson", "normalized trace along the loop --path"},
      {"gauge-orbit", "Wilson and normal-form invariance under random gauges"},
      {"haar-mean", "Monte Carlo Haar mean of a cylindrical function"},
      {"theta", "spanning-tree factorization and its roundtrip error"},
      {"approx", "interpolate targets on an independent family"},
      {"obstruction", "abelian obstruction verdicts for loops"},
      {"closure", "closure membership of a connection or family assignment"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--graph", cfg.graph, "graph JSON file");
    sub->add_option("--connection", cfg.connection, "smooth or generalized connection JSON file");
    sub->add_option("--function", cfg.function, "cylindrical function JSON file");
    sub->add_option("--group", cfg.group, "su2, su3, suN, uN, tN, u2-quotient or a descriptor JSON file");
    sub->add_option("--family", cfg.family, "family JSON file");
    sub->add_option("--loops", cfg.loops, "\"commutator\", \"generators\", \"1,2,-1\" lists joined by ';', or a JSON file");
    sub->add_option("--path", cfg.path, "signed edge ids, e.g. \"1,-2\"");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--steps", cfg.steps, "integrator sub-steps per curve segment")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", cfg.tolerance, "success tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--bound", cfg.bound, "relation length bound")->check(CLI::NonNegativeNumber);
    sub->add_option("--samples", cfg.samples, "Monte Carlo samples or gauge trials");
    sub->add_option("--out", cfg.out, "report directory (default: print JSON)");
    sub->add_flag("--strict", cfg.strict, "nonzero exit on failure or not-member verdicts");
  }

  std::vector<std::string> argv_store{"holonomy-lab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (sub->count("--seed")) cfg.seed = seed;
  }
  return run(cfg, out, err);
}

}  // namespace hlab::cli
