#include "hlab/json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hlab::io {

namespace {

template <typename T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string(what) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("point: expected a non-empty number list");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return p;
}

json point_to_json(const Point& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p(i));
  return out;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

json to_json(const Graph& g) {
  json vs = json::array(), es = json::array();
  for (const Vertex& v : g.vertices()) {
    json jv{{"id", v.id}};
    if (v.pos) jv["pos"] = point_to_json(*v.pos);
    vs.push_back(jv);
  }
  for (const Edge& e : g.edges()) {
    json je{{"id", e.id}, {"src", e.src}, {"dst", e.dst}};
    if (!e.curve.empty()) {
      json c = json::array();
      for (const Point& p : e.curve) c.push_back(point_to_json(p));
      je["curve"] = c;
    }
    es.push_back(je);
  }
  return {{"vertices", vs}, {"edges", es}, {"basepoint", g.basepoint()}};
}

Graph graph_from_json(const json& j) {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  for (const json& jv : field<json>(j, "vertices", "graph")) {
    Vertex v{field<VertexId>(jv, "id", "vertex"), std::nullopt};
    if (jv.contains("pos")) v.pos = point_from_json(jv["pos"]);
    vertices.push_back(std::move(v));
  }
  for (const json& je : field<json>(j, "edges", "graph")) {
    Edge e{field<EdgeId>(je, "id", "edge"), field<VertexId>(je, "src", "edge"), field<VertexId>(je, "dst", "edge"), {}};
    if (je.contains("curve")) {
      for (const json& p : je["curve"]) e.curve.push_back(point_from_json(p));
    }
    edges.push_back(std::move(e));
  }
  return Graph(std::move(vertices), std::move(edges), field<VertexId>(j, "basepoint", "graph"));
}

json to_json(const PathWord& p) { return p.signed_ids(); }

PathWord path_from_json(const Graph& g, const json& j) {
  if (!j.is_array()) throw ParseError("path: expected a list of signed edge ids");
  const auto ids = j.get<std::vector<std::int64_t>>();
  return path_from_signed_ids(g, ids, g.basepoint());
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return out;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix: expected a non-empty list of [re, im] pairs");
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (static_cast<std::size_t>(n * n) != j.size()) {
    throw ParseError("matrix: " + std::to_string(j.size()) + " entries is not a square count");
  }
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < n * n; ++k) {
    const json& e = j[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2) throw ParseError("matrix: entry " + std::to_string(k) + " is not [re, im]");
    m(k / n, k % n) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

json to_json(const GroupDescriptor& d) {
  switch (d.kind()) {
    case GroupKind::Unitary:
      return {{"kind", "U"}, {"n", d.n()}};
    case GroupKind::SpecialUnitary:
      return {{"kind", "SU"}, {"n", d.n()}};
    case GroupKind::Torus:
      return {{"kind", "torus"}, {"n", d.n()}};
    case GroupKind::Product: {
      json fs = json::array();
      for (const auto& f : d.factors()) fs.push_back(to_json(f));
      return {{"kind", "product"}, {"factors", fs}};
    }
    case GroupKind::Quotient: {
      json ks = json::array();
      for (const auto& k : d.central()) ks.push_back(to_json(k));
      return {{"kind", "quotient"}, {"base", to_json(d.base())}, {"K", ks}};
    }
  }
  return {};
}

GroupDescriptor descriptor_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind", "group");
  if (kind == "SU") return GroupDescriptor::special_unitary(field<int>(j, "n", "group"));
  if (kind == "U") return GroupDescriptor::unitary(field<int>(j, "n", "group"));
  if (kind == "torus" || kind == "T") return GroupDescriptor::torus(field<int>(j, "n", "group"));
  if (kind == "product") {
    std::vector<GroupDescriptor> fs;
    for (const json& f : field<json>(j, "factors", "group")) fs.push_back(descriptor_from_json(f));
    return GroupDescriptor::product(std::move(fs));
  }
  if (kind == "quotient") {
    std::vector<Matrix> ks;
    for (const json& k : field<json>(j, "K", "group")) ks.push_back(matrix_from_json(k));
    return GroupDescriptor::quotient(descriptor_from_json(field<json>(j, "base", "group")), std::move(ks));
  }
  throw ParseError("group: unknown kind \"" + kind + "\"");
}

GroupDescriptor descriptor_from_shorthand(const std::string& s) {
  auto number = [&](std::size_t skip) -> std::optional<int> {
    if (s.size() <= skip) return std::nullopt;
    for (std::size_t i = skip; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    }
    return std::stoi(s.substr(skip));
  };
  if (s == "u2-quotient") {
    const auto base = GroupDescriptor::product({GroupDescriptor::torus(1), GroupDescriptor::special_unitary(2)});
    return GroupDescriptor::quotient(base, {Matrix::Identity(3, 3), -Matrix::Identity(3, 3)});
  }
  if (s.rfind("su", 0) == 0) {
    if (auto n = number(2)) return GroupDescriptor::special_unitary(*n);
  }
  if (s.rfind("u", 0) == 0) {
    if (auto n = number(1)) return GroupDescriptor::unitary(*n);
  }
  if (s.rfind("t", 0) == 0) {
    if (auto n = number(1)) return GroupDescriptor::torus(*n);
  }
  try {
    return descriptor_from_json(read_json_file(s));
  } catch (const ParseError& e) {
    throw ParseError("group \"" + s + "\": not a shorthand, and as a file: " + e.what());
  }
}

json to_json(const SmoothConnection& a) {
  json terms = json::array();
  for (const auto& t : a.terms()) {
    terms.push_back({{"X", to_json(t.generator.matrix())},
                     {"center", point_to_json(t.bump.center)},
                     {"radius", t.bump.radius},
                     {"direction", point_to_json(t.bump.direction)}});
  }
  return {{"group", to_json(a.descriptor())}, {"terms", terms}};
}

SmoothConnection smooth_connection_from_json(const json& j, const std::optional<GroupDescriptor>& fallback) {
  std::optional<GroupDescriptor> d = fallback;
  if (j.contains("group")) d = descriptor_from_json(j["group"]);
  if (!d) throw ParseError("connection: no \"group\" given and no --group default");
  std::vector<ConnectionTerm> terms;
  for (const json& t : field<json>(j, "terms", "connection")) {
    Bump b{point_from_json(field<json>(t, "center", "term")), field<double>(t, "radius", "term"),
           point_from_json(field<json>(t, "direction", "term"))};
    terms.push_back({LieAlgebraElement(*d, matrix_from_json(field<json>(t, "X", "term"))), std::move(b)});
  }
  return SmoothConnection(*d, std::move(terms));
}

json to_json(const GeneralizedConnection& h) {
  json values = json::array();
  for (const auto& [e, u] : h.values()) values.push_back({{"edge", e}, {"U", to_json(u.matrix())}});
  return {{"group", to_json(h.descriptor())}, {"values", values}};
}

GeneralizedConnection generalized_connection_from_json(const json& j) {
  const GroupDescriptor d = descriptor_from_json(field<json>(j, "group", "generalized connection"));
  std::map<EdgeId, GroupElement> values;
  for (const json& v : field<json>(j, "values", "generalized connection")) {
    values.emplace(field<EdgeId>(v, "edge", "value"), GroupElement(d, matrix_from_json(field<json>(v, "U", "value"))));
  }
  return GeneralizedConnection(d, std::move(values));
}

json to_json(const Expr& e) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return {{"const", {n.value.real(), n.value.imag()}}};
        } else if constexpr (std::is_same_v<T, Expr::Entry>) {
          return {{"entry", {n.path, n.row, n.col}}};
        } else if constexpr (std::is_same_v<T, Expr::Trace>) {
          return {{"trace", n.path}};
        } else if constexpr (std::is_same_v<T, Expr::Conj>) {
          return {{"conj", to_json(n.arg)}};
        } else {
          json args = json::array();
          for (const auto& a : n.args) args.push_back(to_json(a));
          return {{std::is_same_v<T, Expr::Add> ? "add" : "mul", args}};
        }
      },
      static_cast<const Expr::Node::variant&>(e.node()));
}

Expr expr_from_json(const json& j) {
  if (!j.is_object() || j.size() != 1) throw ParseError("expression: each node is an object with one tag");
  const auto& [tag, v] = *j.items().begin();
  auto list = [&]() {
    if (!v.is_array()) throw ParseError("expression: \"" + tag + "\" needs a list");
    std::vector<Expr> args;
    for (const json& a : v) args.push_back(expr_from_json(a));
    return args;
  };
  if (tag == "const") return Expr::constant(Complex(v.at(0).get<double>(), v.at(1).get<double>()));
  if (tag == "entry") return Expr::entry(v.at(0).get<int>(), v.at(1).get<int>(), v.at(2).get<int>());
  if (tag == "trace") return Expr::trace(v.get<int>());
  if (tag == "conj") return Expr::conj(expr_from_json(v));
  if (tag == "add") return Expr::add(list());
  if (tag == "mul") return Expr::mul(list());
  throw ParseError("expression: unknown tag \"" + tag + "\"");
}

CylFunction cyl_function_from_json(const Graph& g, const json& j) {
  std::vector<PathWord> paths;
  for (const json& p : field<json>(j, "paths", "function")) paths.push_back(path_from_json(g, p));
  Expr e = expr_from_json(field<json>(j, "expr", "function"));
  if (e.max_path() > static_cast<int>(paths.size())) {
    throw ParseError("function: expression uses path " + std::to_string(e.max_path()) + " but only " +
                     std::to_string(paths.size()) + " are listed");
  }
  return CylFunction{std::move(paths), std::move(e)};
}

std::vector<FamilyMember> family_from_json(const Graph& g, const json& j) {
  std::vector<FamilyMember> family;
  std::vector<std::optional<EdgeId>> given;
  for (const json& m : field<json>(j, "paths", "family")) {
    const json& p = m.is_object() ? field<json>(m, "path", "family member") : m;
    family.push_back({path_from_json(g, p), 0});
    given.push_back(m.is_object() && m.contains("private_edge") ? std::optional(m["private_edge"].get<EdgeId>())
                                                                 : std::nullopt);
  }
  std::map<EdgeId, int> total;
  for (const auto& f : family) {
    for (const Letter& l : f.path.letters()) ++total[l.edge];
  }
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (given[k]) {
      family[k].private_edge = *given[k];
      continue;
    }
    for (const Letter& l : family[k].path.letters()) {
      if (total[l.edge] == 1) {
        family[k].private_edge = l.edge;
        break;
      }
    }
    if (family[k].private_edge == 0) {
      throw ParseError("family: path " + std::to_string(k) + " has no private edge");
    }
  }
  return family;
}

}  // namespace hlab::io
