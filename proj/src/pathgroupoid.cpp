#include "hlab/pathgroupoid.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace hlab {

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges, VertexId basepoint)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), basepoint_(basepoint) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertex_index_.emplace(vertices_[i].id, i).second) {
      throw GraphError("duplicate vertex id " + std::to_string(vertices_[i].id));
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id <= 0) throw GraphError("edge ids must be positive, got " + std::to_string(e.id));
    if (!edge_index_.emplace(e.id, i).second) {
      throw GraphError("duplicate edge id " + std::to_string(e.id));
    }
    if (!has_vertex(e.src) || !has_vertex(e.dst)) {
      throw GraphError("edge " + std::to_string(e.id) + " has an unknown endpoint");
    }
    if (e.curve.size() == 1) {
      throw GraphError("edge " + std::to_string(e.id) + " curve needs at least two samples");
    }
  }
  if (!has_vertex(basepoint_)) throw GraphError("basepoint is not a vertex");

  // Connectivity from the basepoint, orientation ignored.
  std::unordered_map<VertexId, std::vector<VertexId>> adj;
  for (const Edge& e : edges_) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::set<VertexId> seen{basepoint_};
  std::deque<VertexId> queue{basepoint_};
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (VertexId w : adj[v]) {
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  if (seen.size() != vertices_.size()) {
    throw GraphError("graph is not connected: " + std::to_string(vertices_.size() - seen.size()) +
                     " vertices unreachable from the basepoint");
  }
}

const Vertex& Graph::vertex(VertexId v) const {
  auto it = vertex_index_.find(v);
  if (it == vertex_index_.end()) throw GraphError("unknown vertex " + std::to_string(v));
  return vertices_[it->second];
}

const Edge& Graph::edge(EdgeId e) const {
  auto it = edge_index_.find(e);
  if (it == edge_index_.end()) throw GraphError("unknown edge " + std::to_string(e));
  return edges_[it->second];
}

std::vector<Point> Graph::edge_curve(EdgeId id) const {
  const Edge& e = edge(id);
  if (!e.curve.empty()) return e.curve;
  const auto& a = vertex(e.src).pos;
  const auto& b = vertex(e.dst).pos;
  if (!a || !b) {
    throw GraphError("edge " + std::to_string(id) + " has no curve and its endpoints have no position");
  }
  return {*a, *b};
}

VertexId letter_source(const Graph& g, const Letter& l) {
  const Edge& e = g.edge(l.edge);
  return l.orient > 0 ? e.src : e.dst;
}

VertexId letter_range(const Graph& g, const Letter& l) {
  const Edge& e = g.edge(l.edge);
  return l.orient > 0 ? e.dst : e.src;
}

std::vector<std::int64_t> PathWord::signed_ids() const {
  std::vector<std::int64_t> out;
  out.reserve(letters_.size());
  for (const Letter& l : letters_) out.push_back(l.orient > 0 ? l.edge : -l.edge);
  return out;
}

PathWord reduce(const Graph& g, std::span<const Letter> letters, std::optional<VertexId> unit_at) {
  if (letters.empty()) {
    if (!unit_at) throw CompositionError("empty word needs an explicit unit vertex");
    if (!g.has_vertex(*unit_at)) throw GraphError("unknown vertex " + std::to_string(*unit_at));
    return PathWord::unit(*unit_at);
  }
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i].orient != 1 && letters[i].orient != -1) {
      throw CompositionError("letter " + std::to_string(i) + " has orientation other than +-1");
    }
    if (i > 0 && letter_range(g, letters[i - 1]) != letter_source(g, letters[i])) {
      std::ostringstream msg;
      msg << "letters " << i - 1 << " and " << i << " do not compose (edge " << letters[i - 1].edge
          << " ends at " << letter_range(g, letters[i - 1]) << ", edge " << letters[i].edge
          << " starts at " << letter_source(g, letters[i]) << ")";
      throw CompositionError(msg.str());
    }
  }
  const VertexId source = letter_source(g, letters.front());
  const VertexId range = letter_range(g, letters.back());
  std::vector<Letter> stack;
  stack.reserve(letters.size());
  for (const Letter& l : letters) {
    if (!stack.empty() && stack.back() == l.inverse()) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return PathWord(std::move(stack), source, range);
}

PathWord path_from_signed_ids(const Graph& g, std::span<const std::int64_t> ids,
                              std::optional<VertexId> unit_at) {
  std::vector<Letter> letters;
  letters.reserve(ids.size());
  for (std::int64_t id : ids) {
    if (id == 0) throw CompositionError("signed edge id 0 is not valid");
    letters.push_back({id > 0 ? id : -id, id > 0 ? 1 : -1});
    if (!g.has_edge(letters.back().edge)) throw GraphError("unknown edge " + std::to_string(letters.back().edge));
  }
  return reduce(g, letters, unit_at);
}

PathWord compose(const Graph& g, const PathWord& p, const PathWord& q) {
  if (q.range() != p.source()) {
    throw CompositionError("cannot compose: range of the first-traversed path (" + std::to_string(q.range()) +
                           ") differs from source of the second (" + std::to_string(p.source()) + ")");
  }
  std::vector<Letter> letters = q.letters();
  letters.insert(letters.end(), p.letters().begin(), p.letters().end());
  return reduce(g, letters, q.source());
}

PathWord inverse(const PathWord& p) {
  std::vector<Letter> letters;
  letters.reserve(p.letters().size());
  for (auto it = p.letters().rbegin(); it != p.letters().rend(); ++it) letters.push_back(it->inverse());
  return PathWord(std::move(letters), p.range(), p.source());
}

ExponentVector abelianize(const PathWord& p) {
  ExponentVector v;
  for (const Letter& l : p.letters()) v[l.edge] += l.orient;
  std::erase_if(v, [](const auto& kv) { return kv.second == 0; });
  return v;
}

ExponentVector add(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector out = a;
  for (const auto& [e, n] : b) out[e] += n;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

bool is_zero(const ExponentVector& v) {
  return std::all_of(v.begin(), v.end(), [](const auto& kv) { return kv.second == 0; });
}

std::map<VertexId, PathWord> spanning_tree(const Graph& g) {
  std::map<VertexId, std::vector<EdgeId>> incident;
  for (const Edge& e : g.edges()) {
    if (e.src == e.dst) continue;
    incident[e.src].push_back(e.id);
    incident[e.dst].push_back(e.id);
  }
  // edges() is sorted by id, so each incidence list already is.
  std::map<VertexId, PathWord> tree;
  tree.emplace(g.basepoint(), PathWord::unit(g.basepoint()));
  std::deque<VertexId> queue{g.basepoint()};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId id : incident[v]) {
      const Edge& e = g.edge(id);
      const Letter step = e.src == v ? Letter{id, 1} : Letter{id, -1};
      const VertexId w = letter_range(g, step);
      if (tree.count(w)) continue;
      const Letter one[] = {step};
      tree.emplace(w, compose(g, reduce(g, one), tree.at(v)));
      queue.push_back(w);
    }
  }
  if (tree.size() != g.vertices().size()) throw GraphError("graph is not connected");
  return tree;
}

namespace {

struct DependenceSearch {
  const Graph& g;
  const PathWord& target;
  std::span<const PathWord> family;
  std::vector<PathWord> inverses;
  std::vector<FamilyFactor> current;  // in composition (left to right) order

  // Builds factors right to left: `walked` is the composition of the factors
  // chosen so far, which are traversed first.
  bool search(const std::optional<PathWord>& walked, std::size_t depth_left) {
    if (walked && *walked == target) return true;
    if (depth_left == 0) return false;
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (int orient : {1, -1}) {
        const PathWord& f = orient > 0 ? family[i] : inverses[i];
        if (!walked) {
          if (f.source() != target.source()) continue;
          current.insert(current.begin(), {i, orient});
          if (search(f, depth_left - 1)) return true;
        } else {
          if (f.source() != walked->range()) continue;
          // Skip immediate f f^{-1} factor pairs.
          if (!current.empty() && current.front().index == i && current.front().orient == -orient) continue;
          current.insert(current.begin(), {i, orient});
          if (search(compose(g, f, *walked), depth_left - 1)) return true;
        }
        current.erase(current.begin());
      }
    }
    return false;
  }
};

}  // namespace

std::optional<std::vector<FamilyFactor>> depends_on(const Graph& g, const PathWord& p,
                                                    std::span<const PathWord> family,
                                                    std::size_t max_factors) {
  DependenceSearch s{g, p, family, {}, {}};
  s.inverses.reserve(family.size());
  for (const PathWord& f : family) s.inverses.push_back(inverse(f));
  for (std::size_t depth = 1; depth <= max_factors; ++depth) {
    s.current.clear();
    if (s.search(std::nullopt, depth)) return s.current;
  }
  return std::nullopt;
}

bool is_independent(const Graph& g, std::span<const PathWord> family, std::size_t max_factors) {
  for (std::size_t k = 0; k < family.size(); ++k) {
    std::vector<PathWord> others;
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (i != k) others.push_back(family[i]);
    }
    if (depends_on(g, family[k], others, max_factors)) return false;
  }
  return true;
}

}  // namespace hlab
