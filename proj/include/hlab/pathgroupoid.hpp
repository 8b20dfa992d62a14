#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace hlab {

using VertexId = std::int64_t;
// Edge ids are strictly positive so that a path serializes as signed ids.
using EdgeId = std::int64_t;
using Point = Eigen::VectorXd;

class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vertex {
  VertexId id = 0;
  std::optional<Point> pos;
};

struct Edge {
  EdgeId id = 0;
  VertexId src = 0;
  VertexId dst = 0;
  std::vector<Point> curve;  // chart samples, src to dst; may be empty
};

/// Finite connected graph with a distinguished basepoint. Immutable once built.
class Graph {
 public:
  Graph(std::vector<Vertex> vertices, std::vector<Edge> edges, VertexId basepoint);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  // Sorted by edge id.
  const std::vector<Edge>& edges() const { return edges_; }
  VertexId basepoint() const { return basepoint_; }

  bool has_vertex(VertexId v) const { return vertex_index_.count(v) != 0; }
  bool has_edge(EdgeId e) const { return edge_index_.count(e) != 0; }
  const Vertex& vertex(VertexId v) const;
  const Edge& edge(EdgeId e) const;

  /// Polyline of an edge in its own orientation. Falls back to the straight
  /// segment between endpoint positions when no samples are given.
  std::vector<Point> edge_curve(EdgeId e) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  VertexId basepoint_;
  std::unordered_map<VertexId, std::size_t> vertex_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
};

struct Letter {
  EdgeId edge = 0;
  int orient = 1;  // +1 or -1

  Letter inverse() const { return {edge, -orient}; }
  bool operator==(const Letter&) const = default;
};

VertexId letter_source(const Graph& g, const Letter& l);
VertexId letter_range(const Graph& g, const Letter& l);

/// Reduced word in the free groupoid on the graph's edges. Letters are stored
/// in traversal order: letters().front() is walked first.
class PathWord {
 public:
  static PathWord unit(VertexId v) { return PathWord({}, v, v); }

  const std::vector<Letter>& letters() const { return letters_; }
  VertexId source() const { return source_; }
  VertexId range() const { return range_; }
  bool is_unit() const { return letters_.empty(); }
  bool is_loop() const { return source_ == range_; }
  std::size_t length() const { return letters_.size(); }

  /// Signed edge ids in traversal order.
  std::vector<std::int64_t> signed_ids() const;

  bool operator==(const PathWord&) const = default;

 private:
  friend PathWord reduce(const Graph&, std::span<const Letter>, std::optional<VertexId>);
  friend PathWord inverse(const PathWord&);
  PathWord(std::vector<Letter> letters, VertexId source, VertexId range)
      : letters_(std::move(letters)), source_(source), range_(range) {}

  std::vector<Letter> letters_;
  VertexId source_;
  VertexId range_;
};

using ExponentVector = std::map<EdgeId, std::int64_t>;

/// Cancels adjacent e e^{-1} pairs. `unit_at` names the vertex of an empty word
/// and is ignored otherwise.
PathWord reduce(const Graph& g, std::span<const Letter> letters,
                std::optional<VertexId> unit_at = std::nullopt);

PathWord path_from_signed_ids(const Graph& g, std::span<const std::int64_t> ids,
                              std::optional<VertexId> unit_at = std::nullopt);

/// p after q: q is traversed first. Requires range(q) == source(p).
PathWord compose(const Graph& g, const PathWord& p, const PathWord& q);
PathWord inverse(const PathWord& p);

ExponentVector abelianize(const PathWord& p);
ExponentVector add(const ExponentVector& a, const ExponentVector& b);
bool is_zero(const ExponentVector& v);

/// Tree paths e_x from the basepoint to every vertex, BFS with incident edges
/// visited in increasing id order.
std::map<VertexId, PathWord> spanning_tree(const Graph& g);

struct FamilyFactor {
  std::size_t index = 0;
  int orient = 1;
  bool operator==(const FamilyFactor&) const = default;
};

/// Shortest factorization of p as compose(f_{i1}^{o1}, compose(..., f_{ik}^{ok}))
/// with k <= max_factors, or nullopt if none exists within the bound.
std::optional<std::vector<FamilyFactor>> depends_on(const Graph& g, const PathWord& p,
                                                    std::span<const PathWord> family,
                                                    std::size_t max_factors);

/// No member factors through the others within `max_factors`.
bool is_independent(const Graph& g, std::span<const PathWord> family, std::size_t max_factors);

}  // namespace hlab
