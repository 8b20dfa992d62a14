#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hlab/matrixgroups.hpp"
#include "hlab/pathgroupoid.hpp"

namespace hlab {

class IndependenceViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph-level point of Hom(Path, G): one group value per edge, extended to
/// words multiplicatively.
class GeneralizedConnection {
 public:
  GeneralizedConnection(GroupDescriptor d, std::map<EdgeId, GroupElement> values);

  static GeneralizedConnection trivial(const Graph& g, const GroupDescriptor& d);
  static GeneralizedConnection haar_random(const Graph& g, const GroupDescriptor& d, Rng& rng);

  const GroupDescriptor& descriptor() const { return d_; }
  const std::map<EdgeId, GroupElement>& values() const { return values_; }
  const GroupElement& value(EdgeId e) const;

  /// Throws GraphError unless there is exactly one value per graph edge.
  void validate(const Graph& g) const;

 private:
  GroupDescriptor d_;
  std::map<EdgeId, GroupElement> values_;
};

/// Ordered product with the first-traversed letter rightmost, so that
/// holonomy(compose(p, q)) == holonomy(p) * holonomy(q).
GroupElement holonomy_general(const GeneralizedConnection& h, const PathWord& p);

/// Smooth cutoff: 1 within radius/2 of the centre, 0 beyond radius.
double bump_profile(double distance, double radius);

struct Bump {
  Point center;
  double radius = 1.0;
  Point direction;  // unit covector; unused by gauge fields

  double value(const Point& x) const { return bump_profile((x - center).norm(), radius); }
};

struct ConnectionTerm {
  LieAlgebraElement generator;
  Bump bump;
};

/// A = sum_k X_k phi_k(x) <direction_k, dx>.
class SmoothConnection {
 public:
  SmoothConnection(GroupDescriptor d, std::vector<ConnectionTerm> terms);

  const GroupDescriptor& descriptor() const { return d_; }
  const std::vector<ConnectionTerm>& terms() const { return terms_; }

  /// A(x)[v] as an algebra matrix.
  Matrix evaluate(const Point& x, const Point& velocity) const;

 private:
  GroupDescriptor d_;
  std::vector<ConnectionTerm> terms_;
};

using Curve = std::vector<Point>;

/// Concatenated polyline of the word's edges (reversed for inverse letters).
/// Empty words give a single-point curve at the vertex position when known.
Curve curve_of(const Graph& g, const PathWord& p);
Curve curve_of(const Graph& g, std::span<const Letter> letters);

/// Parallel transport U' = -A(gamma')U with two-point Gauss-Legendre Magnus
/// steps (fourth order, time symmetric), `steps` sub-steps per polyline segment.
GroupElement holonomy_smooth(const SmoothConnection& a, const Curve& curve, int steps);

/// Doubles the step count until successive results agree within `tolerance`.
GroupElement holonomy_smooth_adaptive(const SmoothConnection& a, const Curve& curve, double tolerance,
                                      int initial_steps = 8, int max_steps = 1 << 14);

/// Gauss-Legendre sum of phi(x)<direction, dx> along the curve, using exactly
/// the nodes of holonomy_smooth.
double bump_line_integral(const Bump& bump, const Curve& curve, int steps);

/// Edge transports of a smooth connection as a generalized connection.
GeneralizedConnection restrict_to_graph(const SmoothConnection& a, const Graph& g, int steps);

struct DiscreteGauge {
  std::map<VertexId, GroupElement> values;
};

struct GaugeTerm {
  LieAlgebraElement generator;
  Point center;
  double radius = 1.0;
};

/// g(x) = exp(sum_k Y_k phi_k(x)).
class SmoothGauge {
 public:
  SmoothGauge(GroupDescriptor d, std::vector<GaugeTerm> terms);

  const GroupDescriptor& descriptor() const { return d_; }
  const std::vector<GaugeTerm>& terms() const { return terms_; }
  GroupElement at(const Point& x) const;

 private:
  GroupDescriptor d_;
  std::vector<GaugeTerm> terms_;
};

DiscreteGauge random_discrete_gauge(const Graph& g, const GroupDescriptor& d, Rng& rng);

/// (H.g)(e) = g(dst)^{-1} H(e) g(src).
GeneralizedConnection gauge_act_general(const Graph& graph, const GeneralizedConnection& h, const DiscreteGauge& g);

/// Holonomies of A.g, defined by H_{A.g}(c) = g(c(1))^{-1} H_A(c) g(c(0)).
class GaugedHolonomy {
 public:
  GaugedHolonomy(SmoothConnection a, SmoothGauge g, int steps);
  GroupElement operator()(const Curve& curve) const;

 private:
  SmoothConnection a_;
  SmoothGauge g_;
  int steps_;
};

GaugedHolonomy gauge_act_smooth(const SmoothConnection& a, const SmoothGauge& g, int steps);

/// For A over Product(T^n, S): transports of the torus and semisimple parts,
/// each embedded in the product. Their product equals the full holonomy.
std::pair<GroupElement, GroupElement> split_holonomy(const SmoothConnection& a, const Curve& curve, int steps);

struct InterpolationTarget {
  PathWord path;
  GroupElement target;
  EdgeId private_edge = 0;  // edge used by this path and no other family member
};

/// One bump per target, centred on its private edge and kept clear of every
/// other edge, with generator -log(g)/c so the transport reproduces g.
SmoothConnection interpolate_connection(const Graph& g, const GroupDescriptor& d,
                                        std::span<const InterpolationTarget> targets, int steps);

/// Edge-wise p_K.
GeneralizedConnection pushforward_hom(const GroupDescriptor& quotient, const GeneralizedConnection& h);

}  // namespace hlab
