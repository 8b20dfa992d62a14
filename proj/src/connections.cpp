#include "hlab/connections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hlab {

GeneralizedConnection::GeneralizedConnection(GroupDescriptor d, std::map<EdgeId, GroupElement> values)
    : d_(std::move(d)), values_(std::move(values)) {
  for (const auto& [e, v] : values_) {
    if (!(v.descriptor() == d_)) {
      throw DescriptorMismatch("value on edge " + std::to_string(e) + " lives in " + v.descriptor().name() +
                               ", connection is over " + d_.name());
    }
  }
}

GeneralizedConnection GeneralizedConnection::trivial(const Graph& g, const GroupDescriptor& d) {
  std::map<EdgeId, GroupElement> values;
  for (const Edge& e : g.edges()) values.emplace(e.id, identity(d));
  return GeneralizedConnection(d, std::move(values));
}

GeneralizedConnection GeneralizedConnection::haar_random(const Graph& g, const GroupDescriptor& d, Rng& rng) {
  std::map<EdgeId, GroupElement> values;
  for (const Edge& e : g.edges()) values.emplace(e.id, haar_sample(d, rng));
  return GeneralizedConnection(d, std::move(values));
}

const GroupElement& GeneralizedConnection::value(EdgeId e) const {
  auto it = values_.find(e);
  if (it == values_.end()) throw GraphError("connection has no value on edge " + std::to_string(e));
  return it->second;
}

void GeneralizedConnection::validate(const Graph& g) const {
  for (const Edge& e : g.edges()) {
    if (!values_.count(e.id)) throw GraphError("connection has no value on edge " + std::to_string(e.id));
  }
  for (const auto& kv : values_) {
    if (!g.has_edge(kv.first)) throw GraphError("connection assigns unknown edge " + std::to_string(kv.first));
  }
}

GroupElement holonomy_general(const GeneralizedConnection& h, const PathWord& p) {
  Matrix acc = Matrix::Identity(h.descriptor().dim(), h.descriptor().dim());
  for (const Letter& l : p.letters()) {
    const Matrix& u = h.value(l.edge).matrix();
    acc = l.orient > 0 ? Matrix(u * acc) : Matrix(u.adjoint() * acc);
  }
  const GroupDescriptor& d = h.descriptor();
  GroupElement out(d, std::move(acc), GroupElement::Unchecked{});
  if (d.kind() == GroupKind::Quotient || unitarity_defect(out.matrix()) > 1e-11) return reunitarize(out);
  return out;
}

double bump_profile(double distance, double radius) {
  if (distance <= 0.5 * radius) return 1.0;
  if (distance >= radius) return 0.0;
  const double s = (distance - 0.5 * radius) / (0.5 * radius);
  auto psi = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = psi(1.0 - s);
  const double b = psi(s);
  return a / (a + b);
}

SmoothConnection::SmoothConnection(GroupDescriptor d, std::vector<ConnectionTerm> terms)
    : d_(std::move(d)), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!(t.generator.descriptor() == d_)) throw DescriptorMismatch("connection term outside " + d_.name());
    if (!(t.bump.radius > 0)) throw std::invalid_argument("bump radius must be positive");
    if (t.bump.center.size() != t.bump.direction.size()) {
      throw std::invalid_argument("bump centre and direction have different dimensions");
    }
  }
}

Matrix SmoothConnection::evaluate(const Point& x, const Point& velocity) const {
  Matrix out = Matrix::Zero(d_.dim(), d_.dim());
  for (const auto& t : terms_) {
    if (t.bump.center.size() != x.size()) throw std::invalid_argument("chart dimension mismatch");
    const double phi = t.bump.value(x);
    if (phi == 0.0) continue;
    out += (phi * t.bump.direction.dot(velocity)) * t.generator.matrix();
  }
  return out;
}

Curve curve_of(const Graph& g, std::span<const Letter> letters) {
  Curve out;
  for (const Letter& l : letters) {
    Curve c = g.edge_curve(l.edge);
    if (l.orient < 0) std::reverse(c.begin(), c.end());
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

Curve curve_of(const Graph& g, const PathWord& p) {
  if (p.is_unit()) {
    const auto& pos = g.vertex(p.source()).pos;
    if (pos) return {*pos};
    return {};
  }
  return curve_of(g, std::span<const Letter>(p.letters()));
}

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // sqrt(3)/6

template <typename Visit>
void for_each_gauss_step(const Curve& curve, int steps, Visit&& visit) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
    const Point& a = curve[s];
    const Point& b = curve[s + 1];
    const Point v = b - a;
    if (v.squaredNorm() == 0.0) continue;
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
      const double t0 = k * h;
      const Point x1 = a + (t0 + h * (0.5 - kGaussOffset)) * v;
      const Point x2 = a + (t0 + h * (0.5 + kGaussOffset)) * v;
      visit(x1, x2, v, h);
    }
  }
}

Matrix transport_matrix(const SmoothConnection& a, const Curve& curve, int steps) {
  const GroupDescriptor& d = a.descriptor();
  Matrix u = Matrix::Identity(d.dim(), d.dim());
  if (a.terms().empty()) return u;
  const double c3 = std::sqrt(3.0) / 12.0;
  for_each_gauss_step(curve, steps, [&](const Point& x1, const Point& x2, const Point& v, double h) {
    const Matrix c1 = -a.evaluate(x1, v);
    const Matrix c2 = -a.evaluate(x2, v);
    if (c1.isZero(0.0) && c2.isZero(0.0)) return;
    const Matrix omega = (0.5 * h) * (c1 + c2) + (c3 * h * h) * (c2 * c1 - c1 * c2);
    u = (detail::expm_unchecked(d, omega) * u).eval();
  });
  return u;
}

GroupElement to_element(const GroupDescriptor& d, Matrix m) {
  return reunitarize(GroupElement(d, std::move(m), GroupElement::Unchecked{}));
}

}  // namespace

GroupElement holonomy_smooth(const SmoothConnection& a, const Curve& curve, int steps) {
  return to_element(a.descriptor(), transport_matrix(a, curve, steps));
}

GroupElement holonomy_smooth_adaptive(const SmoothConnection& a, const Curve& curve, double tolerance,
                                      int initial_steps, int max_steps) {
  int steps = std::max(1, initial_steps);
  Matrix prev = transport_matrix(a, curve, steps);
  while (steps < max_steps) {
    steps *= 2;
    Matrix next = transport_matrix(a, curve, steps);
    const double diff = (next - prev).norm();
    prev = std::move(next);
    if (diff <= tolerance) break;
  }
  return to_element(a.descriptor(), std::move(prev));
}

double bump_line_integral(const Bump& bump, const Curve& curve, int steps) {
  double total = 0.0;
  for_each_gauss_step(curve, steps, [&](const Point& x1, const Point& x2, const Point& v, double h) {
    total += 0.5 * h * (bump.value(x1) + bump.value(x2)) * bump.direction.dot(v);
  });
  return total;
}

GeneralizedConnection restrict_to_graph(const SmoothConnection& a, const Graph& g, int steps) {
  std::map<EdgeId, GroupElement> values;
  for (const Edge& e : g.edges()) values.emplace(e.id, holonomy_smooth(a, g.edge_curve(e.id), steps));
  return GeneralizedConnection(a.descriptor(), std::move(values));
}

SmoothGauge::SmoothGauge(GroupDescriptor d, std::vector<GaugeTerm> terms) : d_(std::move(d)), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!(t.generator.descriptor() == d_)) throw DescriptorMismatch("gauge term outside " + d_.name());
    if (!(t.radius > 0)) throw std::invalid_argument("gauge bump radius must be positive");
  }
}

GroupElement SmoothGauge::at(const Point& x) const {
  Matrix y = Matrix::Zero(d_.dim(), d_.dim());
  for (const auto& t : terms_) {
    const double phi = bump_profile((x - t.center).norm(), t.radius);
    if (phi != 0.0) y += phi * t.generator.matrix();
  }
  return exp_map(LieAlgebraElement(d_, std::move(y)));
}

DiscreteGauge random_discrete_gauge(const Graph& g, const GroupDescriptor& d, Rng& rng) {
  DiscreteGauge out;
  for (const Vertex& v : g.vertices()) out.values.emplace(v.id, haar_sample(d, rng));
  return out;
}

GeneralizedConnection gauge_act_general(const Graph& graph, const GeneralizedConnection& h, const DiscreteGauge& g) {
  auto at = [&](VertexId v) -> const GroupElement& {
    auto it = g.values.find(v);
    if (it == g.values.end()) throw GraphError("gauge transformation has no value at vertex " + std::to_string(v));
    return it->second;
  };
  std::map<EdgeId, GroupElement> values;
  for (const auto& [id, u] : h.values()) {
    const Edge& e = graph.edge(id);
    values.emplace(id, mul(mul(inv(at(e.dst)), u), at(e.src)));
  }
  return GeneralizedConnection(h.descriptor(), std::move(values));
}

GaugedHolonomy::GaugedHolonomy(SmoothConnection a, SmoothGauge g, int steps)
    : a_(std::move(a)), g_(std::move(g)), steps_(steps) {
  if (!(a_.descriptor() == g_.descriptor())) throw DescriptorMismatch("gauge and connection groups differ");
}

GroupElement GaugedHolonomy::operator()(const Curve& curve) const {
  const GroupElement h = holonomy_smooth(a_, curve, steps_);
  if (curve.empty()) return h;
  return mul(mul(inv(g_.at(curve.back())), h), g_.at(curve.front()));
}

GaugedHolonomy gauge_act_smooth(const SmoothConnection& a, const SmoothGauge& g, int steps) {
  return GaugedHolonomy(a, g, steps);
}

std::pair<GroupElement, GroupElement> split_holonomy(const SmoothConnection& a, const Curve& curve, int steps) {
  const GroupDescriptor& d = a.descriptor();
  if (d.kind() != GroupKind::Product || d.factors().size() != 2 || d.factors()[0].kind() != GroupKind::Torus) {
    throw DescriptorMismatch("split_holonomy needs a Product(Torus, S) descriptor, got " + d.name());
  }
  std::vector<ConnectionTerm> torus_terms;
  std::vector<ConnectionTerm> semisimple_terms;
  for (const auto& t : a.terms()) {
    torus_terms.push_back({embed_block(d, 0, extract_block(t.generator, 0)), t.bump});
    semisimple_terms.push_back({embed_block(d, 1, extract_block(t.generator, 1)), t.bump});
  }
  return {holonomy_smooth(SmoothConnection(d, std::move(torus_terms)), curve, steps),
          holonomy_smooth(SmoothConnection(d, std::move(semisimple_terms)), curve, steps)};
}

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_curve_distance(const Point& p, const Curve& c) {
  if (c.size() == 1) return (p - c.front()).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.size(); ++i) best = std::min(best, point_segment_distance(p, c[i], c[i + 1]));
  return best;
}

struct EdgeMidpoint {
  Point point;
  Point tangent;
  double length = 0;
};

EdgeMidpoint midpoint_of(const Curve& c) {
  double total = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) total += (c[i + 1] - c[i]).norm();
  if (total == 0) throw IndependenceViolation("private edge has zero length");
  double walked = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double seg = (c[i + 1] - c[i]).norm();
    if (seg > 0 && walked + seg >= 0.5 * total) {
      const double t = (0.5 * total - walked) / seg;
      return {c[i] + t * (c[i + 1] - c[i]), (c[i + 1] - c[i]) / seg, total};
    }
    walked += seg;
  }
  return {c.back(), (c.back() - c.front()).normalized(), total};
}

}  // namespace

SmoothConnection interpolate_connection(const Graph& g, const GroupDescriptor& d,
                                        std::span<const InterpolationTarget> targets, int steps) {
  // Independence witness: each private edge lies on its own path only.
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    if (!(t.target.descriptor() == d)) throw DescriptorMismatch("target " + std::to_string(k) + " outside " + d.name());
    const auto on_path = [&](const PathWord& p) {
      return std::any_of(p.letters().begin(), p.letters().end(), [&](const Letter& l) { return l.edge == t.private_edge; });
    };
    if (!on_path(t.path)) {
      throw IndependenceViolation("private edge " + std::to_string(t.private_edge) + " is not on path " +
                                  std::to_string(k));
    }
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (j != k && on_path(targets[j].path)) {
        throw IndependenceViolation("private edge " + std::to_string(t.private_edge) + " of path " + std::to_string(k) +
                                    " is also crossed by path " + std::to_string(j));
      }
    }
  }

  std::vector<ConnectionTerm> terms;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    const Curve edge_curve = g.edge_curve(t.private_edge);
    const EdgeMidpoint mid = midpoint_of(edge_curve);
    double clearance = std::numeric_limits<double>::infinity();
    for (const Edge& e : g.edges()) {
      if (e.id == t.private_edge) continue;
      clearance = std::min(clearance, point_curve_distance(mid.point, g.edge_curve(e.id)));
    }
    const double radius = std::min(0.25 * mid.length, 0.9 * clearance);
    if (!(radius > 0)) {
      throw IndependenceViolation("private edge " + std::to_string(t.private_edge) + " touches another edge at its midpoint");
    }

    LieAlgebraElement log_g = [&] {
      try {
        return log_map(t.target, LogBranch::Principal);
      } catch (const LogBranchError&) {
        return log_map(t.target, LogBranch::ClosedUpper);
      }
    }();
    if (log_g.matrix().norm() == 0.0) continue;

    Bump bump{mid.point, radius, mid.tangent};
    const double c = bump_line_integral(bump, curve_of(g, t.path), steps);
    if (std::abs(c) < 1e-12) {
      throw IndependenceViolation("path " + std::to_string(k) + " has no net flux through its private bump");
    }
    terms.push_back({LieAlgebraElement(d, (-1.0 / c) * log_g.matrix()), std::move(bump)});
  }
  return SmoothConnection(d, std::move(terms));
}

GeneralizedConnection pushforward_hom(const GroupDescriptor& quotient, const GeneralizedConnection& h) {
  std::map<EdgeId, GroupElement> values;
  for (const auto& [e, v] : h.values()) values.emplace(e, quotient_project(quotient, v));
  return GeneralizedConnection(quotient, std::move(values));
}

}  // namespace hlab
