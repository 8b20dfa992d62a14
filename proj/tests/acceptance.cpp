// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

#include "hlab/cylindrical.hpp"
#include "hlab/graphs.hpp"
#include "hlab/json_io.hpp"
#include "hlab/spectra.hpp"

using namespace hlab;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

GroupDescriptor u2_quotient() {
  const auto base = GroupDescriptor::product({GroupDescriptor::torus(1), GroupDescriptor::special_unitary(2)});
  return GroupDescriptor::quotient(base, {Matrix::Identity(3, 3), -Matrix::Identity(3, 3)});
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// ---------- 1 ----------

Graph triangle() {
  return Graph({{0, std::nullopt}, {1, std::nullopt}, {2, std::nullopt}},
               {{1, 0, 1, {}}, {2, 1, 2, {}}, {3, 2, 0, {}}, {4, 0, 2, {}}}, 0);
}

// Every normal form reachable by cancelling adjacent pairs in any order.
void all_normal_forms(const std::vector<std::int64_t>& w, std::set<std::vector<std::int64_t>>& out,
                      std::set<std::vector<std::int64_t>>& seen) {
  if (!seen.insert(w).second) return;
  bool reducible = false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == -w[i + 1]) {
      reducible = true;
      std::vector<std::int64_t> next(w.begin(), w.begin() + static_cast<long>(i));
      next.insert(next.end(), w.begin() + static_cast<long>(i) + 2, w.end());
      all_normal_forms(next, out, seen);
    }
  }
  if (!reducible) out.insert(w);
}

void all_walks(const Graph& g, VertexId at, std::vector<std::int64_t>& word, std::size_t max_len,
               const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  if (!word.empty()) visit(word);
  if (word.size() == max_len) return;
  for (const Edge& e : g.edges()) {
    for (int o : {1, -1}) {
      if ((o > 0 ? e.src : e.dst) != at) continue;
      word.push_back(o * e.id);
      all_walks(g, o > 0 ? e.dst : e.src, word, max_len, visit);
      word.pop_back();
    }
  }
}

Result criterion1() {
  const Graph g = triangle();
  std::size_t words = 0, mismatches = 0;
  for (const Vertex& v : g.vertices()) {
    std::vector<std::int64_t> word;
    all_walks(g, v.id, word, 8, [&](const std::vector<std::int64_t>& w) {
      ++words;
      std::set<std::vector<std::int64_t>> forms, seen;
      all_normal_forms(w, forms, seen);
      const auto reduced = path_from_signed_ids(g, w, v.id).signed_ids();
      if (forms.size() != 1 || *forms.begin() != reduced) ++mismatches;
    });
  }

  std::mt19937_64 rng(1);
  auto random_path = [&](VertexId start, int len) {
    std::vector<std::int64_t> ids;
    VertexId at = start;
    for (int i = 0; i < len; ++i) {
      std::vector<std::int64_t> opts;
      for (const Edge& e : g.edges()) {
        if (e.src == at) opts.push_back(e.id);
        if (e.dst == at) opts.push_back(-e.id);
      }
      const auto pick = opts[rng() % opts.size()];
      ids.push_back(pick);
      at = pick > 0 ? g.edge(pick).dst : g.edge(-pick).src;
    }
    return path_from_signed_ids(g, ids, start);
  };
  std::size_t law_failures = 0;
  constexpr int kLawCases = 2000;
  for (int i = 0; i < kLawCases; ++i) {
    const PathWord a = random_path(static_cast<VertexId>(rng() % 3), static_cast<int>(rng() % 7));
    const PathWord b = random_path(a.range(), static_cast<int>(rng() % 7));
    const PathWord c = random_path(b.range(), static_cast<int>(rng() % 7));
    const bool ok = compose(g, c, compose(g, b, a)) == compose(g, compose(g, c, b), a) &&
                    compose(g, a, PathWord::unit(a.source())) == a && compose(g, PathWord::unit(a.range()), a) == a &&
                    compose(g, inverse(a), a) == PathWord::unit(a.source()) &&
                    compose(g, a, inverse(a)) == PathWord::unit(a.range());
    if (!ok) ++law_failures;
  }
  return {mismatches == 0 && law_failures == 0,
          std::to_string(words) + " words <= 8 letters, " + std::to_string(mismatches) + " confluence mismatches; " +
              std::to_string(kLawCases) + " law cases, " + std::to_string(law_failures) + " failures"};
}

// ---------- 2, 3 ----------

// K4 on a square, diagonals bent so they do not cross.
Graph k4() {
  std::vector<Vertex> vs{{0, pt(0, 0)}, {1, pt(1, 0)}, {2, pt(1, 1)}, {3, pt(0, 1)}};
  std::vector<Edge> es{{1, 0, 1, {}}, {2, 1, 2, {}}, {3, 2, 3, {}}, {4, 3, 0, {}},
                       {5, 0, 2, {pt(0, 0), pt(0.6, 0.3), pt(1, 1)}}, {6, 1, 3, {pt(1, 0), pt(1.3, 1.3), pt(0, 1)}}};
  return Graph(vs, es, 0);
}

SmoothConnection random_connection(const GroupDescriptor& d, Rng& rng, int terms) {
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  std::vector<ConnectionTerm> out;
  for (int k = 0; k < terms; ++k) {
    Point dir = pt(u(rng) - 0.5, u(rng) - 0.5);
    dir.normalize();
    out.push_back({random_lie_element(d, rng, 2.0), Bump{pt(u(rng), u(rng)), 0.5 + 0.5 * u(rng), dir}});
  }
  return SmoothConnection(d, std::move(out));
}

std::vector<Letter> random_letters(const Graph& g, VertexId start, int len, Rng& rng) {
  std::vector<Letter> out;
  VertexId at = start;
  for (int i = 0; i < len; ++i) {
    std::vector<Letter> opts;
    for (const Edge& e : g.edges()) {
      if (e.src == at) opts.push_back({e.id, 1});
      if (e.dst == at) opts.push_back({e.id, -1});
    }
    out.push_back(opts[rng() % opts.size()]);
    at = letter_range(g, out.back());
  }
  return out;
}

Result criterion2() {
  const Graph g = k4();
  const auto su2 = GroupDescriptor::special_unitary(2);
  double worst_func = 0.0, worst_retrace = 0.0;
  for (int c = 0; c < 20; ++c) {
    Rng rng(mix_seed(2, c));
    const SmoothConnection a = random_connection(su2, rng, 4);
    for (int trial = 0; trial < 5; ++trial) {
      const auto lambda = random_letters(g, 0, 1 + static_cast<int>(rng() % 4), rng);
      const VertexId mid = letter_range(g, lambda.back());
      const auto eta = random_letters(g, mid, 1 + static_cast<int>(rng() % 4), rng);
      std::vector<Letter> both = lambda;
      both.insert(both.end(), eta.begin(), eta.end());
      const auto h_l = holonomy_smooth(a, curve_of(g, lambda), 32);
      const auto h_e = holonomy_smooth(a, curve_of(g, eta), 32);
      worst_func = std::max(worst_func, distance(holonomy_smooth(a, curve_of(g, both), 32), mul(h_e, h_l)));

      // gamma gamma^{-1} eta, traversed literally.
      const auto gamma = random_letters(g, mid, 1 + static_cast<int>(rng() % 4), rng);
      std::vector<Letter> retrace;
      for (auto it = gamma.rbegin(); it != gamma.rend(); ++it) retrace.push_back(it->inverse());
      // Start at mid: go along gamma, come back, then eta.
      std::vector<Letter> word = gamma;
      word.insert(word.end(), retrace.begin(), retrace.end());
      word.insert(word.end(), eta.begin(), eta.end());
      worst_retrace = std::max(worst_retrace, distance(holonomy_smooth(a, curve_of(g, word), 32), h_e));
    }
  }
  return {worst_func <= 1e-8 && worst_retrace <= 1e-8,
          "max functoriality defect " + sci(worst_func) + ", max retracing defect " + sci(worst_retrace)};
}

template <typename Field>
Matrix rk4_transport(int n, const Curve& c, int per_segment, Field field) {
  Matrix u = Matrix::Identity(n, n);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const Point a = c[i];
    const Point v = c[i + 1] - c[i];
    const double h = 1.0 / per_segment;
    for (int s = 0; s < per_segment; ++s) {
      const double t = s * h;
      auto f = [&](double tt, const Matrix& y) -> Matrix { return -field(Point(a + tt * v), v) * y; };
      const Matrix k1 = f(t, u);
      const Matrix k2 = f(t + h / 2, u + h / 2 * k1);
      const Matrix k3 = f(t + h / 2, u + h / 2 * k2);
      const Matrix k4 = f(t + h, u + h * k3);
      u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return u;
}

Result criterion3() {
  const Graph g = k4();
  double worst_smooth = 0.0;
  for (int c = 0; c < 10; ++c) {
    const auto d = c % 2 ? GroupDescriptor::special_unitary(3) : GroupDescriptor::special_unitary(2);
    Rng rng(mix_seed(3, c));
    const SmoothConnection a = random_connection(d, rng, 3);
    std::vector<GaugeTerm> gt;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2; ++k) gt.push_back({random_lie_element(d, rng, 1.0), pt(u(rng), u(rng)), 0.8 + u(rng)});
    const SmoothGauge gauge(d, gt);
    const Curve curve = curve_of(g, random_letters(g, 0, 3, rng));
    const double h = 1e-5;
    const Matrix ref = rk4_transport(d.dim(), curve, 2000, [&](const Point& x, const Point& v) {
      const Matrix gx = gauge.at(x).matrix();
      const Matrix dg = (gauge.at(x + h * v).matrix() - gauge.at(x - h * v).matrix()) / (2 * h);
      return Matrix(gx.adjoint() * a.evaluate(x, v) * gx + gx.adjoint() * dg);
    });
    worst_smooth = std::max(worst_smooth, (gauge_act_smooth(a, gauge, 64)(curve).matrix() - ref).norm());
  }

  double worst_law = 0.0;
  for (const auto& d : {GroupDescriptor::special_unitary(2), GroupDescriptor::special_unitary(3), u2_quotient()}) {
    Rng rng(33);
    for (int i = 0; i < 20; ++i) {
      const auto h = GeneralizedConnection::haar_random(g, d, rng);
      const auto g1 = random_discrete_gauge(g, d, rng);
      const auto g2 = random_discrete_gauge(g, d, rng);
      DiscreteGauge prod, unit;
      for (const auto& [v, x] : g1.values) {
        prod.values.emplace(v, mul(x, g2.values.at(v)));
        unit.values.emplace(v, identity(d));
      }
      const auto lhs = gauge_act_general(g, gauge_act_general(g, h, g1), g2);
      const auto rhs = gauge_act_general(g, h, prod);
      const auto same = gauge_act_general(g, h, unit);
      for (const auto& [e, u] : lhs.values()) {
        worst_law = std::max({worst_law, distance(u, rhs.value(e)), distance(same.value(e), h.value(e))});
      }
    }
  }
  return {worst_smooth <= 1e-6 && worst_law <= 1e-12,
          "smooth action vs transformed-form oracle " + sci(worst_smooth) + " (10 cases), discrete action law " +
              sci(worst_law)};
}

// ---------- 4 ----------

Matrix su2_from(Complex alpha, Complex beta) {
  Matrix a(2, 2);
  a << alpha, -std::conj(beta), beta, std::conj(alpha);
  return a;
}

// Gauss-Legendre nodes and weights on [a, b].
std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
  std::vector<std::pair<double, double>> out;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2 / ((1 - x * x) * dp * dp);
    out.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w);
  }
  return out;
}

// Hopf coordinates: alpha = cos(eta) e^{i xi1}, beta = sin(eta) e^{i xi2}, density sin(2 eta).
template <typename F>
double su2_quadrature(F f) {
  constexpr int kXi = 24;
  double total = 0.0, weight = 0.0;
  for (const auto& [eta, w_eta] : gauss_legendre(40, 0.0, std::numbers::pi / 2)) {
    const double wgt = w_eta * std::sin(2 * eta);
    for (int j = 0; j < kXi; ++j) {
      for (int k = 0; k < kXi; ++k) {
        total += wgt * f(su2_from(std::cos(eta) * std::polar(1.0, 2 * std::numbers::pi * j / kXi),
                                  std::sin(eta) * std::polar(1.0, 2 * std::numbers::pi * k / kXi)));
        weight += wgt;
      }
    }
  }
  return total / weight;
}

Result criterion4() {
  const auto su2 = GroupDescriptor::special_unitary(2);
  const HaarMeanOptions opt{1000000, 4, 0};
  std::ostringstream detail;
  bool pass = true;
  auto check = [&](const std::string& name, double diff, double sigma) {
    const bool ok = std::abs(diff) <= 3 * sigma;
    pass = pass && ok;
    detail << name << " dev " << sci(std::abs(diff)) << " (3s " << sci(3 * sigma) << ")" << (ok ? "" : " FAIL")
           << "; ";
  };

  // Open edge on a cycle: independent left and right averaging.
  const Graph cyc = cycle_graph(3);
  Rng rng(40);
  const auto h = GeneralizedConnection::haar_random(cyc, su2, rng);
  const PathWord e = path_from_signed_ids(cyc, std::vector<std::int64_t>{1});
  const MeanValue phi = haar_mean(as_cylindrical(RepresentativeFunction{1, 1, e}), su2, opt)(h);
  check("<Phi_11;e>", std::abs(phi.value), phi.std_error);
  const Expr sq = Expr::entry(1, 1, 1) * Expr::conj(Expr::entry(1, 1, 1));
  const MeanValue open = haar_mean(CylFunction{{e}, sq}, su2, opt)(h);
  check("<|H11|^2> open edge vs 1/2", open.value.real() - 0.5, open.std_error);

  // Single loop: conjugation averaging, exact value by quadrature.
  const Graph fl = flower_graph(1);
  const auto loop_val = haar_sample(su2, 41);
  const GeneralizedConnection hl(su2, {{1, loop_val}});
  const PathWord loop = path_from_signed_ids(fl, std::vector<std::int64_t>{1});
  const double oracle =
      su2_quadrature([&](const Matrix& a) { return std::norm((a * loop_val.matrix() * a.adjoint())(0, 0)); });
  const MeanValue closed = haar_mean(CylFunction{{loop}, sq}, su2, opt)(hl);
  check("<|H11|^2> loop vs quadrature " + sci(oracle), closed.value.real() - oracle, closed.std_error);

  // Gauge invariance and idempotence of <F> for a two-path function.
  const CylFunction f{{e, path_from_signed_ids(cyc, std::vector<std::int64_t>{1, 2})},
                      Expr::entry(1, 1, 2) * Expr::conj(Expr::entry(2, 1, 2)) + sq};
  const HaarMean mean = haar_mean(f, su2, opt);
  const MeanValue base = mean(h);
  const auto gauge = random_discrete_gauge(cyc, su2, rng);
  const MeanValue moved = mean(gauge_act_general(cyc, h, gauge));
  check("gauge invariance", std::abs(moved.value - base.value), std::hypot(base.std_error, moved.std_error));

  // <<F>>: average <F> over the orbit with independent samples.
  HaarMeanOptions small = opt;
  small.samples = opt.samples / 8;
  Complex twice = 0;
  double var = 0;
  for (int k = 0; k < 8; ++k) {
    small.seed = mix_seed(99, k);
    const MeanValue v = haar_mean(f, su2, small)(gauge_act_general(cyc, h, random_discrete_gauge(cyc, su2, rng)));
    twice += v.value / 8.0;
    var += v.std_error * v.std_error / 64.0;
  }
  check("idempotence", std::abs(twice - base.value), std::sqrt(var + base.std_error * base.std_error));
  return {pass, detail.str() + "1e6 samples"};
}

// ---------- 5 ----------

Result criterion5() {
  const Graph g = k4();
  const ThetaData t = make_theta_data(g);
  double worst_fwd = 0.0, worst_back = 0.0;
  const std::vector<GroupDescriptor> kinds{
      GroupDescriptor::special_unitary(2), GroupDescriptor::special_unitary(3), GroupDescriptor::unitary(2),
      GroupDescriptor::torus(2),
      GroupDescriptor::product({GroupDescriptor::torus(1), GroupDescriptor::special_unitary(2)}), u2_quotient()};
  for (const auto& d : kinds) {
    Rng rng(55);
    for (int i = 0; i < 100; ++i) {
      const auto h = GeneralizedConnection::haar_random(g, d, rng);
      const auto back = theta_inverse(g, d, theta(h, t), t);
      for (const auto& [e, u] : h.values()) worst_fwd = std::max(worst_fwd, distance(back.value(e), u));

      ThetaImage img;
      for (std::size_t k = 0; k < t.generators.size(); ++k) img.loops.push_back(haar_sample(d, rng));
      for (const auto& [v, p] : t.tree) img.frame.emplace(v, v == g.basepoint() ? identity(d) : haar_sample(d, rng));
      const ThetaImage again = theta(theta_inverse(g, d, img, t), t);
      for (std::size_t k = 0; k < img.loops.size(); ++k) {
        worst_back = std::max(worst_back, distance(again.loops[k], img.loops[k]));
      }
      for (const auto& [v, f] : img.frame) worst_back = std::max(worst_back, distance(again.frame.at(v), f));
    }
  }
  return {worst_fwd <= 1e-12 && worst_back <= 1e-12,
          "6 descriptor kinds x 100: theta_inverse(theta(H)) " + sci(worst_fwd) + ", theta(theta_inverse(x)) " +
              sci(worst_back)};
}

// ---------- 6 ----------

Result criterion6() {
  double worst = 0.0;
  int runs = 0;
  for (int n : {2, 3}) {
    const auto d = GroupDescriptor::special_unitary(n);
    for (int r : {1, 3, 6}) {
      const Graph g = flower_graph(r);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<FamilyMember> fam;
        std::vector<GroupElement> targets;
        for (int k = 1; k <= r; ++k) {
          fam.push_back({path_from_signed_ids(g, std::vector<std::int64_t>{k}), k});
          targets.push_back(haar_sample(d, mix_seed(seed, 100 * n + k)));
        }
        const auto rep = approximation_experiment(g, d, fam, targets, 1e-6, 32);
        worst = std::max(worst, rep.max_error);
        ++runs;
      }
    }
  }
  return {worst <= 1e-6, std::to_string(runs) + " runs over SU(2), SU(3) with r in {1,3,6}; max error " + sci(worst)};
}

// ---------- 7 ----------

Result criterion7() {
  const Graph g = flower_graph(2);
  const PathWord comm = path_from_signed_ids(g, std::vector<std::int64_t>{1, 2, -1, -2});
  const PathWord single = path_from_signed_ids(g, std::vector<std::int64_t>{1});
  const auto entries = abelian_obstruction_witness(g, std::vector<PathWord>{comm, single}, 7);
  const auto& c = entries[0];
  const bool witness_ok = c.verdict == ObstructionVerdict::Obstructed && c.witness &&
                          distance(c.witness->loop_holonomy, identity(GroupDescriptor::special_unitary(2))) > 1e-3 &&
                          !c.witness->torus_value_in_closure;
  const bool unobstructed = entries[1].verdict == ObstructionVerdict::Unobstructed;

  // Every reduced word of length <= 12 with zero abelianization.
  const auto t2 = GroupDescriptor::torus(2);
  Rng rng(70);
  const SmoothConnection a = random_connection(t2, rng, 6);
  const auto edges = restrict_to_graph(a, g, 32);
  std::size_t count = 0, sampled = 0;
  double worst = 0.0, worst_direct = 0.0;
  for (const auto& word : reduced_generator_words(2, 12)) {
    std::int64_t n1 = 0, n2 = 0;
    for (auto l : word) (std::abs(l) == 1 ? n1 : n2) += l > 0 ? 1 : -1;
    if (n1 != 0 || n2 != 0) continue;
    ++count;
    const PathWord p = path_from_signed_ids(g, word);
    worst = std::max(worst, distance(holonomy_general(edges, p), identity(t2)));
    if (count % 500 == 1) {
      ++sampled;
      worst_direct = std::max(worst_direct, distance(holonomy_smooth(a, curve_of(g, p), 32), identity(t2)));
    }
  }
  const bool pass = witness_ok && unobstructed && worst <= 1e-8 && worst_direct <= 1e-8;
  return {pass, std::string("commutator ") + (witness_ok ? "Obstructed with witness" : "NOT obstructed") + "; " +
                    std::to_string(count) + " balanced words, max |H - 1| " + sci(worst) + " (" +
                    std::to_string(sampled) + " by direct curve transport: " + sci(worst_direct) + "); single petal " +
                    (unobstructed ? "Unobstructed" : "Obstructed")};
}

// ---------- 8 ----------

Result criterion8() {
  const Graph g = flower_graph(2);
  const auto p = GroupDescriptor::product({GroupDescriptor::torus(1), GroupDescriptor::special_unitary(2)});
  const auto w = [&](std::vector<std::int64_t> ids) { return path_from_signed_ids(g, ids); };
  const std::vector<PathWord> fam{w({1}), w({2}), w({1, 2, -1, -2}), w({1, 2})};
  constexpr int kBound = 5;
  const auto cd = closure_descriptor_for(p);
  int mismatches = 0, members = 0, cases = 0;
  for (int i = 0; i < 40; ++i) {
    Rng rng(mix_seed(8, i));
    const auto h = GeneralizedConnection::haar_random(g, p, rng);
    std::vector<GroupElement> vals;
    for (const auto& f : fam) vals.push_back(holonomy_general(h, f));
    // Break the torus block, the SU(2) block, both or neither.
    if (i % 4 == 1 || i % 4 == 3) vals[2] = mul(vals[2], embed_block(p, 0, haar_sample(GroupDescriptor::torus(1), rng)));
    if (i % 4 == 2 || i % 4 == 3) {
      vals[3] = mul(vals[3], embed_block(p, 1, haar_sample(GroupDescriptor::special_unitary(2), rng)));
    }
    const auto r = family_closure_membership(g, fam, vals, cd, kBound);
    bool conj = true;
    std::vector<bool> separate;
    for (std::size_t f = 0; f < 2; ++f) {
      std::vector<GroupElement> block;
      for (const auto& v : vals) block.push_back(extract_block(v, f));
      const auto& fd = p.factors()[f];
      separate.push_back(family_closure_membership(g, fam, block, closure_descriptor_for(fd), kBound).member);
      conj = conj && separate.back();
    }
    const bool expected_member = i % 4 == 0;
    if (r.member != conj || r.block_verdicts != separate || r.member != expected_member) ++mismatches;
    members += r.member;
    ++cases;
  }

  // Pushforwards of member pairs through p_K, including related paths.
  const auto q = u2_quotient();
  const auto qcd = closure_descriptor_for(q);
  int rejected = 0, pushed = 0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(mix_seed(81, i));
    const auto h = GeneralizedConnection::haar_random(g, q.base(), rng);
    const auto hq = pushforward_hom(q, h);
    std::vector<GroupElement> vals;
    for (const auto& f : fam) vals.push_back(holonomy_general(hq, f));
    if (!family_closure_membership(g, fam, vals, qcd, kBound).member) ++rejected;
    const Graph k = k4();
    const auto hk = pushforward_hom(q, GeneralizedConnection::haar_random(k, q.base(), rng));
    if (!closure_membership(k, hk, qcd, make_theta_data(k)).member) ++rejected;
    pushed += 2;
  }
  return {mismatches == 0 && rejected == 0,
          std::to_string(cases) + " product cases (" + std::to_string(members) + " members), " +
              std::to_string(mismatches) + " conjunction mismatches; " + std::to_string(pushed) +
              " pushforwards, " + std::to_string(rejected) + " rejected; relation bound " + std::to_string(kBound)};
}

// ---------- 9 ----------

Result criterion9() {
  double worst = 0.0;
  int found = 0;
  for (int c = 0; c < 50; ++c) {
    const auto d = c < 25 ? GroupDescriptor::special_unitary(2) : GroupDescriptor::special_unitary(3);
    Rng rng(mix_seed(9, c));
    const int gens = 2 + c % 2;
    std::vector<GroupElement> h, hp;
    const auto a = haar_sample(d, rng);
    for (int k = 0; k < gens; ++k) {
      h.push_back(haar_sample(d, rng));
      hp.push_back(conjugate(h.back(), a));
    }
    const auto v = separation_test(h, hp, 3, c);
    if (const auto* cf = std::get_if<ConjugatorFound>(&v)) {
      ++found;
      double res = 0.0;
      for (int k = 0; k < gens; ++k) res = std::max(res, distance(conjugate(h[k], cf->conjugator), hp[k]));
      worst = std::max({worst, res, cf->residual});
    } else {
      worst = std::max(worst, 1.0);
    }
  }

  const auto su2 = GroupDescriptor::special_unitary(2);
  Matrix qi(2, 2), qj(2, 2);
  qi << Complex(0, 1), 0, 0, Complex(0, -1);
  qj << 0, 1, -1, 0;
  const Matrix qk = qi * qj;
  const std::vector<GroupElement> h{GroupElement(su2, qi), GroupElement(su2, qj)};
  const std::vector<GroupElement> hp{GroupElement(su2, qj), GroupElement(su2, qk)};
  const auto v = separation_test(h, hp, 4);
  const auto* cf = std::get_if<ConjugatorFound>(&v);
  // Brute force over a grid on SU(2).
  double best = 1e9;
  const int n = 48;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      for (int c = 0; c < 2 * n; ++c) {
        const double eta = (std::numbers::pi / 2) * a / n;
        const Matrix u = su2_from(std::cos(eta) * std::polar(1.0, std::numbers::pi * b / n),
                                  std::sin(eta) * std::polar(1.0, std::numbers::pi * c / n));
        best = std::min(best, (u.adjoint() * qi * u - qj).norm() + (u.adjoint() * qj * u - qk).norm());
      }
    }
  }
  const bool brute_conjugate = best < 0.1;
  const bool quat_ok = cf && cf->residual <= 1e-10 && brute_conjugate;
  return {found == 50 && worst <= 1e-10 && quat_ok,
          std::to_string(found) + "/50 planted conjugators, max residual " + sci(worst) + "; quaternion pair " +
              (cf ? "conjugator found (residual " + sci(cf->residual) + ")" : std::string("not resolved")) +
              ", brute-force grid residual " + sci(best)};
}

// ---------- 10 ----------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Result criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("hlab_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  io::write_text_file((dir / "flower.json").string(), io::dump(io::to_json(flower_graph(3))));
  io::write_text_file((dir / "family.json").string(), R"({"graph":"flower.json","paths":[[1],[2],[3]]})");
  io::write_text_file((dir / "k4.json").string(), io::dump(io::to_json(k4())));
  io::write_text_file((dir / "f.json").string(),
                      R"({"paths":[[1,2],[5]],"expr":{"mul":[{"entry":[1,1,2]},{"conj":{"entry":[2,2,1]}}]}})");
  const std::string cli = HLAB_CLI_PATH;
  const std::string d = dir.string();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"approx", "approx --group su3 --family " + d + "/family.json --seed 5"},
      {"haar-mean", "haar-mean --graph " + d + "/k4.json --group su2 --function " + d + "/f.json --seed 5 --samples 50000"},
      {"obstruction", "obstruction --graph " + d + "/k4.json --loops commutator --seed 5"},
      {"closure", "closure --graph " + d + "/k4.json --group u2-quotient --seed 5"},
      {"theta", "theta --graph " + d + "/k4.json --group su2 --seed 5"},
  };
  int identical = 0, total = 0;
  std::string failures;
  for (const auto& [name, args] : commands) {
    std::vector<std::string> outs;
    for (const char* threads : {"1", "3", "1"}) {
      const std::string out = d + "/run_" + name + "_" + std::to_string(outs.size());
      const std::string cmd = "HOLONOMY_LAB_THREADS=" + std::string(threads) + " " + cli + " " + args + " --out " + out +
                              " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        failures += " " + name + "(exit)";
        break;
      }
      outs.push_back(slurp(out + "/" + name + ".json") + slurp(out + "/" + name + "_summary.csv"));
    }
    ++total;
    if (outs.size() == 3 && outs[0] == outs[1] && outs[1] == outs[2] && !outs[0].empty()) {
      ++identical;
    } else {
      failures += " " + name;
    }
  }
  fs::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " commands byte-identical over 3 runs (1 and 3 threads)" +
                                  (failures.empty() ? "" : "; differing:" + failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"groupoid confluence and laws", criterion1},
      {"holonomy functoriality and retracing", criterion2},
      {"gauge covariance", criterion3},
      {"Haar mean value map", criterion4},
      {"theta roundtrip", criterion5},
      {"semisimple approximation", criterion6},
      {"abelian obstruction", criterion7},
      {"closure membership at graph level", criterion8},
      {"trace separation", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !r.pass;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", secs);
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << r.detail
              << " [" << timing << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
