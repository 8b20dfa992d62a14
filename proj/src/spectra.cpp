#include "hlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace hlab {

ThetaData make_theta_data(const Graph& g) {
  ThetaData t;
  t.tree = spanning_tree(g);
  std::set<EdgeId> tree_edges;
  for (const auto& [v, p] : t.tree) {
    for (const Letter& l : p.letters()) tree_edges.insert(l.edge);
  }
  for (const Edge& e : g.edges()) {
    if (tree_edges.count(e.id)) continue;
    const Letter one[] = {{e.id, 1}};
    const PathWord edge_path = reduce(g, one);
    const PathWord loop = compose(g, inverse(t.tree.at(e.dst)), compose(g, edge_path, t.tree.at(e.src)));
    t.generators.push_back(loop);
    t.generator_edges.push_back(e.id);
  }
  return t;
}

ThetaImage theta(const GeneralizedConnection& h, const ThetaData& t) {
  ThetaImage out;
  for (const auto& gen : t.generators) out.loops.push_back(holonomy_general(h, gen));
  for (const auto& [v, path] : t.tree) out.frame.emplace(v, holonomy_general(h, path));
  return out;
}

namespace {

std::optional<std::size_t> generator_index(const ThetaData& t, EdgeId e) {
  auto it = std::find(t.generator_edges.begin(), t.generator_edges.end(), e);
  if (it == t.generator_edges.end()) return std::nullopt;
  return static_cast<std::size_t>(it - t.generator_edges.begin());
}

}  // namespace

GeneralizedConnection theta_inverse(const Graph& g, const GroupDescriptor& d, const ThetaImage& image,
                                    const ThetaData& t) {
  if (image.loops.size() != t.generators.size()) throw std::invalid_argument("theta_inverse: one value per generator");
  const GroupElement& at_base = image.frame.at(g.basepoint());
  if (distance(at_base, identity(d)) > 1e-10) {
    throw std::invalid_argument("theta_inverse: frame must be the identity at the basepoint");
  }
  std::map<EdgeId, GroupElement> values;
  for (const Edge& e : g.edges()) {
    const GroupElement& to = image.frame.at(e.dst);
    const GroupElement from_inv = inv(image.frame.at(e.src));
    if (auto j = generator_index(t, e.id)) {
      values.emplace(e.id, mul(mul(to, image.loops[*j]), from_inv));
    } else {
      values.emplace(e.id, mul(to, from_inv));
    }
  }
  return GeneralizedConnection(d, std::move(values));
}

ThetaImage gauge_act_theta(const ThetaImage& image, const DiscreteGauge& g, VertexId basepoint) {
  const GroupElement& at_base = g.values.at(basepoint);
  ThetaImage out;
  for (const auto& h : image.loops) out.loops.push_back(conjugate(h, at_base));
  for (const auto& [v, f] : image.frame) out.frame.emplace(v, mul(mul(inv(g.values.at(v)), f), at_base));
  return out;
}

std::vector<std::int64_t> loop_in_generators(const Graph& g, const ThetaData& t, const PathWord& loop) {
  if (!loop.is_loop() || loop.source() != g.basepoint()) {
    throw std::invalid_argument("loop_in_generators needs a loop at the basepoint");
  }
  std::vector<std::int64_t> word;
  for (const Letter& l : loop.letters()) {
    if (auto j = generator_index(t, l.edge)) {
      const std::int64_t letter = static_cast<std::int64_t>(*j + 1) * l.orient;
      if (!word.empty() && word.back() == -letter) {
        word.pop_back();
      } else {
        word.push_back(letter);
      }
    }
  }
  return word;
}

namespace {

constexpr double kSignificant = 1e-6;

Matrix normal_form_block(std::vector<Matrix>& block) {
  // Returns the conjugator; rewrites `block` in place.
  const Eigen::Index n = block.front().rows();
  Matrix eye = Matrix::Identity(n, n);
  auto is_scalar = [&](const Matrix& m) { return (m - m(0, 0) * eye).norm() <= 1e-9; };

  std::optional<std::size_t> pivot;
  std::vector<double> pivot_phases;
  Matrix u;
  for (int pass = 0; pass < 2 && !pivot; ++pass) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (is_scalar(block[i])) continue;
      Eigen::ComplexSchur<Matrix> schur(block[i]);
      Eigen::VectorXcd ev = schur.matrixT().diagonal();
      std::vector<Eigen::Index> order(n);
      for (Eigen::Index k = 0; k < n; ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::arg(ev(a)) < std::arg(ev(b)); });
      double gap = std::numeric_limits<double>::infinity();
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) gap = std::min(gap, std::abs(ev(a) - ev(b)));
      }
      // First pass insists on a simple spectrum; the second takes any
      // non-scalar generator.
      if (pass == 0 && gap <= 1e-6) continue;
      u = Matrix(n, n);
      for (Eigen::Index k = 0; k < n; ++k) u.col(k) = schur.matrixU().col(order[k]);
      pivot = i;
      break;
    }
  }
  if (!pivot) return eye;
  for (auto& m : block) m = (u.adjoint() * m * u).eval();

  std::vector<Complex> phase(n, Complex(1, 0));
  std::vector<bool> fixed(n, false);
  fixed[0] = true;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const Matrix& m : block) {
      for (Eigen::Index r = 0; r < n && !progress; ++r) {
        for (Eigen::Index c = 0; c < n && !progress; ++c) {
          if (r == c || std::abs(m(r, c)) <= kSignificant) continue;
          const Complex unit = m(r, c) / std::abs(m(r, c));
          // Entry (r, c) becomes conj(d_r) m_rc d_c.
          if (fixed[r] && !fixed[c]) {
            phase[c] = phase[r] * std::conj(unit);
            fixed[c] = true;
            progress = true;
          } else if (fixed[c] && !fixed[r]) {
            phase[r] = unit * phase[c];
            fixed[r] = true;
            progress = true;
          }
        }
      }
      if (progress) break;
    }
  }
  Eigen::VectorXcd dvec(n);
  for (Eigen::Index k = 0; k < n; ++k) dvec(k) = phase[k];
  const Matrix dm = dvec.asDiagonal();
  for (auto& m : block) m = (dm.adjoint() * m * dm).eval();
  return u * dm;
}

void normal_form_in(const GroupDescriptor& d, std::vector<Matrix>& mats) {
  switch (d.kind()) {
    case GroupKind::Torus:
      return;
    case GroupKind::Unitary:
    case GroupKind::SpecialUnitary:
      normal_form_block(mats);
      return;
    case GroupKind::Product: {
      const auto offsets = d.block_offsets();
      for (std::size_t f = 0; f < d.factors().size(); ++f) {
        const int k = d.factors()[f].dim();
        std::vector<Matrix> blocks;
        for (const auto& m : mats) blocks.push_back(m.block(offsets[f], offsets[f], k, k));
        normal_form_in(d.factors()[f], blocks);
        for (std::size_t i = 0; i < mats.size(); ++i) mats[i].block(offsets[f], offsets[f], k, k) = blocks[i];
      }
      return;
    }
    case GroupKind::Quotient:
      normal_form_in(d.base(), mats);
      return;
  }
}

}  // namespace

std::vector<GroupElement> ad_normal_form(std::span<const GroupElement> loops) {
  if (loops.empty()) return {};
  const GroupDescriptor& d = loops.front().descriptor();
  std::vector<Matrix> mats;
  for (const auto& g : loops) mats.push_back(g.matrix());
  normal_form_in(d, mats);
  std::vector<GroupElement> out;
  for (auto& m : mats) {
    GroupElement e(d, std::move(m), GroupElement::Unchecked{});
    if (d.kind() == GroupKind::Torus) {
      out.push_back(std::move(e));
      continue;
    }
    out.push_back(d.kind() == GroupKind::Quotient ? quotient_project(d, e.matrix()) : reunitarize(e));
  }
  return out;
}

std::vector<GroupElement> q_star(const GeneralizedConnection& h, const ThetaData& t) {
  return ad_normal_form(theta(h, t).loops);
}

ApproximationReport approximation_experiment(const Graph& g, const GroupDescriptor& d,
                                             std::span<const FamilyMember> family,
                                             std::span<const GroupElement> targets, double tolerance, int steps) {
  if (family.size() != targets.size()) throw std::invalid_argument("approximation_experiment: one target per path");
  std::vector<InterpolationTarget> wanted;
  for (std::size_t k = 0; k < family.size(); ++k) wanted.push_back({family[k].path, targets[k], family[k].private_edge});
  SmoothConnection a = interpolate_connection(g, d, wanted, steps);

  ApproximationReport report{{}, 0.0, 0.0, tolerance, false, a};
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Curve c = curve_of(g, family[k].path);
    const GroupElement h = holonomy_smooth(a, c, steps);
    const double err = distance(h, targets[k]);
    report.errors.push_back(err);
    report.max_error = std::max(report.max_error, err);

    // Same connection restricted to this path's own bump.
    const Letter private_letter[] = {{family[k].private_edge, 1}};
    const Curve private_curve = curve_of(g, private_letter);
    std::vector<ConnectionTerm> own;
    for (const auto& term : a.terms()) {
      if (bump_line_integral(term.bump, private_curve, steps) != 0.0) own.push_back(term);
    }
    const GroupElement h_own = holonomy_smooth(SmoothConnection(d, own), c, steps);
    report.cross_talk = std::max(report.cross_talk, distance(h, h_own));
  }
  report.success = report.max_error <= tolerance;
  return report;
}

std::vector<ObstructionEntry> abelian_obstruction_witness(const Graph& g, std::span<const PathWord> loops,
                                                          std::uint64_t seed) {
  const GroupDescriptor su2 = GroupDescriptor::special_unitary(2);
  const GroupDescriptor u1 = GroupDescriptor::torus(1);
  std::vector<ObstructionEntry> out;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const PathWord& loop = loops[i];
    if (!loop.is_loop()) throw std::invalid_argument("obstruction check needs loops");
    ObstructionEntry entry{loop, abelianize(loop), ObstructionVerdict::Unobstructed, std::nullopt};
    if (!loop.is_unit() && is_zero(entry.exponents)) {
      entry.verdict = ObstructionVerdict::Obstructed;
      // A free SU(2) assignment separates the loop from the unit.
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(mix_seed(seed, i * 1000 + attempt));
        GeneralizedConnection h = GeneralizedConnection::haar_random(g, su2, rng);
        GroupElement hol = holonomy_general(h, loop);
        if (distance(hol, identity(su2)) > 1e-3 || attempt == 63) {
          const PathWord fam[] = {loop};
          const GroupElement minus_one(u1, Matrix::Constant(1, 1, Complex(-1, 0)));
          const GroupElement vals[] = {minus_one};
          const ClosureReport r = family_closure_membership(g, fam, vals, {u1, ClosureMode::TorusAbelianized}, 1);
          entry.witness = ObstructionWitness{std::move(h), std::move(hol), minus_one, r.member};
          break;
        }
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

ClosureDescriptor closure_descriptor_for(const GroupDescriptor& d) {
  switch (d.kind()) {
    case GroupKind::SpecialUnitary:
      return {d, ClosureMode::SemisimpleFull};
    case GroupKind::Torus:
      return {d, ClosureMode::TorusAbelianized};
    case GroupKind::Unitary:
      if (d.n() == 1) return {d, ClosureMode::TorusAbelianized};
      throw std::invalid_argument("U(n) for n > 1 has no closure mode; present it as (T^1 x SU(n))/Z_n");
    case GroupKind::Product:
      for (const auto& f : d.factors()) closure_descriptor_for(f);
      return {d, ClosureMode::ProductSplit};
    case GroupKind::Quotient:
      closure_descriptor_for(d.base());
      return {d, ClosureMode::QuotientPushforward};
  }
  throw std::invalid_argument("unknown descriptor kind");
}

namespace {

bool is_abelian_kind(const GroupDescriptor& d) {
  return d.kind() == GroupKind::Torus || (d.kind() == GroupKind::Unitary && d.n() == 1);
}

// Each member owns an edge used exactly once in it and nowhere else, so no
// non-trivial reduced family word can reduce to a unit.
bool has_private_letters(std::span<const PathWord> family) {
  std::map<EdgeId, int> total;
  for (const auto& p : family) {
    for (const Letter& l : p.letters()) ++total[l.edge];
  }
  return std::all_of(family.begin(), family.end(), [&](const PathWord& p) {
    return std::any_of(p.letters().begin(), p.letters().end(), [&](const Letter& l) { return total[l.edge] == 1; });
  });
}

struct BlockResult {
  bool member = true;
  std::string certificate;
  std::optional<std::vector<FamilyFactor>> witness;
};

BlockResult check_semisimple(const Graph& g, std::span<const PathWord> family, const std::vector<Matrix>& values,
                             int bound) {
  if (has_private_letters(family)) return {true, "free family (private letters): no relations", std::nullopt};
  const Eigen::Index n = values.front().rows();
  std::vector<PathWord> inverses;
  for (const auto& p : family) inverses.push_back(inverse(p));

  BlockResult result{true, "groupoid relations checked up to length " + std::to_string(bound), std::nullopt};
  std::vector<FamilyFactor> word;  // traversal order
  auto dfs = [&](const auto& self, const PathWord& walked, const Matrix& value) -> bool {
    if (!word.empty() && walked.is_unit() && (value - Matrix::Identity(n, n)).norm() > 1e-9) {
      std::vector<FamilyFactor> composition(word.rbegin(), word.rend());
      result = {false, "relation violated", composition};
      return true;
    }
    if (static_cast<int>(word.size()) == bound) return false;
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (int o : {1, -1}) {
        if (!word.empty() && word.back().index == i && word.back().orient == -o) continue;
        const PathWord& f = o > 0 ? family[i] : inverses[i];
        if (!word.empty() && f.source() != walked.range()) continue;
        const Matrix step = o > 0 ? values[i] : values[i].adjoint();
        word.push_back({i, o});
        const bool stop = word.size() == 1 ? self(self, f, step) : self(self, compose(g, f, walked), step * value);
        word.pop_back();
        if (stop) return true;
      }
    }
    return false;
  };
  dfs(dfs, PathWord::unit(family.front().source()), Matrix::Identity(n, n));
  return result;
}

BlockResult check_torus(std::span<const PathWord> family, const std::vector<Matrix>& values, int bound) {
  std::vector<EdgeId> edges;
  std::vector<ExponentVector> vecs;
  for (const auto& p : family) {
    vecs.push_back(abelianize(p));
    for (const auto& kv : vecs.back()) edges.push_back(kv.first);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const Eigen::Index r = static_cast<Eigen::Index>(family.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges.size()), r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (const auto& [e, c] : vecs[k]) {
      a(std::lower_bound(edges.begin(), edges.end(), e) - edges.begin(), k) = static_cast<double>(c);
    }
  }
  if (edges.size() > 0 && Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() == r) {
    return {true, "abelianizations independent: no abelian relations", std::nullopt};
  }

  // Integer relations m with sum |m_k| <= bound, first nonzero entry positive.
  const Eigen::Index n = values.front().rows();
  std::vector<int> m(r, 0);
  BlockResult result{true, "abelian relations checked up to length " + std::to_string(bound), std::nullopt};
  auto check = [&]() -> bool {
    Eigen::VectorXd sum = a * Eigen::Map<Eigen::VectorXi>(m.data(), r).cast<double>();
    if (edges.size() > 0 && sum.cwiseAbs().maxCoeff() > 0.5) return false;
    Matrix value = Matrix::Identity(n, n);
    for (Eigen::Index k = 0; k < r; ++k) {
      for (int j = 0; j < std::abs(m[k]); ++j) value = (m[k] > 0 ? values[k] : values[k].adjoint()) * value;
    }
    if ((value - Matrix::Identity(n, n)).norm() <= 1e-9) return false;
    std::vector<FamilyFactor> word;
    for (Eigen::Index k = 0; k < r; ++k) {
      for (int j = 0; j < std::abs(m[k]); ++j) word.push_back({static_cast<std::size_t>(k), m[k] > 0 ? 1 : -1});
    }
    result = {false, "abelian relation violated within length " + std::to_string(bound), word};
    return true;
  };
  auto rec = [&](const auto& self, Eigen::Index k, int budget, bool leading) -> bool {
    if (k == r) return !leading && check();
    for (int v = leading ? 0 : -budget; v <= budget; ++v) {
      m[k] = v;
      if (self(self, k + 1, budget - std::abs(v), leading && v == 0)) return true;
    }
    m[k] = 0;
    return false;
  };
  rec(rec, 0, bound, true);
  return result;
}

BlockResult check_block(const Graph& g, const GroupDescriptor& d, std::span<const PathWord> family,
                        const std::vector<Matrix>& values, int bound) {
  if (is_abelian_kind(d)) return check_torus(family, values, bound);
  return check_semisimple(g, family, values, bound);
}

ClosureReport check_product_or_single(const Graph& g, const GroupDescriptor& d, std::span<const PathWord> family,
                                      const std::vector<Matrix>& values, int bound) {
  ClosureReport report;
  report.bound = bound;
  if (d.kind() != GroupKind::Product) {
    BlockResult r = check_block(g, d, family, values, bound);
    report.member = r.member;
    report.certificate = r.certificate;
    report.witness = r.witness;
    return report;
  }
  const auto offsets = d.block_offsets();
  for (std::size_t f = 0; f < d.factors().size(); ++f) {
    const int k = d.factors()[f].dim();
    std::vector<Matrix> blocks;
    for (const auto& v : values) blocks.push_back(v.block(offsets[f], offsets[f], k, k));
    BlockResult r = check_block(g, d.factors()[f], family, blocks, bound);
    report.block_verdicts.push_back(r.member);
    report.certificate += (report.certificate.empty() ? "" : "; ") + d.factors()[f].name() + ": " + r.certificate;
    if (!r.member && report.member) {
      report.member = false;
      report.witness = r.witness;
    }
  }
  return report;
}

}  // namespace

ClosureReport family_closure_membership(const Graph& g, std::span<const PathWord> family,
                                        std::span<const GroupElement> values, const ClosureDescriptor& cd,
                                        int bound) {
  if (family.size() != values.size()) throw std::invalid_argument("closure check: one value per family path");
  const ClosureDescriptor expected = closure_descriptor_for(cd.descriptor);
  if (expected.mode != cd.mode) throw std::invalid_argument("closure mode does not match " + cd.descriptor.name());
  for (const auto& v : values) {
    if (!(v.descriptor() == cd.descriptor)) throw DescriptorMismatch("closure check: value outside " + cd.descriptor.name());
  }
  if (family.empty()) return ClosureReport{true, bound, "empty family", std::nullopt, {}, {}};

  std::vector<Matrix> mats;
  for (const auto& v : values) mats.push_back(v.matrix());
  if (cd.mode != ClosureMode::QuotientPushforward) return check_product_or_single(g, cd.descriptor, family, mats, bound);

  // Exhaustive search over K-corrections, one per family member.
  const GroupDescriptor& base = cd.descriptor.base();
  const auto& central = cd.descriptor.central();
  std::vector<std::size_t> choice(family.size(), 0);
  ClosureReport last;
  std::size_t tried = 0;
  while (true) {
    std::vector<Matrix> lifted;
    for (std::size_t k = 0; k < family.size(); ++k) lifted.push_back(mats[k] * central[choice[k]]);
    ++tried;
    ClosureReport r = check_product_or_single(g, base, family, lifted, bound);
    if (r.member) {
      for (auto& m : lifted) r.lift.emplace_back(base, std::move(m), GroupElement::Unchecked{});
      r.certificate = "K-lift found after " + std::to_string(tried) + " candidates; " + r.certificate;
      return r;
    }
    if (tried == 1) last = r;
    std::size_t pos = 0;
    while (pos < choice.size() && ++choice[pos] == central.size()) choice[pos++] = 0;
    if (pos == choice.size()) break;
  }
  last.member = false;
  last.certificate = "no K-lift among " + std::to_string(tried) + " candidates is a member; " + last.certificate;
  return last;
}

ClosureReport closure_membership(const Graph& g, const GeneralizedConnection& h, const ClosureDescriptor& cd,
                                 const ThetaData& t, int bound) {
  if (!(h.descriptor() == cd.descriptor)) throw DescriptorMismatch("closure_membership: descriptor mismatch");
  if (cd.mode == ClosureMode::SemisimpleFull) {
    closure_descriptor_for(cd.descriptor);
    return ClosureReport{true, bound, "semisimple: graph-level holonomies are dense", std::nullopt, {}, {}};
  }
  const ThetaImage image = theta(h, t);
  return family_closure_membership(g, t.generators, image.loops, cd, bound);
}

}  // namespace hlab
