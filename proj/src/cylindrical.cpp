#include "hlab/cylindrical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/SVD>

#include "hlab/parallel.hpp"

namespace hlab {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Expr Expr::constant(Complex c) { return Expr(std::make_shared<const Node>(Const{c})); }
Expr Expr::entry(int path, int row, int col) {
  if (path < 1 || row < 1 || col < 1) throw ExpressionError("entry indices are 1-based");
  return Expr(std::make_shared<const Node>(Entry{path, row, col}));
}
Expr Expr::trace(int path) {
  if (path < 1) throw ExpressionError("trace index is 1-based");
  return Expr(std::make_shared<const Node>(Trace{path}));
}
Expr Expr::conj(Expr e) { return Expr(std::make_shared<const Node>(Conj{std::move(e)})); }
Expr Expr::add(std::vector<Expr> args) { return Expr(std::make_shared<const Node>(Add{std::move(args)})); }
Expr Expr::mul(std::vector<Expr> args) { return Expr(std::make_shared<const Node>(Mul{std::move(args)})); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }

namespace {

const Matrix& holonomy_at(std::span<const Matrix> hs, int path) {
  if (path < 1 || static_cast<std::size_t>(path) > hs.size()) {
    throw ExpressionError("path index " + std::to_string(path) + " out of range 1.." + std::to_string(hs.size()));
  }
  return hs[path - 1];
}

}  // namespace

Complex Expr::evaluate(std::span<const Matrix> hs) const {
  return std::visit(
      overloaded{
          [](const Const& c) { return c.value; },
          [&](const Entry& e) {
            const Matrix& m = holonomy_at(hs, e.path);
            if (e.row > m.rows() || e.col > m.cols()) {
              throw ExpressionError("entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                    ") out of range for " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + " holonomy");
            }
            return m(e.row - 1, e.col - 1);
          },
          [&](const Trace& t) { return holonomy_at(hs, t.path).trace(); },
          [&](const Conj& c) { return std::conj(c.arg.evaluate(hs)); },
          [&](const Add& a) {
            Complex s = 0;
            for (const auto& x : a.args) s += x.evaluate(hs);
            return s;
          },
          [&](const Mul& m) {
            Complex p = 1;
            for (const auto& x : m.args) p *= x.evaluate(hs);
            return p;
          },
      },
      *node_);
}

int Expr::max_path() const {
  return std::visit(overloaded{
                        [](const Const&) { return 0; },
                        [](const Entry& e) { return e.path; },
                        [](const Trace& t) { return t.path; },
                        [](const Conj& c) { return c.arg.max_path(); },
                        [](const Add& a) {
                          int m = 0;
                          for (const auto& x : a.args) m = std::max(m, x.max_path());
                          return m;
                        },
                        [](const Mul& a) {
                          int m = 0;
                          for (const auto& x : a.args) m = std::max(m, x.max_path());
                          return m;
                        },
                    },
                    *node_);
}

double Expr::sup_bound(int n) const {
  return std::visit(overloaded{
                        [](const Const& c) { return std::abs(c.value); },
                        [](const Entry&) { return 1.0; },
                        [n](const Trace&) { return static_cast<double>(n); },
                        [n](const Conj& c) { return c.arg.sup_bound(n); },
                        [n](const Add& a) {
                          double s = 0;
                          for (const auto& x : a.args) s += x.sup_bound(n);
                          return s;
                        },
                        [n](const Mul& a) {
                          double p = 1;
                          for (const auto& x : a.args) p *= x.sup_bound(n);
                          return p;
                        },
                    },
                    *node_);
}

namespace {

std::vector<Matrix> holonomies_of(const CylFunction& f, const GeneralizedConnection& h) {
  if (f.expr.max_path() > static_cast<int>(f.paths.size())) {
    throw ExpressionError("expression references path " + std::to_string(f.expr.max_path()) + " but only " +
                          std::to_string(f.paths.size()) + " paths are given");
  }
  std::vector<Matrix> out;
  out.reserve(f.paths.size());
  for (const auto& p : f.paths) out.push_back(holonomy_general(h, p).matrix());
  return out;
}

}  // namespace

Complex eval(const CylFunction& f, const GeneralizedConnection& h) {
  const auto hs = holonomies_of(f, h);
  return f.expr.evaluate(hs);
}

Complex eval_representative(const RepresentativeFunction& phi, const GeneralizedConnection& h) {
  return eval(as_cylindrical(phi), h);
}

Complex eval_wilson(const WilsonFunction& t, const GeneralizedConnection& h) {
  if (!t.loop.is_loop()) throw ExpressionError("Wilson function needs a loop");
  return trace_normalized(holonomy_general(h, t.loop));
}

CylFunction as_cylindrical(const RepresentativeFunction& phi) {
  return CylFunction{{phi.path}, Expr::entry(1, phi.row, phi.col)};
}

CylFunction as_cylindrical(const WilsonFunction& t, int n) {
  return CylFunction{{t.loop}, Expr::mul({Expr::constant(1.0 / n), Expr::trace(1)})};
}

HaarMean::HaarMean(CylFunction f, GroupDescriptor d, HaarMeanOptions options)
    : f_(std::move(f)), d_(std::move(d)), options_(options) {
  if (options_.samples < 2) throw std::invalid_argument("haar_mean needs at least two samples");
  std::map<VertexId, std::size_t> slot;
  for (const auto& p : f_.paths) {
    for (VertexId v : {p.range(), p.source()}) {
      if (slot.emplace(v, endpoints_.size()).second) endpoints_.push_back(v);
    }
    range_slot_.push_back(slot.at(p.range()));
    source_slot_.push_back(slot.at(p.source()));
  }
}

MeanValue HaarMean::operator()(const GeneralizedConnection& h) const {
  if (!(h.descriptor() == d_)) throw DescriptorMismatch("haar_mean: connection group differs");
  const auto hs = holonomies_of(f_, h);
  return on_holonomies(hs);
}

MeanValue HaarMean::on_holonomies(std::span<const Matrix> holonomies) const {
  if (holonomies.size() != f_.paths.size()) throw ExpressionError("haar_mean: wrong number of holonomies");
  std::vector<GroupElement> base;
  base.reserve(holonomies.size());
  for (const Matrix& m : holonomies) base.emplace_back(d_, m, GroupElement::Unchecked{});

  struct Partial {
    Complex sum;
    double sum_sq = 0.0;
    Partial operator+(const Partial& o) const { return {sum + o.sum, sum_sq + o.sum_sq}; }
  };
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (options_.samples + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks);
  const bool quotient = d_.kind() == GroupKind::Quotient;

  parallel_for(chunks, worker_count(options_.threads), [&](std::size_t c) {
    Rng rng(mix_seed(options_.seed, c));
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(options_.samples, begin + kChunk);
    std::vector<GroupElement> a;
    std::vector<Matrix> moved(base.size());
    Partial acc;
    for (std::uint64_t s = begin; s < end; ++s) {
      a.clear();
      for (std::size_t k = 0; k < endpoints_.size(); ++k) a.push_back(haar_sample(d_, rng));
      for (std::size_t k = 0; k < base.size(); ++k) {
        moved[k] = a[range_slot_[k]].matrix() * base[k].matrix() * a[source_slot_[k]].matrix().adjoint();
        if (quotient) moved[k] = quotient_project(d_, GroupElement(d_.base(), moved[k], GroupElement::Unchecked{})).matrix();
      }
      const Complex v = f_.expr.evaluate(moved);
      acc.sum += v;
      acc.sum_sq += std::norm(v);
    }
    partials[c] = acc;
  });

  const Partial total = pairwise_sum(partials, 0, partials.size());
  const double n = static_cast<double>(options_.samples);
  const Complex mean = total.sum / n;
  const double var = std::max(0.0, (total.sum_sq - n * std::norm(mean)) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

HaarMean haar_mean(const CylFunction& f, const GroupDescriptor& d, HaarMeanOptions options) {
  return HaarMean(f, d, options);
}

double invariance_check(const std::function<Complex(const GeneralizedConnection&)>& f, const Graph& graph,
                        const GeneralizedConnection& h, int trials, std::uint64_t seed) {
  Rng rng(seed);
  const Complex reference = f(h);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteGauge g = random_discrete_gauge(graph, h.descriptor(), rng);
    worst = std::max(worst, std::abs(f(gauge_act_general(graph, h, g)) - reference));
  }
  return worst;
}

std::vector<std::vector<std::int64_t>> reduced_generator_words(int generators, int max_length) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> word;
  auto extend = [&](const auto& self) -> void {
    if (!word.empty()) out.push_back(word);
    if (static_cast<int>(word.size()) == max_length) return;
    for (int g = 1; g <= generators; ++g) {
      for (int sign : {1, -1}) {
        const std::int64_t letter = sign * g;
        if (!word.empty() && word.back() == -letter) continue;
        word.push_back(letter);
        self(self);
        word.pop_back();
      }
    }
  };
  extend(extend);
  return out;
}

namespace {

Matrix word_value(std::span<const GroupElement> gens, const std::vector<std::int64_t>& word) {
  const int n = gens.front().matrix().rows();
  Matrix acc = Matrix::Identity(n, n);
  for (std::int64_t letter : word) {
    const Matrix& u = gens[std::abs(letter) - 1].matrix();
    acc = letter > 0 ? Matrix(u * acc) : Matrix(u.adjoint() * acc);
  }
  return acc;
}

}  // namespace

SeparationVerdict separation_test(std::span<const GroupElement> first, std::span<const GroupElement> second,
                                  int max_length, std::uint64_t seed) {
  if (first.size() != second.size() || first.empty()) {
    throw std::invalid_argument("separation_test needs two equally sized, non-empty generator lists");
  }
  const int n = first.front().matrix().rows();
  const auto words = reduced_generator_words(static_cast<int>(first.size()), max_length);
  for (const auto& w : words) {
    const Complex t1 = word_value(first, w).trace() / static_cast<double>(n);
    const Complex t2 = word_value(second, w).trace() / static_cast<double>(n);
    if (std::abs(t1 - t2) > 1e-8) return TraceWitness{w, t1, t2};
  }

  // Intertwiners X with H_i X = X H'_i span the kernel of the stacked map.
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Matrix system(static_cast<Eigen::Index>(first.size()) * nn, nn);
  const Matrix eye = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < first.size(); ++i) {
    const Matrix& h = first[i].matrix();
    const Matrix& hp = second[i].matrix();
    Matrix block(nn, nn);
    // vec(H X) = (I kron H) vec X, vec(X H') = (H'^T kron I) vec X, column-major vec.
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        block.block(a * n, b * n, n, n) = (a == b ? h : Matrix::Zero(n, n)) - hp(b, a) * eye;
      }
    }
    system.block(static_cast<Eigen::Index>(i) * nn, 0, nn, nn) = block;
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double scale = std::max(1.0, sigma(0));
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) <= 1e-9 * scale) kernel.push_back(k);
  }
  if (kernel.empty()) return Inconclusive{sigma(sigma.size() - 1)};

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd combo = Eigen::VectorXcd::Zero(nn);
  for (Eigen::Index k : kernel) combo += Complex(normal(rng), normal(rng)) * svd.matrixV().col(k);
  Matrix x(n, n);
  for (int col = 0; col < n; ++col) x.col(col) = combo.segment(static_cast<Eigen::Index>(col) * n, n);
  Eigen::JacobiSVD<Matrix> polar(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix a = polar.matrixU() * polar.matrixV().adjoint();

  const GroupDescriptor& d = first.front().descriptor();
  GroupDescriptor out_desc = d;
  if (d.kind() == GroupKind::SpecialUnitary) {
    a *= std::polar(1.0, -std::arg(a.determinant()) / n);
  } else if (!is_member(d, a, 1e-9)) {
    out_desc = GroupDescriptor::unitary(n);
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    residual = std::max(residual, (a.adjoint() * first[i].matrix() * a - second[i].matrix()).norm());
  }
  if (residual > 1e-8) return Inconclusive{residual};
  return ConjugatorFound{GroupElement(out_desc, std::move(a), GroupElement::Unchecked{}), residual};
}

SeparationVerdict separation_test(const GeneralizedConnection& h, const GeneralizedConnection& h_prime,
                                  std::span<const PathWord> generators, int max_length, std::uint64_t seed) {
  std::vector<GroupElement> a;
  std::vector<GroupElement> b;
  for (const auto& gen : generators) {
    if (!gen.is_loop()) throw std::invalid_argument("separation_test generators must be loops");
    a.push_back(holonomy_general(h, gen));
    b.push_back(holonomy_general(h_prime, gen));
  }
  return separation_test(a, b, max_length, seed);
}

}  // namespace hlab
