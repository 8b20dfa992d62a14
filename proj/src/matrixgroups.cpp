#include "hlab/matrixgroups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace hlab {

struct GroupDescriptor::Node {
  GroupKind kind;
  int n = 0;
  int dim = 0;
  std::vector<GroupDescriptor> factors;
  std::vector<GroupDescriptor> base;  // zero or one entry
  std::vector<Matrix> central;
};

namespace {

constexpr double kCosetTol = 1e-9;
constexpr double kReunitarizeAt = 1e-11;

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

bool is_block_scalar(const Matrix& b, double tol) {
  const Complex c = b(0, 0);
  return (b - c * Matrix::Identity(b.rows(), b.cols())).norm() <= tol;
}

bool is_diagonal(const Matrix& m, double tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && std::abs(m(i, j)) > tol) return false;
    }
  }
  return true;
}

// True if `m` lies in the centre of the (validated) base group d.
bool is_central(const GroupDescriptor& d, const Matrix& m, double tol) {
  switch (d.kind()) {
    case GroupKind::Unitary:
    case GroupKind::SpecialUnitary:
      return is_block_scalar(m, tol);
    case GroupKind::Torus:
      return is_diagonal(m, tol);
    case GroupKind::Product: {
      const auto offsets = d.block_offsets();
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        const int k = d.factors()[i].dim();
        if (!is_central(d.factors()[i], m.block(offsets[i], offsets[i], k, k), tol)) return false;
      }
      return true;
    }
    case GroupKind::Quotient:
      return false;
  }
  return false;
}

// Lexicographic "a < b" on row-major entries, real then imaginary.
bool lex_less(const Matrix& a, const Matrix& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double dr = a(i, j).real() - b(i, j).real();
      if (std::abs(dr) > kCosetTol) return dr < 0;
      const double di = a(i, j).imag() - b(i, j).imag();
      if (std::abs(di) > kCosetTol) return di < 0;
    }
  }
  return false;
}

void require_same(const GroupDescriptor& a, const GroupDescriptor& b, const char* op) {
  if (!(a == b)) {
    throw DescriptorMismatch(std::string(op) + ": descriptor mismatch (" + a.name() + " vs " + b.name() + ")");
  }
}

Matrix canonical_coset(const GroupDescriptor& q, const Matrix& m) {
  Matrix best = m;
  bool first = true;
  for (const Matrix& k : q.central()) {
    Matrix cand = m * k;
    if (first || lex_less(cand, best)) {
      best = std::move(cand);
      first = false;
    }
  }
  return best;
}

Matrix exp_anti_hermitian(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (is_diagonal(x, 0.0)) {
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out(i, i) = std::exp(x(i, i));
    return out;
  }
  Matrix h = Complex(0, -1) * x;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Matrix& v = es.eigenvectors();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return v * phases.asDiagonal() * v.adjoint();
}

Matrix exp_in(const GroupDescriptor& d, const Matrix& x) {
  if (d.kind() == GroupKind::Product) {
    Matrix out = Matrix::Zero(d.dim(), d.dim());
    const auto offsets = d.block_offsets();
    for (std::size_t i = 0; i < d.factors().size(); ++i) {
      const int k = d.factors()[i].dim();
      out.block(offsets[i], offsets[i], k, k) = exp_in(d.factors()[i], x.block(offsets[i], offsets[i], k, k));
    }
    return out;
  }
  if (d.kind() == GroupKind::Quotient) return exp_in(d.base(), x);
  return exp_anti_hermitian(x);
}

Matrix log_in(const GroupDescriptor& d, const Matrix& g, LogBranch branch) {
  if (d.kind() == GroupKind::Product) {
    Matrix out = Matrix::Zero(d.dim(), d.dim());
    const auto offsets = d.block_offsets();
    for (std::size_t i = 0; i < d.factors().size(); ++i) {
      const int k = d.factors()[i].dim();
      out.block(offsets[i], offsets[i], k, k) = log_in(d.factors()[i], g.block(offsets[i], offsets[i], k, k), branch);
    }
    return out;
  }
  if (d.kind() == GroupKind::Quotient) return log_in(d.base(), g, branch);

  const Eigen::Index n = g.rows();
  Matrix u;
  Eigen::VectorXcd eig(n);
  if (is_diagonal(g, 0.0)) {
    u = Matrix::Identity(n, n);
    eig = g.diagonal();
  } else {
    // Unitary matrices are normal, so the Schur form is diagonal.
    Eigen::ComplexSchur<Matrix> schur(g);
    u = schur.matrixU();
    eig = schur.matrixT().diagonal();
  }
  std::vector<double> theta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (branch == LogBranch::Principal && std::abs(eig(i) + 1.0) < 1e-9) {
      throw LogBranchError("log_map: eigenvalue at -1 on the principal branch; retarget or use a closed branch");
    }
    theta[i] = std::arg(eig(i));
    if (branch == LogBranch::ClosedUpper && theta[i] <= -std::numbers::pi + 1e-12) theta[i] = std::numbers::pi;
  }
  if (d.kind() == GroupKind::SpecialUnitary) {
    // Move whole turns between eigenvalues so the logarithm is traceless.
    double sum = 0;
    for (double t : theta) sum += t;
    long turns = std::lround(sum / (2 * std::numbers::pi));
    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return theta[a] > theta[b]; });
    for (long t = 0; t < std::abs(turns); ++t) {
      if (turns > 0) {
        theta[order[t]] -= 2 * std::numbers::pi;
      } else {
        theta[order[n - 1 - t]] += 2 * std::numbers::pi;
      }
    }
  }
  Eigen::VectorXcd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = Complex(0, theta[i]);
  Matrix x = u * diag.asDiagonal() * u.adjoint();
  x = 0.5 * (x - x.adjoint()).eval();
  if (d.kind() == GroupKind::SpecialUnitary) {
    x -= (x.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
  }
  if (d.kind() == GroupKind::Torus) {
    Matrix diag_only = Matrix::Zero(n, n);
    diag_only.diagonal() = x.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) diag_only(i, i) = Complex(0, diag_only(i, i).imag());
    x = diag_only;
  }
  return x;
}

Matrix haar_in(const GroupDescriptor& d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = d.dim();
  switch (d.kind()) {
    case GroupKind::Unitary:
    case GroupKind::SpecialUnitary: {
      Matrix z(n, n);
      const double s = 1.0 / std::sqrt(2.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double re = normal(rng);
          const double im = normal(rng);
          z(i, j) = Complex(re * s, im * s);
        }
      }
      Eigen::HouseholderQR<Matrix> qr(z);
      Matrix q = qr.householderQ() * Matrix::Identity(n, n);
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        const Complex phase = a > 0 ? r(j, j) / a : Complex(1, 0);
        q.col(j) *= phase;
      }
      if (d.kind() == GroupKind::SpecialUnitary) {
        const Complex det = q.determinant();
        q *= std::polar(1.0, -std::arg(det) / n);
      }
      return q;
    }
    case GroupKind::Torus: {
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      Matrix out = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) out(i, i) = std::polar(1.0, angle(rng));
      return out;
    }
    case GroupKind::Product: {
      Matrix out = Matrix::Zero(n, n);
      const auto offsets = d.block_offsets();
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        const int k = d.factors()[i].dim();
        out.block(offsets[i], offsets[i], k, k) = haar_in(d.factors()[i], rng);
      }
      return out;
    }
    case GroupKind::Quotient:
      return canonical_coset(d, haar_in(d.base(), rng));
  }
  return Matrix::Identity(n, n);
}

void check_algebra(const GroupDescriptor& d, const Matrix& x, double tol) {
  if (x.rows() != d.dim() || x.cols() != d.dim()) {
    throw MembershipError("Lie algebra element has wrong shape for " + d.name());
  }
  if ((x + x.adjoint()).norm() > tol) throw MembershipError("Lie algebra element is not anti-hermitian");
  switch (d.kind()) {
    case GroupKind::Unitary:
      return;
    case GroupKind::SpecialUnitary:
      if (std::abs(x.trace()) > tol) throw MembershipError("su(n) element is not traceless");
      return;
    case GroupKind::Torus:
      if (!is_diagonal(x, tol)) throw MembershipError("torus algebra element is not diagonal");
      return;
    case GroupKind::Product: {
      const auto offsets = d.block_offsets();
      Matrix rest = x;
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        const int k = d.factors()[i].dim();
        check_algebra(d.factors()[i], x.block(offsets[i], offsets[i], k, k), tol);
        rest.block(offsets[i], offsets[i], k, k).setZero();
      }
      if (rest.norm() > tol) throw MembershipError("product algebra element is not block diagonal");
      return;
    }
    case GroupKind::Quotient:
      check_algebra(d.base(), x, tol);
      return;
  }
}

}  // namespace

GroupDescriptor GroupDescriptor::unitary(int n) {
  if (n < 1) throw std::invalid_argument("U(n) needs n >= 1");
  return GroupDescriptor(std::make_shared<const Node>(Node{GroupKind::Unitary, n, n, {}, {}, {}}));
}

GroupDescriptor GroupDescriptor::special_unitary(int n) {
  if (n < 1) throw std::invalid_argument("SU(n) needs n >= 1");
  return GroupDescriptor(std::make_shared<const Node>(Node{GroupKind::SpecialUnitary, n, n, {}, {}, {}}));
}

GroupDescriptor GroupDescriptor::torus(int n) {
  if (n < 1) throw std::invalid_argument("T^n needs n >= 1");
  return GroupDescriptor(std::make_shared<const Node>(Node{GroupKind::Torus, n, n, {}, {}, {}}));
}

GroupDescriptor GroupDescriptor::product(std::vector<GroupDescriptor> factors) {
  if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
  int dim = 0;
  for (const auto& f : factors) {
    if (f.kind() == GroupKind::Quotient) throw std::invalid_argument("product factors cannot be quotients");
    dim += f.dim();
  }
  return GroupDescriptor(
      std::make_shared<const Node>(Node{GroupKind::Product, 0, dim, std::move(factors), {}, {}}));
}

GroupDescriptor GroupDescriptor::quotient(GroupDescriptor base, std::vector<Matrix> central) {
  if (base.kind() == GroupKind::Quotient) throw std::invalid_argument("quotient of a quotient is not supported");
  const int dim = base.dim();
  const Matrix eye = Matrix::Identity(dim, dim);
  bool has_identity = false;
  for (const Matrix& k : central) {
    if (k.rows() != dim || k.cols() != dim) throw std::invalid_argument("K element has wrong shape");
    check_membership(base, k);
    if (!is_central(base, k, 1e-10)) throw std::invalid_argument("K element is not central in " + base.name());
    if ((k - eye).norm() <= 1e-10) has_identity = true;
  }
  if (!has_identity) throw std::invalid_argument("K must contain the identity");
  auto contains = [&](const Matrix& m) {
    return std::any_of(central.begin(), central.end(), [&](const Matrix& k) { return (k - m).norm() <= 1e-9; });
  };
  for (const Matrix& a : central) {
    for (const Matrix& b : central) {
      if (!contains(a * b)) throw std::invalid_argument("K is not closed under multiplication");
    }
  }
  return GroupDescriptor(std::make_shared<const Node>(
      Node{GroupKind::Quotient, 0, dim, {}, {std::move(base)}, std::move(central)}));
}

GroupKind GroupDescriptor::kind() const { return node_->kind; }
int GroupDescriptor::dim() const { return node_->dim; }
int GroupDescriptor::n() const { return node_->n; }
const std::vector<GroupDescriptor>& GroupDescriptor::factors() const { return node_->factors; }
const GroupDescriptor& GroupDescriptor::base() const {
  if (node_->base.empty()) throw std::logic_error("descriptor has no base group");
  return node_->base.front();
}
const std::vector<Matrix>& GroupDescriptor::central() const { return node_->central; }

std::vector<int> GroupDescriptor::block_offsets() const {
  std::vector<int> out;
  int offset = 0;
  for (const auto& f : node_->factors) {
    out.push_back(offset);
    offset += f.dim();
  }
  return out;
}

std::string GroupDescriptor::name() const {
  switch (kind()) {
    case GroupKind::Unitary:
      return "U(" + std::to_string(n()) + ")";
    case GroupKind::SpecialUnitary:
      return "SU(" + std::to_string(n()) + ")";
    case GroupKind::Torus:
      return "T^" + std::to_string(n());
    case GroupKind::Product: {
      std::string s;
      for (const auto& f : factors()) s += (s.empty() ? "" : "x") + f.name();
      return "(" + s + ")";
    }
    case GroupKind::Quotient:
      return base().name() + "/K" + std::to_string(central().size());
  }
  return "?";
}

bool GroupDescriptor::operator==(const GroupDescriptor& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.n != b.n || a.dim != b.dim) return false;
  if (a.factors != b.factors || a.base != b.base) return false;
  if (a.central.size() != b.central.size()) return false;
  for (std::size_t i = 0; i < a.central.size(); ++i) {
    if ((a.central[i] - b.central[i]).norm() > 1e-12) return false;
  }
  return true;
}

double unitarity_defect(const Matrix& m) {
  return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

void check_membership(const GroupDescriptor& d, const Matrix& m, double tol) {
  if (m.rows() != d.dim() || m.cols() != d.dim()) {
    std::ostringstream msg;
    msg << "matrix is " << m.rows() << "x" << m.cols() << ", expected " << d.dim() << "x" << d.dim() << " for "
        << d.name();
    throw MembershipError(msg.str());
  }
  const double defect = unitarity_defect(m);
  if (defect > tol) throw MembershipError("matrix is not unitary (defect " + std::to_string(defect) + ")");
  switch (d.kind()) {
    case GroupKind::Unitary:
      return;
    case GroupKind::SpecialUnitary:
      if (std::abs(m.determinant() - 1.0) > tol * 10) throw MembershipError("SU(n) element has det != 1");
      return;
    case GroupKind::Torus:
      if (!is_diagonal(m, tol)) throw MembershipError("torus element is not diagonal");
      return;
    case GroupKind::Product: {
      const auto offsets = d.block_offsets();
      Matrix rest = m;
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        const int k = d.factors()[i].dim();
        check_membership(d.factors()[i], m.block(offsets[i], offsets[i], k, k), tol);
        rest.block(offsets[i], offsets[i], k, k).setZero();
      }
      if (rest.norm() > tol) throw MembershipError("product element is not block diagonal");
      return;
    }
    case GroupKind::Quotient:
      check_membership(d.base(), m, tol);
      return;
  }
}

bool is_member(const GroupDescriptor& d, const Matrix& m, double tol) {
  try {
    check_membership(d, m, tol);
    return true;
  } catch (const MembershipError&) {
    return false;
  }
}

GroupElement::GroupElement(GroupDescriptor d, Matrix m) : d_(std::move(d)), m_(std::move(m)) {
  check_membership(d_, m_);
  if (d_.kind() == GroupKind::Quotient) m_ = canonical_coset(d_, m_);
}

LieAlgebraElement::LieAlgebraElement(GroupDescriptor d, Matrix x) : d_(std::move(d)), x_(std::move(x)) {
  check_algebra(d_, x_, 1e-10);
}

GroupElement identity(const GroupDescriptor& d) {
  Matrix eye = Matrix::Identity(d.dim(), d.dim());
  if (d.kind() == GroupKind::Quotient) eye = canonical_coset(d, eye);
  return GroupElement(d, std::move(eye), GroupElement::Unchecked{});
}

namespace {

GroupElement finish(const GroupDescriptor& d, Matrix m) {
  if (unitarity_defect(m) > kReunitarizeAt) {
    return reunitarize(GroupElement(d, std::move(m), GroupElement::Unchecked{}));
  }
  if (d.kind() == GroupKind::Quotient) m = canonical_coset(d, m);
  return GroupElement(d, std::move(m), GroupElement::Unchecked{});
}

}  // namespace

GroupElement mul(const GroupElement& a, const GroupElement& b) {
  require_same(a.descriptor(), b.descriptor(), "mul");
  return finish(a.descriptor(), a.matrix() * b.matrix());
}

GroupElement inv(const GroupElement& a) {
  return finish(a.descriptor(), a.matrix().adjoint());
}

GroupElement conjugate(const GroupElement& h, const GroupElement& a) {
  require_same(h.descriptor(), a.descriptor(), "conjugate");
  return finish(h.descriptor(), a.matrix().adjoint() * h.matrix() * a.matrix());
}

Complex trace_normalized(const GroupElement& h) {
  return h.matrix().trace() / static_cast<double>(h.matrix().rows());
}

GroupElement reunitarize(const GroupElement& g) {
  const GroupDescriptor& d = g.descriptor();
  Matrix m;
  if (d.kind() == GroupKind::Product) {
    m = Matrix::Zero(d.dim(), d.dim());
    const auto offsets = d.block_offsets();
    for (std::size_t i = 0; i < d.factors().size(); ++i) {
      const int k = d.factors()[i].dim();
      GroupElement block(d.factors()[i], g.matrix().block(offsets[i], offsets[i], k, k), GroupElement::Unchecked{});
      m.block(offsets[i], offsets[i], k, k) = reunitarize(block).matrix();
    }
    return GroupElement(d, std::move(m), GroupElement::Unchecked{});
  }
  if (d.kind() == GroupKind::Quotient) {
    m = reunitarize(GroupElement(d.base(), g.matrix(), GroupElement::Unchecked{})).matrix();
    return GroupElement(d, canonical_coset(d, m), GroupElement::Unchecked{});
  }
  if (d.kind() == GroupKind::Torus) {
    m = Matrix::Zero(d.dim(), d.dim());
    for (int i = 0; i < d.dim(); ++i) {
      const double a = std::abs(g.matrix()(i, i));
      m(i, i) = a > 0 ? g.matrix()(i, i) / a : Complex(1, 0);
    }
    return GroupElement(d, std::move(m), GroupElement::Unchecked{});
  }
  m = polar_unitary(g.matrix());
  if (d.kind() == GroupKind::SpecialUnitary) {
    m *= std::polar(1.0, -std::arg(m.determinant()) / d.dim());
  }
  return GroupElement(d, std::move(m), GroupElement::Unchecked{});
}

double distance(const GroupElement& a, const GroupElement& b) {
  require_same(a.descriptor(), b.descriptor(), "distance");
  if (a.descriptor().kind() != GroupKind::Quotient) return (a.matrix() - b.matrix()).norm();
  double best = std::numeric_limits<double>::infinity();
  for (const Matrix& k : a.descriptor().central()) best = std::min(best, (a.matrix() - b.matrix() * k).norm());
  return best;
}

GroupElement exp_map(const LieAlgebraElement& x) {
  const GroupDescriptor& d = x.descriptor();
  Matrix m = exp_in(d, x.matrix());
  if (d.kind() == GroupKind::Quotient) m = canonical_coset(d, m);
  return GroupElement(d, std::move(m), GroupElement::Unchecked{});
}

LieAlgebraElement log_map(const GroupElement& g, LogBranch branch) {
  return LieAlgebraElement(g.descriptor(), log_in(g.descriptor(), g.matrix(), branch));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GroupElement haar_sample(const GroupDescriptor& d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_sample(d, rng);
}

GroupElement haar_sample(const GroupDescriptor& d, Rng& rng) {
  return GroupElement(d, haar_in(d, rng), GroupElement::Unchecked{});
}

LieAlgebraElement random_lie_element(const GroupDescriptor& d, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = d.dim();
  Matrix z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  }
  Matrix x = 0.5 * (z - z.adjoint());
  // Project onto the subalgebra.
  auto project = [](const auto& self, const GroupDescriptor& g, const Matrix& in) -> Matrix {
    const int k = g.dim();
    switch (g.kind()) {
      case GroupKind::Unitary:
        return in;
      case GroupKind::SpecialUnitary:
        return in - (in.trace() / static_cast<double>(k)) * Matrix::Identity(k, k);
      case GroupKind::Torus: {
        Matrix out = Matrix::Zero(k, k);
        for (int i = 0; i < k; ++i) out(i, i) = Complex(0, in(i, i).imag());
        return out;
      }
      case GroupKind::Product: {
        Matrix out = Matrix::Zero(k, k);
        const auto offsets = g.block_offsets();
        for (std::size_t i = 0; i < g.factors().size(); ++i) {
          const int b = g.factors()[i].dim();
          out.block(offsets[i], offsets[i], b, b) =
              self(self, g.factors()[i], in.block(offsets[i], offsets[i], b, b));
        }
        return out;
      }
      case GroupKind::Quotient:
        return self(self, g.base(), in);
    }
    return in;
  };
  x = project(project, d, x);
  const double norm = x.norm();
  if (norm > 0) x *= scale / norm;
  return LieAlgebraElement(d, std::move(x));
}

namespace detail {
Matrix expm_unchecked(const GroupDescriptor& d, const Matrix& x) { return exp_in(d, x); }
}  // namespace detail

GroupElement quotient_project(const GroupDescriptor& quotient, const Matrix& base_matrix) {
  if (quotient.kind() != GroupKind::Quotient) throw DescriptorMismatch("quotient_project needs a quotient descriptor");
  check_membership(quotient.base(), base_matrix);
  return GroupElement(quotient, canonical_coset(quotient, base_matrix), GroupElement::Unchecked{});
}

GroupElement quotient_project(const GroupDescriptor& quotient, const GroupElement& base_element) {
  if (quotient.kind() != GroupKind::Quotient) throw DescriptorMismatch("quotient_project needs a quotient descriptor");
  require_same(quotient.base(), base_element.descriptor(), "quotient_project");
  return GroupElement(quotient, canonical_coset(quotient, base_element.matrix()), GroupElement::Unchecked{});
}

GroupElement extract_block(const GroupElement& g, std::size_t index) {
  const GroupDescriptor& d = g.descriptor();
  if (d.kind() != GroupKind::Product) throw DescriptorMismatch("extract_block needs a product descriptor");
  const int off = d.block_offsets().at(index);
  const int k = d.factors().at(index).dim();
  return GroupElement(d.factors()[index], g.matrix().block(off, off, k, k), GroupElement::Unchecked{});
}

GroupElement embed_block(const GroupDescriptor& product, std::size_t index, const GroupElement& g) {
  if (product.kind() != GroupKind::Product) throw DescriptorMismatch("embed_block needs a product descriptor");
  require_same(product.factors().at(index), g.descriptor(), "embed_block");
  Matrix m = Matrix::Identity(product.dim(), product.dim());
  const int off = product.block_offsets()[index];
  const int k = g.descriptor().dim();
  m.block(off, off, k, k) = g.matrix();
  return GroupElement(product, std::move(m), GroupElement::Unchecked{});
}

LieAlgebraElement extract_block(const LieAlgebraElement& x, std::size_t index) {
  const GroupDescriptor& d = x.descriptor();
  if (d.kind() != GroupKind::Product) throw DescriptorMismatch("extract_block needs a product descriptor");
  const int off = d.block_offsets().at(index);
  const int k = d.factors().at(index).dim();
  return LieAlgebraElement(d.factors()[index], x.matrix().block(off, off, k, k));
}

LieAlgebraElement embed_block(const GroupDescriptor& product, std::size_t index, const LieAlgebraElement& x) {
  if (product.kind() != GroupKind::Product) throw DescriptorMismatch("embed_block needs a product descriptor");
  require_same(product.factors().at(index), x.descriptor(), "embed_block");
  Matrix m = Matrix::Zero(product.dim(), product.dim());
  const int off = product.block_offsets()[index];
  const int k = x.descriptor().dim();
  m.block(off, off, k, k) = x.matrix();
  return LieAlgebraElement(product, std::move(m));
}

}  // namespace hlab
