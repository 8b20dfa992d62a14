#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class DescriptorMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MembershipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the principal logarithm when an eigenvalue sits on -1.
class LogBranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GroupKind { Unitary, SpecialUnitary, Torus, Product, Quotient };

/// A compact group realized as a closed subgroup of some U(dim). Tori are
/// diagonal, products are block diagonal, and quotients (T^n x S)/K carry
/// their finite central subgroup K as explicit matrices of the base.
class GroupDescriptor {
 public:
  static GroupDescriptor unitary(int n);
  static GroupDescriptor special_unitary(int n);
  static GroupDescriptor torus(int n);
  static GroupDescriptor product(std::vector<GroupDescriptor> factors);
  /// Validates that K is a finite subgroup of the centre of `base`.
  static GroupDescriptor quotient(GroupDescriptor base, std::vector<Matrix> central);

  GroupKind kind() const;
  int dim() const;
  // Rank parameter for Unitary/SpecialUnitary/Torus.
  int n() const;
  const std::vector<GroupDescriptor>& factors() const;
  // Offsets of each product factor inside the embedding.
  std::vector<int> block_offsets() const;
  const GroupDescriptor& base() const;
  const std::vector<Matrix>& central() const;

  std::string name() const;
  bool operator==(const GroupDescriptor& other) const;

 private:
  struct Node;
  explicit GroupDescriptor(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Unitary defect ||U^dagger U - I||_F.
double unitarity_defect(const Matrix& m);

/// Throws MembershipError describing the first violated constraint.
void check_membership(const GroupDescriptor& d, const Matrix& m, double tol = 1e-10);
bool is_member(const GroupDescriptor& d, const Matrix& m, double tol = 1e-10);

class GroupElement {
 public:
  /// Validated construction; quotient elements are replaced by their
  /// canonical coset representative.
  GroupElement(GroupDescriptor d, Matrix m);

  struct Unchecked {};
  GroupElement(GroupDescriptor d, Matrix m, Unchecked) : d_(std::move(d)), m_(std::move(m)) {}

  const GroupDescriptor& descriptor() const { return d_; }
  const Matrix& matrix() const { return m_; }

 private:
  GroupDescriptor d_;
  Matrix m_;
};

class LieAlgebraElement {
 public:
  LieAlgebraElement(GroupDescriptor d, Matrix x);

  const GroupDescriptor& descriptor() const { return d_; }
  const Matrix& matrix() const { return x_; }

 private:
  GroupDescriptor d_;
  Matrix x_;
};

GroupElement identity(const GroupDescriptor& d);
GroupElement mul(const GroupElement& a, const GroupElement& b);
GroupElement inv(const GroupElement& a);
/// a^{-1} h a.
GroupElement conjugate(const GroupElement& h, const GroupElement& a);
Complex trace_normalized(const GroupElement& h);

/// Polar projection back onto the group; idempotent on exact members.
GroupElement reunitarize(const GroupElement& g);

/// Frobenius distance; for quotients the minimum over K-translates.
double distance(const GroupElement& a, const GroupElement& b);

GroupElement exp_map(const LieAlgebraElement& x);

enum class LogBranch {
  Principal,   // eigenvalue angles in (-pi, pi); throws LogBranchError near -1
  ClosedUpper  // angles in (-pi, pi]; never throws
};
LieAlgebraElement log_map(const GroupElement& g, LogBranch branch = LogBranch::Principal);

using Rng = std::mt19937_64;

/// Derives independent stream seeds from a master seed (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

GroupElement haar_sample(const GroupDescriptor& d, std::uint64_t seed);
GroupElement haar_sample(const GroupDescriptor& d, Rng& rng);

/// Gaussian element of the Lie algebra scaled so that ||X||_F is about `scale`.
LieAlgebraElement random_lie_element(const GroupDescriptor& d, Rng& rng, double scale = 1.0);

/// Canonical representative of the coset gK: the lexicographically smallest
/// translate, row-major, real part before imaginary, 1e-9 comparison slack.
GroupElement quotient_project(const GroupDescriptor& quotient, const Matrix& base_matrix);
GroupElement quotient_project(const GroupDescriptor& quotient, const GroupElement& base_element);

/// Block `index` of a product element, as an element of that factor.
GroupElement extract_block(const GroupElement& g, std::size_t index);
/// Embeds a factor element into the product, identity elsewhere.
GroupElement embed_block(const GroupDescriptor& product, std::size_t index, const GroupElement& g);
LieAlgebraElement extract_block(const LieAlgebraElement& x, std::size_t index);
LieAlgebraElement embed_block(const GroupDescriptor& product, std::size_t index, const LieAlgebraElement& x);

namespace detail {
/// exp of an algebra matrix of `d` without validation or coset projection.
Matrix expm_unchecked(const GroupDescriptor& d, const Matrix& x);
}  // namespace detail

}  // namespace hlab
