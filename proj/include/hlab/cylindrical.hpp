#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hlab/connections.hpp"

namespace hlab {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polynomial in holonomy entries and their conjugates. Indices are 1-based:
/// Entry(k, i, j) is H(lambda_k)_{ij}, Trace(k) is the unnormalized trace.
class Expr {
 public:
  struct Const;
  struct Entry;
  struct Trace;
  struct Conj;
  struct Add;
  struct Mul;
  struct Node;

  static Expr constant(Complex c);
  static Expr entry(int path, int row, int col);
  static Expr trace(int path);
  static Expr conj(Expr e);
  static Expr add(std::vector<Expr> args);
  static Expr mul(std::vector<Expr> args);

  const Node& node() const { return *node_; }

  /// Evaluates on holonomy matrices, one per path.
  Complex evaluate(std::span<const Matrix> holonomies) const;

  /// Largest path index referenced (0 for constants).
  int max_path() const;

  /// Upper bound on |value| given entries bounded by 1 and traces by n.
  double sup_bound(int n) const;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Const { Complex value; };
struct Expr::Entry { int path = 1; int row = 1; int col = 1; };
struct Expr::Trace { int path = 1; };
struct Expr::Conj { Expr arg; };
struct Expr::Add { std::vector<Expr> args; };
struct Expr::Mul { std::vector<Expr> args; };
struct Expr::Node : std::variant<Const, Entry, Trace, Conj, Add, Mul> {
  using variant::variant;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);

/// F(H) = f(H(lambda_1), ..., H(lambda_m)).
struct CylFunction {
  std::vector<PathWord> paths;
  Expr expr;
};

struct RepresentativeFunction {
  int row = 1;
  int col = 1;
  PathWord path;
};

struct WilsonFunction {
  PathWord loop;  // based at the basepoint
};

Complex eval(const CylFunction& f, const GeneralizedConnection& h);
Complex eval_representative(const RepresentativeFunction& phi, const GeneralizedConnection& h);
/// (1/n) Tr H(loop).
Complex eval_wilson(const WilsonFunction& t, const GeneralizedConnection& h);

CylFunction as_cylindrical(const RepresentativeFunction& phi);
CylFunction as_cylindrical(const WilsonFunction& t, int n);

struct MeanValue {
  Complex value;
  double std_error = 0.0;  // standard error of the Monte Carlo mean
};

struct HaarMeanOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: HOLONOMY_LAB_THREADS or hardware concurrency
};

/// <F>(H): Monte Carlo average over a in G^d (d distinct endpoints) of
/// f(a(r_1) H(l_1) a(s_1)^{-1}, ...). Itself cylindrical over the same paths.
class HaarMean {
 public:
  HaarMean(CylFunction f, GroupDescriptor d, HaarMeanOptions options);

  MeanValue operator()(const GeneralizedConnection& h) const;
  /// Same average on holonomy matrices supplied directly.
  MeanValue on_holonomies(std::span<const Matrix> holonomies) const;

  const CylFunction& function() const { return f_; }
  const std::vector<VertexId>& endpoints() const { return endpoints_; }

 private:
  CylFunction f_;
  GroupDescriptor d_;
  HaarMeanOptions options_;
  std::vector<VertexId> endpoints_;
  std::vector<std::size_t> range_slot_;
  std::vector<std::size_t> source_slot_;
};

HaarMean haar_mean(const CylFunction& f, const GroupDescriptor& d, HaarMeanOptions options);

/// max over `trials` Haar-random discrete gauges g of |F(H.g) - F(H)|.
double invariance_check(const std::function<Complex(const GeneralizedConnection&)>& f, const Graph& graph,
                        const GeneralizedConnection& h, int trials, std::uint64_t seed);

struct TraceWitness {
  std::vector<std::int64_t> word;  // generator word, signed 1-based indices
  Complex trace_first;
  Complex trace_second;
};

struct ConjugatorFound {
  GroupElement conjugator;  // a with a^{-1} H(gamma) a = H'(gamma) on every generator
  double residual = 0.0;
};

struct Inconclusive {
  double best_residual = 0.0;
};

using SeparationVerdict = std::variant<TraceWitness, ConjugatorFound, Inconclusive>;

/// Compares normalized traces on every reduced generator word of length <=
/// max_length; with no difference above 1e-8, solves for a simultaneous
/// unitary conjugator of the generator values.
SeparationVerdict separation_test(std::span<const GroupElement> first, std::span<const GroupElement> second,
                                  int max_length, std::uint64_t seed = 0);

SeparationVerdict separation_test(const GeneralizedConnection& h, const GeneralizedConnection& h_prime,
                                  std::span<const PathWord> generators, int max_length, std::uint64_t seed = 0);

/// Reduced words over n generators up to the given length, as signed
/// 1-based generator indices.
std::vector<std::vector<std::int64_t>> reduced_generator_words(int generators, int max_length);

}  // namespace hlab
