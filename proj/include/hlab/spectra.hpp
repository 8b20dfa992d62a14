#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlab/connections.hpp"

namespace hlab {

/// Spanning-tree presentation of the loop group at the basepoint: one free
/// generator e_dst^{-1} e e_src per non-tree edge.
struct ThetaData {
  std::map<VertexId, PathWord> tree;
  std::vector<PathWord> generators;
  std::vector<EdgeId> generator_edges;  // the non-tree edge behind each generator
};

ThetaData make_theta_data(const Graph& g);

/// Loop values on the generators and the frame x -> H(e_x).
struct ThetaImage {
  std::vector<GroupElement> loops;
  std::map<VertexId, GroupElement> frame;
};

ThetaImage theta(const GeneralizedConnection& h, const ThetaData& t);

/// Edge value frame(dst) h(l_e) frame(src)^{-1}. Requires frame(basepoint) = 1.
GeneralizedConnection theta_inverse(const Graph& g, const GroupDescriptor& d, const ThetaImage& image,
                                    const ThetaData& t);

/// The induced action (h, g').g = (Ad_{g(*)^{-1}} h, x -> g(x)^{-1} g'(x) g(*)).
ThetaImage gauge_act_theta(const ThetaImage& image, const DiscreteGauge& g, VertexId basepoint);

/// A loop at the basepoint as a word in the generators (signed, 1-based).
std::vector<std::int64_t> loop_in_generators(const Graph& g, const ThetaData& t, const PathWord& loop);

/// Simultaneous-conjugation normal form: the first generator with a simple
/// spectrum is diagonalized with ascending eigenvalue phases, and the
/// remaining diagonal freedom is spent making off-diagonal entries real
/// positive in scan order. Torus blocks are returned unchanged.
std::vector<GroupElement> ad_normal_form(std::span<const GroupElement> loops);

/// Q_*: AdG-orbit representative of the loop values of H.
std::vector<GroupElement> q_star(const GeneralizedConnection& h, const ThetaData& t);

struct FamilyMember {
  PathWord path;
  EdgeId private_edge = 0;
};

struct ApproximationReport {
  std::vector<double> errors;  // ||H_A(gamma_k) - g_k||_F
  double max_error = 0.0;
  double cross_talk = 0.0;  // worst change in H_A(gamma_k) from the other bumps
  double tolerance = 0.0;
  bool success = false;
  SmoothConnection connection;
};

ApproximationReport approximation_experiment(const Graph& g, const GroupDescriptor& d,
                                             std::span<const FamilyMember> family,
                                             std::span<const GroupElement> targets, double tolerance, int steps);

enum class ObstructionVerdict { Obstructed, Unobstructed };

struct ObstructionWitness {
  GeneralizedConnection nonabelian;  // SU(2) assignment with H(loop) != 1
  GroupElement loop_holonomy;
  GroupElement torus_value;          // loop -> e^{i pi} on the free presentation
  bool torus_value_in_closure = true;
};

struct ObstructionEntry {
  PathWord loop;
  ExponentVector exponents;
  ObstructionVerdict verdict = ObstructionVerdict::Unobstructed;
  std::optional<ObstructionWitness> witness;
};

/// Obstructed: a non-unit loop whose abelianization vanishes. Every smooth
/// torus connection has trivial holonomy on it, while the loop itself is a
/// nontrivial element of the loop group.
std::vector<ObstructionEntry> abelian_obstruction_witness(const Graph& g, std::span<const PathWord> loops,
                                                          std::uint64_t seed = 0);

enum class ClosureMode { SemisimpleFull, TorusAbelianized, ProductSplit, QuotientPushforward };

struct ClosureDescriptor {
  GroupDescriptor descriptor;
  ClosureMode mode;
};

/// Mode implied by the descriptor kind; throws for U(n) which has none.
ClosureDescriptor closure_descriptor_for(const GroupDescriptor& d);

struct ClosureReport {
  bool member = true;
  int bound = 0;
  std::string certificate;  // how membership was decided
  std::optional<std::vector<FamilyFactor>> witness;  // offending family word
  std::vector<bool> block_verdicts;                  // ProductSplit: per factor
  std::vector<GroupElement> lift;                    // QuotientPushforward: lifted values
};

/// Whether the assignment lambda_k -> values_k on a finite family lies in
/// the graph-level closure of smooth holonomies:
///  - semisimple: any assignment consistent with the groupoid relations
///    among the family words;
///  - torus: consistent with every abelian relation (zero net edge counts);
///  - product: conjunction over factors;
///  - quotient: some K-lift of the values is a product member.
/// Relations are enumerated up to `bound` family letters unless the family
/// is certified free.
ClosureReport family_closure_membership(const Graph& g, std::span<const PathWord> family,
                                        std::span<const GroupElement> values, const ClosureDescriptor& cd,
                                        int bound = 12);

/// Loop-level closure membership of H, using the generators of t as family.
ClosureReport closure_membership(const Graph& g, const GeneralizedConnection& h, const ClosureDescriptor& cd,
                                 const ThetaData& t, int bound = 12);

}  // namespace hlab
