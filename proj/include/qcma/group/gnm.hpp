#pragma once

// Group non-membership with a classical witness: an explicit model group, a
// cube generating set with claimed images, a model element z outside the
// model subgroup Lambda, and the checks that tie them to the black box.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcma/group/explicit_group.hpp"
#include "qcma/group/group_oracle.hpp"
#include "qcma/group/homomorphism.hpp"
#include "qcma/rng.hpp"

namespace qcma::group {

struct GnmWitness {
  GroupDescriptor model;
  std::vector<Element> gammas;
  std::vector<Label> g_labels;
  Element z = 0;
  std::vector<Element> lambdas;

  /// {"catalog_id", "params", "k", "gammas", "g_labels" (hex), "z", "lambdas"}.
  std::string to_json() const;
  /// Throws ValidationError on malformed records.
  static GnmWitness from_json(const std::string& text);

  friend bool operator==(const GnmWitness&, const GnmWitness&) = default;
};

/// A black-box group with subgroup generators and a target, plus the hidden
/// truth used only to build witnesses and score runs.
struct GnmInstance {
  std::string name;
  std::shared_ptr<const ExplicitGroup> group;
  std::shared_ptr<GroupOracle> oracle;
  std::vector<Element> h_gens;
  Element x = 0;
  std::vector<Label> h_labels;
  Label x_label = 0;
  bool x_in_h = false;
};

/// Standard subgroup/target per family: Z_n: H = <p> for the smallest prime
/// p | n, x = 1 (in-H: x = p); D_n: H = rotations, x = s (in-H: x = r);
/// S_n: H = A_n, x = a transposition (in-H: a 3-cycle); Z_a x Z_b:
/// H = {0} x Z_b, x = (1, 0) (in-H: (0, 1)); Q_8: H = <i>, x = j (in-H: -1).
GnmInstance make_instance(const GroupDescriptor& descriptor, bool x_in_h, RngSeed seed, int label_bits = 0);

/// Z_n (2 <= n <= 64), D_n (n <= 16), S_3, S_4, S_5, Z_2 x Z_4, Q_8.
std::vector<GroupDescriptor> gnm_catalog();

/// Greedy small generating list of a subgroup given as a mask.
std::vector<Element> subgroup_generators(const ExplicitGroup& group, const ElementSet& subgroup);

/// Identity model, efficient generating set, true labels, z = x, Lambda = H.
GnmWitness honest_witness(const GnmInstance& instance, RngSeed seed);

enum class CheatStrategy {
  kClaimTarget,    // honest shape with z = x (needs z outside Lambda)
  kWrongTarget,    // z a random model element outside Lambda
  kRandomImages,   // g_i replaced by random labels of group elements
  kShuffledImages, // true images assigned to the wrong generators
  kNonInjective,   // a larger model mapped onto G; z in the kernel coset
  kRandomWitness,  // random model of the same order with random fields
};

inline constexpr int kCheatStrategyCount = 6;
std::string to_string(CheatStrategy s);

/// A cheating witness for an instance (used with x in H). kNonInjective
/// falls back to kWrongTarget for families without a double-size cover.
GnmWitness cheating_witness(const GnmInstance& instance, CheatStrategy strategy, RngSeed seed);

enum class GnmStep {
  kNone,
  kStructure,
  kGeneratingSet,       // (1)
  kMembership,          // (2)
  kHomomorphismTest,    // (3a) test
  kGeneratorImages,     // (3a) corrected images of the generators
  kTargetImages,        // (3b)
  kKernel,              // (3c)
  kProtocol,            // no plurality / ambiguous kernel
};

std::string to_string(GnmStep step);

struct GnmOptions {
  int hom_trials = kHomTestTrials;
  int repetition = kDefaultRepetition;
  KernelMode kernel_mode = KernelMode::kCosetSampling;
  /// 0 means default_kernel_samples.
  std::size_t kernel_samples = 0;
  bool record_transcript = false;
};

struct GnmReport {
  bool accepted = false;
  GnmStep failed_step = GnmStep::kNone;
  std::string reason;
  std::uint64_t queries = 0;
  std::uint64_t corrected_evaluations = 0;
  std::uint64_t kernel_charged_queries = 0;
  std::string transcript_csv;
};

/// Runs (1), (2), (3a), (3b), (3c) in order and accepts iff all pass. Uses
/// only the black-box interface.
GnmReport gnm_verify(const BlackBoxOracle& oracle, const std::vector<Label>& h_labels, Label x_label,
                     const GnmWitness& witness, const GnmOptions& options, CounterRng& rng);

/// Runs both kernel modes on the self-corrected map of `witness` (each with
/// its own stream) and compares the kernels. nullopt when the witness is
/// malformed or fails the homomorphism test; a ProtocolError in either mode
/// counts as disagreement.
std::optional<bool> kernel_modes_agree(const BlackBoxOracle& oracle, Label x_label, const GnmWitness& witness,
                                       RngSeed seed, int repetition = kDefaultRepetition);

/// C in queries <= C ceil(log2 |G|)^3 (with ceil(log2 |G|) >= 1). Measured
/// worst case over the catalog up to order 120 is about 8.2e3 (Z_2 against a
/// Z_4 cover); larger groups sit far below.
inline constexpr double kGnmQueryConstant = 12000.0;
double gnm_query_bound(std::uint32_t order);

}  // namespace qcma::group
