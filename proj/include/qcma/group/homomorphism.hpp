#pragma once

// Maps from an explicit model group into a black-box group: the raw map read
// off a generating set, the plurality self-corrected map, the pairwise
// homomorphism test and kernel detection by coset sampling.

#include <functional>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qcma/group/explicit_group.hpp"
#include "qcma/group/group_oracle.hpp"
#include "qcma/rng.hpp"

namespace qcma::group {

/// Raised when a protocol step cannot produce an answer (no plurality,
/// ambiguous kernel); verifiers turn it into a rejection.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(gamma) = g_1^e_1 ... g_k^e_k over the canonical decomposition of gamma.
/// Values are memoized; an unmemoized evaluation costs at most 2 (k - 1)
/// oracle calls.
class RawHom {
 public:
  RawHom(std::shared_ptr<const ExplicitGroup> model, std::vector<Element> gammas, std::vector<Label> g_labels,
         OracleOps& ops);

  Label operator()(Element gamma);
  /// Overwrites the memoized value of f(gamma) (models a corrupted table).
  void pin(Element gamma, Label value) { memo_[gamma] = value; }

  const ExplicitGroup& model() const { return *model_; }
  std::shared_ptr<const ExplicitGroup> model_ptr() const { return model_; }
  OracleOps& ops() const { return ops_; }
  std::size_t k() const { return labels_.size(); }
  std::uint64_t max_eval_cost() const { return k() > 0 ? 2 * (k() - 1) : 0; }

 private:
  std::shared_ptr<const ExplicitGroup> model_;
  CubeDecomposer decomposer_;
  std::vector<Label> labels_;
  OracleOps& ops_;
  std::unordered_map<Element, Label> memo_;
};

using LabelMap = std::function<Label(Element)>;

struct HomTestResult {
  bool accepted = true;
  int failures = 0;
  int trials = 0;
};

inline constexpr int kHomTestTrials = 24;

/// Checks f(xy) = f(x) f(y) on `trials` uniform pairs; accepts iff no failure.
HomTestResult homomorphism_test(const LabelMap& f, const ExplicitGroup& model, OracleOps& ops, int trials,
                                CounterRng& rng);

inline constexpr int kDefaultRepetition = 6;

/// Plurality of f(z) f(z^-1 gamma) over 8r uniform z.
class CorrectedHom {
 public:
  explicit CorrectedHom(RawHom& base, int repetition = kDefaultRepetition);

  /// Retries once with fresh samples when no value has a strict plurality,
  /// then throws ProtocolError.
  Label operator()(Element gamma, CounterRng& rng);

  RawHom& base() const { return base_; }
  int repetition() const { return r_; }
  std::uint64_t evaluations() const { return evaluations_; }
  /// Oracle calls of one evaluation when nothing is memoized.
  std::uint64_t max_eval_cost() const { return std::uint64_t(8 * r_) * (2 * base_.max_eval_cost() + 2); }

 private:
  RawHom& base_;
  int r_;
  std::uint64_t evaluations_ = 0;
};

enum class KernelMode { kCosetSampling, kExhaustive };

struct KernelReport {
  KernelMode mode = KernelMode::kCosetSampling;
  bool trivial = true;
  ElementSet kernel;
  /// Corrected evaluations charged to the query budget.
  std::uint64_t corrected_evaluations = 0;
  /// Oracle queries charged (coset sampling charges max_eval_cost per sample).
  std::uint64_t charged_queries = 0;
  std::size_t samples = 0;
  bool resampled = false;
};

/// max(16, ceil(log2 |model|)^2).
std::size_t default_kernel_samples(std::uint32_t order);

/// Coset sampling: simulates the superposition over the model with the
/// corrected map evaluated off-budget, measures the image register, then
/// tests every normal subgroup K' of the model with the projector averaging
/// right translations over K' (passes with certainty iff K' lies in the
/// kernel). The kernel is the unique maximal always-passing candidate;
/// ambiguity doubles the samples once, then raises ProtocolError.
/// Exhaustive: evaluates the corrected map on every element (on budget) and
/// reports the preimage of the identity's image; trivial iff injective.
KernelReport kernel_triviality(CorrectedHom& corrected, KernelMode mode, CounterRng& rng, std::size_t samples = 0);

}  // namespace qcma::group
