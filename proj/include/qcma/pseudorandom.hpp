#pragma once

// Classical-oracle-driven stand-ins for Haar randomness: the diagonal/Hadamard
// layered ensemble, Gaussian-amplitude state preparation with a flag qubit,
// moment statistics for comparing state ensembles, and the affine-unitary
// family checker.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "qcma/pure_state.hpp"
#include "qcma/rng.hpp"

namespace qcma {

/// A(i, x): a lazily evaluated random function of (layer, basis index) fixed
/// by the seed. `word` exposes the full 64-bit hash; `value` is its top n bits.
class ClassicalOracle {
 public:
  ClassicalOracle(RngSeed seed, int n);
  /// Every A(i, x) equals `value` (mod 2^n).
  static std::shared_ptr<ClassicalOracle> constant(int n, std::uint64_t value = 0);

  ClassicalOracle(const ClassicalOracle&) = delete;
  ClassicalOracle& operator=(const ClassicalOracle&) = delete;

  int n() const { return n_; }
  RngSeed seed() const { return seed_; }

  /// One evaluation each.
  std::uint64_t word(std::uint64_t layer, std::uint64_t x) const;
  std::uint64_t value(std::uint64_t layer, std::uint64_t x) const;

  /// All N values of layer i. Populated on first use (N evaluations), read
  /// from the cache afterwards; safe to call concurrently.
  const std::vector<std::uint32_t>& layer(std::uint64_t i) const;

  std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }

 private:
  std::uint64_t raw(std::uint64_t layer, std::uint64_t x) const;

  RngSeed seed_;
  int n_;
  std::optional<std::uint64_t> constant_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::uint64_t, std::unique_ptr<const std::vector<std::uint32_t>>> cache_;
};

struct SigmaKSpec {
  int n = 1;
  int k = 0;
  std::shared_ptr<const ClassicalOracle> oracle;
};

/// D_k H ... D_1 H applied to `state`, with D_i = diag(omega^A(i, x)) and
/// omega = exp(2 pi i / 2^n). Layers are indexed from 1.
PureState apply_sigma_k(const PureState& state, const SigmaKSpec& spec);

enum class EnsembleKind { kHaar, kSigmaK };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::kHaar;
  int n = 1;
  int k = 0;
};

/// Output state U|0^n> of sample `index` from the ensemble (a fresh oracle
/// per sample for the layered ensemble).
PureState ensemble_sample(const EnsembleSpec& spec, RngSeed seed, std::uint64_t index);

/// sum_x |<x|psi>|^4.
double collision_of(const PureState& psi);

struct CollisionEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

inline double haar_collision(double dim) { return 2.0 / (dim + 1.0); }

/// Averages collision_of over `samples` ensemble draws (samples >= 1000).
CollisionEstimate collision_probability(const EnsembleSpec& spec, std::size_t samples, RngSeed seed,
                                        int threads = 0);

/// q(n) = (n + p(n))^2.
inline int precision_bits(int n, int p_value) { return (n + p_value) * (n + p_value); }

struct RandomStateAttempt {
  bool flagged = false;
  /// Exact probability of reading 1 on the flag, (1/N) sum_x |alpha_x|^2.
  double flag_probability = 0.0;
  std::optional<PureState> state;
};

/// One attempt: alpha_x complex Gaussian with variance 1/q drawn from oracle
/// words of layers 2a and 2a+1, rounded to multiples of 2^-q and clamped to
/// the unit disc; the flag is measured with `rng`.
RandomStateAttempt random_state_attempt(int n, int q, const ClassicalOracle& oracle,
                                        std::uint64_t attempt, CounterRng& rng);

struct RandomStateResult {
  std::optional<PureState> state;
  int attempts = 0;
  bool success() const { return state.has_value(); }
};

/// Repeats attempts until the flag reads 1 or `max_attempts` is exhausted.
RandomStateResult prepare_random_state(int n, int p_value, const ClassicalOracle& oracle, RngSeed seed,
                                       int max_attempts);

struct StatisticCheck {
  std::string name;
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct SmoothingReport {
  std::vector<StatisticCheck> checks;
  bool all_pass() const;
  const StatisticCheck& find(const std::string& name) const;
};

/// Compares two ensembles by per-basis mean and variance of |<x|psi>|^2 and by
/// the mean collision statistic. Each comparison passes when the difference
/// is within a 3-sigma family-wise z band plus the largest shift any
/// statistic can suffer when every state moves inside its epsilon-ball
/// (|<phi|psi>| >= 1 - epsilon, i.e. trace distance sqrt(2 eps - eps^2)).
SmoothingReport smoothing_distance_proxy(const std::vector<PureState>& a, const std::vector<PureState>& b,
                                         double epsilon);

struct AffineViolation {
  enum class Kind { kSelf, kPair } kind = Kind::kPair;
  std::size_t i = 0;
  std::size_t j = 0;
  double residual = 0.0;
};

struct AffineReport {
  std::size_t dim = 0;
  std::size_t nonzero_count = 0;
  std::vector<AffineViolation> violations;
  bool self_relations_hold = true;
  bool pair_relations_hold = true;
  /// nonzero_count <= 2N; must hold whenever the pair relations do.
  bool size_bound_holds = true;
  /// U(X) depends on at most nonzero_count bits, so it takes at most
  /// 2^nonzero_count values; this is log2 of that count (<= 2N when bounded).
  double log2_distinct_values = 0.0;
};

inline constexpr double kAffineTolerance = 1e-9;

/// Checks E_i E_i^dagger = -E_i - E_i^dagger and E_i E_j^dagger + E_j E_i^dagger = 0.
AffineReport check_affine_family(const std::vector<ComplexMatrix>& family);

/// I + sum_i bits_i E_i.
ComplexMatrix affine_unitary(const std::vector<ComplexMatrix>& family, const std::vector<bool>& bits);

/// diag(-2, 0), diag(0, -2).
std::vector<ComplexMatrix> diagonal_example_family();
/// X, Y, Z, iI.
std::vector<ComplexMatrix> pauli_family();
/// 2N members: (-1 + i) e_j e_j^T and (-1 - i) e_j e_j^T for each j. Satisfies
/// both relations and attains the 2N bound.
std::vector<ComplexMatrix> phase_diagonal_family(std::size_t dim);

/// Haar-random unitary: QR of a complex Gaussian matrix with R's diagonal
/// phases folded into Q.
ComplexMatrix haar_unitary(std::size_t dim, CounterRng& rng);

/// V - I for a Haar-random V: satisfies the self relation, so adding it to a
/// family probes only the pair relation.
ComplexMatrix random_self_consistent_member(std::size_t dim, CounterRng& rng);

}  // namespace qcma
