#pragma once

// Query algorithms as explicit stage lists, the hybrid-argument transcript
// over them, cap-measure overlap expectations, and the success-vs-budget sweep
// for advice-assisted search.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qcma/marked_oracle.hpp"
#include "qcma/rng.hpp"

namespace qcma {

struct HadamardGate {
  int qubit = 0;
};
struct HadamardLayerGate {
  int first = 0;
  int count = -1;
};
/// One unit-modulus phase per joint basis state.
struct DiagonalGate {
  std::vector<Complex> phases;
};
/// Unitary on the whole joint space.
struct DenseGate {
  ComplexMatrix unitary;
};
/// I - 2|a><a|. An axis of query-register length acts on every workspace
/// branch; an axis of joint length acts on the whole space.
struct ReflectionGate {
  ComplexVector axis;
};

using Gate = std::variant<HadamardGate, HadamardLayerGate, DiagonalGate, DenseGate, ReflectionGate>;

struct GateProgram {
  std::vector<Gate> gates;
};

/// One application of the oracle to the low register qubits, optionally
/// controlled on a workspace qubit (joint qubit index).
struct QueryMarker {
  std::optional<int> control;
};

using Stage = std::variant<GateProgram, QueryMarker>;

struct AlgorithmSpec {
  int register_qubits = 1;
  int workspace_qubits = 0;
  std::vector<Stage> stages;
  /// Qubit whose value 1 means accept; acceptance probabilities are reported
  /// only when set.
  std::optional<int> accept_qubit;

  int total_qubits() const { return register_qubits + workspace_qubits; }
  /// Number of query markers.
  int T() const;
  /// Throws ValidationError on adjacent gate programs, bad gate dimensions,
  /// non-unitary dense gates or out-of-range qubits.
  void validate() const;
};

/// Applies one gate program to a joint state.
PureState apply_program(const GateProgram& program, const PureState& joint, int register_qubits);

/// Runs the algorithm from |0...0>, with the oracle consulted at every query
/// marker. `use_oracle[t]` false substitutes the identity at query t.
PureState run_algorithm(const AlgorithmSpec& alg, const RegisterOracle& oracle,
                        const std::vector<bool>& use_oracle);

struct HybridTranscript {
  std::vector<double> deltas;
  std::vector<double> bounds;
  double total_delta = 0.0;
  /// Acceptance probability when every query is U_psi / the identity.
  std::optional<double> accept_marked;
  std::optional<double> accept_identity;

  double max_violation() const;
  double sum_deltas() const;
  double mean_delta() const;
};

enum class HybridMode {
  /// Every Phi_t by its own full simulation.
  kFull,
  /// One control run; delta_t read off as ||(U - I) s_t|| at the query
  /// position, which equals the full-simulation value because the remaining
  /// stages are unitary.
  kIncremental,
};

HybridTranscript run_hybrid(const AlgorithmSpec& alg, const PureState& psi,
                            HybridMode mode = HybridMode::kFull);

/// <psi| rho |psi> for the reduced state rho of the low register of `joint`.
double register_overlap(const PureState& joint, const PureState& psi);

/// Hadamard layer then T rounds of (query, reflection about the uniform state).
AlgorithmSpec grover_algorithm(int n, int T);
/// Maps |0> to psi (up to phase) by a single reflection, then queries once.
AlgorithmSpec prepare_and_query(const PureState& psi);
/// Amplification from phi for `iterations` rounds, then the Hadamard test on
/// workspace qubit n. T = iterations + 1.
AlgorithmSpec verifier_algorithm(const PureState& phi, int iterations);

/// E|<psi|0>|^2 under the uniform measure on the cap of Haar mass p:
/// 1/N + h(p)^2 (1 - 1/N).
double expected_overlap(double p, double dim);

/// The same expectation for the p-uniform measure on the band of Haar mass p
/// whose upper tail mass is `offset` (offset = 0 is the cap). Used to
/// spot-check that the cap maximizes the expectation.
double band_expected_overlap(double p, double dim, double offset);

/// Calibrated constant for expected_overlap <= C (1 + ln(1/p)) / N.
inline constexpr double kOverlapBoundConstant = 2.0;

struct SweepConfig {
  std::vector<int> ns;
  std::vector<int> ms;
  /// Amplification-iteration caps; a negative entry means the full schedule.
  std::vector<int> budgets;
  int trials = 50;
  RngSeed seed{1};
  int threads = 0;
  /// Run the hybrid transcript of the capped verifier on every trial.
  bool with_hybrid = true;
};

struct SweepRow {
  int n = 0;
  int m = 0;
  /// Iteration cap actually applied; queries per run are at most T + 1.
  int T = 0;
  bool full_budget = false;
  int trials = 0;
  int successes = 0;
  double mean_success_probability = 0.0;
  std::uint64_t max_queries = 0;
  double mean_delta = 0.0;
  double max_delta_violation = 0.0;
  /// Runs where |accept_marked - accept_identity| >= 1/3 but total_delta < 1/3.
  int bias_violations = 0;

  double success_rate() const { return trials > 0 ? double(successes) / trials : 0.0; }
};

std::vector<SweepRow> lower_bound_sweep(const SweepConfig& config);

/// Smallest iteration cap at which qcma_verify's exact acceptance probability
/// on the honest witness for psi reaches `threshold`; -1 if the full
/// schedule never does.
int minimal_success_cap(const PureState& psi, int m, double threshold = 0.5);

struct ScalingFit {
  std::vector<int> ns;
  std::vector<double> t_star;
  /// Least-squares slope of log2 T* against n/2.
  double exponent = 0.0;
  double intercept = 0.0;
};

/// T*(n) is the mean over `trials` Haar states of minimal_success_cap.
/// Throws DomainError when some T* is zero (no logarithm to fit).
ScalingFit fit_scaling(const std::vector<int>& ns, int m, int trials, RngSeed seed, int threads = 0);

}  // namespace qcma
