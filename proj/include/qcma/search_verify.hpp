#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qcma/advice_net.hpp"
#include "qcma/marked_oracle.hpp"

namespace qcma {

struct HadamardTestResult {
  bool accept = false;
  /// Exact probability of reading 1 on the control qubit.
  double probability = 0.0;
};

/// Prepares |+>|phi>, applies controlled-U, Hadamard on the control, measures
/// it and accepts on 1. Acceptance probability is |<psi|phi>|^2 for U_psi and
/// 0 for the identity. One query.
HadamardTestResult hadamard_test(const RegisterOracle& oracle, const PureState& phi, CounterRng& rng);

struct SearchReport {
  bool found = false;
  std::uint64_t queries_used = 0;
  int iterations = 0;
  /// sqrt of the exact final acceptance probability, i.e. |<psi|rotated phi>|.
  double final_overlap = 0.0;
};

/// Iteration count for rotation angle theta: floor(pi / (4 theta)) capped at
/// max_iters. When uncapped and sin^2((2T+1) theta) < 1/2, T-1 and T+1 are
/// also tried and the best kept.
int amplification_schedule(double theta, int max_iters);

/// Runs Q = R_phi U_psi on |phi> for the scheduled number of iterations and
/// finishes with a Hadamard test. The schedule angle is arcsin|<phi|psi>| when
/// the oracle hides a marked state and arcsin(fallback_overlap) otherwise
/// (zero iterations when neither is available).
SearchReport amplitude_amplify(const RegisterOracle& oracle, const PureState& phi, int max_iters,
                               CounterRng& rng, std::optional<double> fallback_overlap = std::nullopt);

enum class VerifyStatus { kAccepted, kRejected, kMalformed };

struct QcmaVerdict {
  VerifyStatus status = VerifyStatus::kRejected;
  SearchReport report;
  std::string error;

  bool accepted() const { return status == VerifyStatus::kAccepted; }
};

/// ceil(pi / (4 arcsin h)) + 1 with h the witness guarantee for (n, m).
std::uint64_t qcma_query_bound(int n, int m);

/// Decodes an m-bit advice witness, amplifies toward the oracle's marked
/// state and Hadamard-tests the result. `iteration_cap` limits the number of
/// amplification iterations below the full schedule.
QcmaVerdict qcma_verify(const RegisterOracle& oracle, const Bits& witness_bits, int n, int m,
                        CounterRng& rng, std::optional<int> iteration_cap = std::nullopt);

}  // namespace qcma
