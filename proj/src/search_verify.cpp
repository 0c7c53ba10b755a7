#include "qcma/search_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qcma {

HadamardTestResult hadamard_test(const RegisterOracle& oracle, const PureState& phi, CounterRng& rng) {
  if (phi.qubits() != oracle.qubits()) throw DimensionError("witness state does not match oracle");
  const int control = phi.qubits();
  PureState joint = tensor(PureState::uniform(1), phi);
  joint = oracle.apply_controlled(joint, control);
  joint = apply_hadamard(joint, control);
  const int idx[] = {control};
  const double p1 = marginal_probability(joint, std::span<const int>(idx), 1);
  const auto m = measure_register(joint, std::span<const int>(idx), rng);
  return {m.outcome == 1, p1};
}

int amplification_schedule(double theta, int max_iters) {
  if (max_iters <= 0 || !(theta > 0.0)) return 0;
  const double ideal = std::floor(std::numbers::pi / (4.0 * theta));
  if (ideal >= double(max_iters)) return max_iters;
  int t = int(ideal);
  auto success = [theta](int iters) { return std::pow(std::sin((2 * iters + 1) * theta), 2); };
  if (success(t) < 0.5) {
    int best = t;
    for (int cand : {t - 1, t + 1}) {
      if (cand >= 0 && cand <= max_iters && success(cand) > success(best)) best = cand;
    }
    t = best;
  }
  return t;
}

SearchReport amplitude_amplify(const RegisterOracle& oracle, const PureState& phi, int max_iters,
                               CounterRng& rng, std::optional<double> fallback_overlap) {
  if (phi.qubits() != oracle.qubits()) throw DimensionError("start state does not match oracle");
  const std::uint64_t before = oracle.queries();
  double overlap_for_schedule = 0.0;
  if (auto known = oracle.marked_overlap(phi)) {
    overlap_for_schedule = *known;
  } else if (fallback_overlap) {
    overlap_for_schedule = *fallback_overlap;
  }
  const double theta = std::asin(std::clamp(overlap_for_schedule, 0.0, 1.0));
  const int iters = amplification_schedule(theta, std::max(0, max_iters));

  PureState state = phi;
  for (int i = 0; i < iters; ++i) {
    state = oracle.apply(state);
    // R_phi = 2|phi><phi| - I
    const Complex c = phi.amplitudes().dot(state.amplitudes());
    state = state.next(2.0 * c * phi.amplitudes() - state.amplitudes());
  }
  const auto test = hadamard_test(oracle, state, rng);
  SearchReport report;
  report.found = test.accept;
  report.iterations = iters;
  report.queries_used = oracle.queries() - before;
  report.final_overlap = std::sqrt(std::max(0.0, test.probability));
  return report;
}

std::uint64_t qcma_query_bound(int n, int m) {
  const double h = guaranteed_overlap(n, m);
  return std::uint64_t(std::ceil(std::numbers::pi / (4.0 * std::asin(h)))) + 1;
}

QcmaVerdict qcma_verify(const RegisterOracle& oracle, const Bits& witness_bits, int n, int m,
                        CounterRng& rng, std::optional<int> iteration_cap) {
  QcmaVerdict verdict;
  if (n != oracle.qubits()) throw DimensionError("witness register does not match oracle");
  AdviceWitness w;
  try {
    if (witness_bits.size() > std::size_t(std::max(m, 0))) {
      throw ValidationError("witness longer than the bit budget");
    }
    w = deserialize(witness_bits, n);
    if (w.t() > std::size_t(witness_capacity(n, m))) throw ValidationError("too many entries");
  } catch (const ValidationError& e) {
    verdict.status = VerifyStatus::kMalformed;
    verdict.error = e.what();
    return verdict;
  }
  const PureState phi = decode_witness(w);
  const double h = guaranteed_overlap(n, m);
  int max_iters = int(qcma_query_bound(n, m)) - 1;
  if (iteration_cap) max_iters = std::min(max_iters, *iteration_cap);
  verdict.report = amplitude_amplify(oracle, phi, max_iters, rng, h);
  verdict.status = verdict.report.found ? VerifyStatus::kAccepted : VerifyStatus::kRejected;
  return verdict;
}

}  // namespace qcma
