#include "qcma/hybrid_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qcma/advice_net.hpp"
#include "qcma/measures.hpp"
#include "qcma/parallel.hpp"
#include "qcma/search_verify.hpp"

namespace qcma {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void push_gate(std::vector<Stage>& stages, Gate gate) {
  if (stages.empty() || !std::holds_alternative<GateProgram>(stages.back())) {
    stages.emplace_back(GateProgram{});
  }
  std::get<GateProgram>(stages.back()).gates.push_back(std::move(gate));
}

/// Reflection taking |0> to a phase-adjusted copy of psi; nullopt when psi is
/// already |0> up to phase.
std::optional<ComplexVector> preparation_axis(const PureState& psi) {
  ComplexVector target = psi.amplitudes();
  const double a0 = std::abs(target(0));
  if (a0 > 0.0) target *= std::conj(target(0)) / a0;
  ComplexVector v = -target;
  v(0) += 1.0;
  const double norm = v.norm();
  if (norm < 1e-14) return std::nullopt;
  return ComplexVector(v / norm);
}

void check_qubit(int q, int total, const char* what) {
  if (q < 0 || q >= total) throw ValidationError(std::string(what) + " qubit index out of range");
}

struct Trace {
  PureState final_state;
  std::vector<PureState> before_query;
};

Trace trace_algorithm(const AlgorithmSpec& alg, const RegisterOracle& oracle,
                      const std::vector<bool>& use_oracle, bool keep_states) {
  PureState state = PureState::basis(alg.total_qubits(), 0);
  std::vector<PureState> before;
  std::size_t t = 0;
  for (const auto& stage : alg.stages) {
    if (const auto* program = std::get_if<GateProgram>(&stage)) {
      state = apply_program(*program, state, alg.register_qubits);
      continue;
    }
    const auto& query = std::get<QueryMarker>(stage);
    if (keep_states) before.push_back(state);
    if (use_oracle.at(t++)) {
      state = query.control ? oracle.apply_controlled(state, *query.control)
                            : oracle.apply_on_register(state);
    }
  }
  return {std::move(state), std::move(before)};
}

std::optional<double> accept_probability(const AlgorithmSpec& alg, const PureState& state) {
  if (!alg.accept_qubit) return std::nullopt;
  const int idx[] = {*alg.accept_qubit};
  return marginal_probability(state, std::span<const int>(idx), 1);
}

}  // namespace

int AlgorithmSpec::T() const {
  return int(std::count_if(stages.begin(), stages.end(),
                           [](const Stage& s) { return std::holds_alternative<QueryMarker>(s); }));
}

void AlgorithmSpec::validate() const {
  PureState::check_qubits(register_qubits, kMaxQubits);
  if (workspace_qubits < 0 || total_qubits() > kMaxJointQubits) {
    throw ValidationError("workspace size out of range");
  }
  const int total = total_qubits();
  const Eigen::Index joint_dim = Eigen::Index(1) << total;
  const Eigen::Index reg_dim = Eigen::Index(1) << register_qubits;
  if (accept_qubit) check_qubit(*accept_qubit, total, "accept");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (const auto* query = std::get_if<QueryMarker>(&stages[i])) {
      if (query->control && (*query->control < register_qubits || *query->control >= total)) {
        throw ValidationError("query control must be a workspace qubit");
      }
      continue;
    }
    if (i > 0 && std::holds_alternative<GateProgram>(stages[i - 1])) {
      throw ValidationError("adjacent gate programs must be merged");
    }
    for (const auto& gate : std::get<GateProgram>(stages[i]).gates) {
      std::visit(Overloaded{
                     [&](const HadamardGate& g) { check_qubit(g.qubit, total, "hadamard"); },
                     [&](const HadamardLayerGate& g) {
                       const int count = g.count < 0 ? total - g.first : g.count;
                       if (g.first < 0 || g.first + count > total) {
                         throw ValidationError("hadamard layer out of range");
                       }
                     },
                     [&](const DiagonalGate& g) {
                       if (Eigen::Index(g.phases.size()) != joint_dim) {
                         throw ValidationError("diagonal gate length != joint dimension");
                       }
                     },
                     [&](const DenseGate& g) {
                       if (g.unitary.rows() != joint_dim || g.unitary.cols() != joint_dim) {
                         throw ValidationError("dense gate shape != joint dimension");
                       }
                       const ComplexMatrix err =
                           g.unitary.adjoint() * g.unitary - ComplexMatrix::Identity(joint_dim, joint_dim);
                       if (err.cwiseAbs().maxCoeff() > 1e-9) throw ValidationError("dense gate is not unitary");
                     },
                     [&](const ReflectionGate& g) {
                       if (g.axis.size() != joint_dim && g.axis.size() != reg_dim) {
                         throw ValidationError("reflection axis length matches neither register");
                       }
                       if (std::abs(g.axis.norm() - 1.0) > kNormTolerance) {
                         throw ValidationError("reflection axis is not a unit vector");
                       }
                     },
                 },
                 gate);
    }
  }
}

PureState apply_program(const GateProgram& program, const PureState& joint, int register_qubits) {
  PureState state = joint;
  for (const auto& gate : program.gates) {
    state = std::visit(
        Overloaded{
            [&](const HadamardGate& g) { return apply_hadamard(state, g.qubit); },
            [&](const HadamardLayerGate& g) { return apply_hadamard_layer(state, g.first, g.count); },
            [&](const DiagonalGate& g) { return apply_diagonal(state, g.phases); },
            [&](const DenseGate& g) {
              if (g.unitary.cols() != state.dim()) throw DimensionError("dense gate shape mismatch");
              return state.next(g.unitary * state.amplitudes());
            },
            [&](const ReflectionGate& g) {
              ComplexVector v = state.amplitudes();
              const Eigen::Index rows = g.axis.size();
              if (rows != state.dim() && rows != (Eigen::Index(1) << register_qubits)) {
                throw DimensionError("reflection axis length mismatch");
              }
              Eigen::Map<ComplexMatrix> columns(v.data(), rows, v.size() / rows);
              const Eigen::Matrix<Complex, 1, Eigen::Dynamic> coeffs = g.axis.adjoint() * columns;
              columns.noalias() -= 2.0 * g.axis * coeffs;
              return state.next(std::move(v));
            },
        },
        gate);
  }
  return state;
}

PureState run_algorithm(const AlgorithmSpec& alg, const RegisterOracle& oracle,
                        const std::vector<bool>& use_oracle) {
  if (oracle.qubits() != alg.register_qubits) throw DimensionError("oracle does not match algorithm");
  if (int(use_oracle.size()) != alg.T()) throw DimensionError("need one oracle flag per query");
  return trace_algorithm(alg, oracle, use_oracle, false).final_state;
}

double HybridTranscript::max_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < deltas.size(); ++t) worst = std::max(worst, deltas[t] - bounds[t]);
  return deltas.empty() ? 0.0 : worst;
}

double HybridTranscript::sum_deltas() const { return std::accumulate(deltas.begin(), deltas.end(), 0.0); }

double HybridTranscript::mean_delta() const { return deltas.empty() ? 0.0 : sum_deltas() / double(deltas.size()); }

double register_overlap(const PureState& joint, const PureState& psi) {
  if (joint.qubits() < psi.qubits()) throw DimensionError("joint state smaller than register");
  ComplexVector v = joint.amplitudes();
  Eigen::Map<const ComplexMatrix> columns(v.data(), psi.dim(), v.size() / psi.dim());
  return (psi.amplitudes().adjoint() * columns).squaredNorm();
}

HybridTranscript run_hybrid(const AlgorithmSpec& alg, const PureState& psi, HybridMode mode) {
  alg.validate();
  if (psi.qubits() != alg.register_qubits) throw DimensionError("psi does not match algorithm register");
  const int T = alg.T();
  const MarkedStateOracle marked(psi);
  const IdentityOracle identity(psi.qubits());

  HybridTranscript out;
  const Trace control = trace_algorithm(alg, identity, std::vector<bool>(std::size_t(T), false), true);
  const PureState phi_0 = trace_algorithm(alg, marked, std::vector<bool>(std::size_t(T), true), false).final_state;
  const PureState& phi_T = control.final_state;

  std::vector<const QueryMarker*> queries;
  for (const auto& stage : alg.stages) {
    if (const auto* q = std::get_if<QueryMarker>(&stage)) queries.push_back(q);
  }

  for (int t = 1; t <= T; ++t) {
    const PureState& before = control.before_query[std::size_t(t - 1)];
    out.bounds.push_back(2.0 * std::sqrt(register_overlap(before, psi)));
  }

  if (mode == HybridMode::kFull) {
    PureState previous = phi_0;
    for (int t = 1; t <= T; ++t) {
      std::vector<bool> use(std::size_t(T), true);
      std::fill(use.begin(), use.begin() + t, false);
      PureState current = trace_algorithm(alg, marked, use, false).final_state;
      out.deltas.push_back(distance(current, previous));
      previous = std::move(current);
    }
  } else {
    for (int t = 1; t <= T; ++t) {
      const PureState& before = control.before_query[std::size_t(t - 1)];
      const auto* q = queries[std::size_t(t - 1)];
      const PureState after = q->control ? marked.apply_controlled(before, *q->control)
                                         : marked.apply_on_register(before);
      out.deltas.push_back(distance(after, before));
    }
  }
  out.total_delta = T == 0 ? 0.0 : distance(phi_T, phi_0);
  out.accept_marked = accept_probability(alg, phi_0);
  out.accept_identity = accept_probability(alg, phi_T);
  return out;
}

AlgorithmSpec grover_algorithm(int n, int T) {
  PureState::check_qubits(n, kMaxQubits);
  if (T < 0) throw ValidationError("query count must be nonnegative");
  AlgorithmSpec alg;
  alg.register_qubits = n;
  push_gate(alg.stages, HadamardLayerGate{0, n});
  const ComplexVector uniform = PureState::uniform(n).amplitudes();
  for (int t = 0; t < T; ++t) {
    alg.stages.emplace_back(QueryMarker{});
    push_gate(alg.stages, ReflectionGate{uniform});
  }
  return alg;
}

AlgorithmSpec prepare_and_query(const PureState& psi) {
  AlgorithmSpec alg;
  alg.register_qubits = psi.qubits();
  if (auto axis = preparation_axis(psi)) push_gate(alg.stages, ReflectionGate{std::move(*axis)});
  alg.stages.emplace_back(QueryMarker{});
  return alg;
}

AlgorithmSpec verifier_algorithm(const PureState& phi, int iterations) {
  if (iterations < 0) throw ValidationError("iteration count must be nonnegative");
  const int n = phi.qubits();
  AlgorithmSpec alg;
  alg.register_qubits = n;
  alg.workspace_qubits = 1;
  alg.accept_qubit = n;
  if (auto axis = preparation_axis(phi)) push_gate(alg.stages, ReflectionGate{std::move(*axis)});
  for (int i = 0; i < iterations; ++i) {
    alg.stages.emplace_back(QueryMarker{});
    push_gate(alg.stages, ReflectionGate{phi.amplitudes()});
  }
  push_gate(alg.stages, HadamardGate{n});
  alg.stages.emplace_back(QueryMarker{n});
  push_gate(alg.stages, HadamardGate{n});
  return alg;
}

double expected_overlap(double p, double dim) {
  if (!(dim >= 2.0)) throw DomainError("dimension must be at least 2");
  const double h = cap_threshold(p, dim);
  return 1.0 / dim + h * h * (1.0 - 1.0 / dim);
}

double band_expected_overlap(double p, double dim, double offset) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("p must lie in (0, 1]");
  if (!(dim >= 2.0)) throw DomainError("dimension must be at least 2");
  if (offset < 0.0 || offset + p > 1.0 + 1e-12) throw DomainError("band must lie inside [0, 1]");
  // With tail mass s = (1-u)^(N-1), the antiderivative of u (N-1)(1-u)^(N-2)
  // is F = -u s - s (1-u) / N.
  auto antiderivative = [dim](double s) {
    if (s <= 0.0) return 0.0;
    s = std::min(s, 1.0);
    const double l = std::log(s) / (dim - 1.0);
    const double u = -std::expm1(l);
    const double w = std::exp(l);
    return -u * s - s * w / dim;
  };
  return (antiderivative(offset) - antiderivative(offset + p)) / p;
}

namespace {

struct CellOutcome {
  bool success = false;
  double probability = 0.0;
  std::uint64_t queries = 0;
  int iterations = 0;
  double mean_delta = 0.0;
  double violation = 0.0;
  bool bias_violation = false;
};

}  // namespace

std::vector<SweepRow> lower_bound_sweep(const SweepConfig& config) {
  if (config.trials < 1) throw ValidationError("trials must be positive");
  for (int n : config.ns) PureState::check_qubits(n, kMaxQubits - 1);
  for (int n : config.ns) {
    for (int m : config.ms) {
      if (witness_capacity(n, m) < 1) {
        throw ValidationError("m = " + std::to_string(m) + " is below n + 2 for n = " + std::to_string(n));
      }
    }
  }
  const std::size_t nb = config.budgets.size();
  const std::size_t nm = config.ms.size();
  const std::size_t nt = std::size_t(config.trials);
  const std::size_t cells = config.ns.size() * nm * nt;
  std::vector<CellOutcome> outcomes(cells * nb);

  parallel_for(cells, config.threads, [&](std::size_t cell) {
    const int n = config.ns[cell / (nm * nt)];
    const int m = config.ms[(cell / nt) % nm];
    const std::size_t trial = cell % nt;
    CounterRng rng = CounterRng::stream(config.seed, {0x5357ULL, std::uint64_t(n), std::uint64_t(m), trial});
    const PureState psi = haar_sample<double>(n, rng);
    const AdviceWitness w = encode_witness(psi, m);
    const Bits bits = serialize(w);
    const PureState phi = decode_witness(w);
    for (std::size_t b = 0; b < nb; ++b) {
      const MarkedStateOracle oracle(psi);
      CounterRng run_rng =
          CounterRng::stream(config.seed, {0x5358ULL, std::uint64_t(n), std::uint64_t(m), trial, b});
      std::optional<int> cap;
      if (config.budgets[b] >= 0) cap = config.budgets[b];
      const QcmaVerdict v = qcma_verify(oracle, bits, n, m, run_rng, cap);
      CellOutcome& o = outcomes[cell * nb + b];
      o.success = v.accepted();
      o.probability = v.report.final_overlap * v.report.final_overlap;
      o.queries = v.report.queries_used;
      o.iterations = v.report.iterations;
      if (config.with_hybrid) {
        const HybridTranscript tr =
            run_hybrid(verifier_algorithm(phi, v.report.iterations), psi, HybridMode::kIncremental);
        o.mean_delta = tr.mean_delta();
        o.violation = tr.max_violation();
        const double bias = std::abs(*tr.accept_marked - *tr.accept_identity);
        o.bias_violation = bias >= 1.0 / 3.0 && tr.total_delta < 1.0 / 3.0;
      }
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
    for (std::size_t mi = 0; mi < nm; ++mi) {
      const int n = config.ns[ni];
      const int m = config.ms[mi];
      const int full = int(qcma_query_bound(n, m)) - 1;
      for (std::size_t b = 0; b < nb; ++b) {
        SweepRow row;
        row.n = n;
        row.m = m;
        row.full_budget = config.budgets[b] < 0 || config.budgets[b] >= full;
        row.T = row.full_budget ? full : config.budgets[b];
        row.trials = config.trials;
        row.max_delta_violation = -std::numeric_limits<double>::infinity();
        for (std::size_t trial = 0; trial < nt; ++trial) {
          const CellOutcome& o = outcomes[((ni * nm + mi) * nt + trial) * nb + b];
          row.successes += o.success ? 1 : 0;
          row.mean_success_probability += o.probability;
          row.max_queries = std::max(row.max_queries, o.queries);
          row.mean_delta += o.mean_delta;
          row.max_delta_violation = std::max(row.max_delta_violation, o.violation);
          row.bias_violations += o.bias_violation ? 1 : 0;
        }
        row.mean_success_probability /= double(nt);
        row.mean_delta /= double(nt);
        if (!config.with_hybrid) row.max_delta_violation = 0.0;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

int minimal_success_cap(const PureState& psi, int m, double threshold) {
  const int n = psi.qubits();
  const Bits bits = serialize(encode_witness(psi, m));
  const int full = int(qcma_query_bound(n, m)) - 1;
  CounterRng rng(RngSeed{0});
  for (int cap = 0; cap <= full; ++cap) {
    const MarkedStateOracle oracle(psi);
    const QcmaVerdict v = qcma_verify(oracle, bits, n, m, rng, cap);
    if (v.report.final_overlap * v.report.final_overlap >= threshold) return cap;
    if (v.report.iterations < cap) break;  // schedule already exhausted
  }
  return -1;
}

ScalingFit fit_scaling(const std::vector<int>& ns, int m, int trials, RngSeed seed, int threads) {
  if (ns.size() < 2) throw ValidationError("need at least two register sizes to fit");
  if (trials < 1) throw ValidationError("trials must be positive");
  const std::size_t nt = std::size_t(trials);
  std::vector<int> caps(ns.size() * nt);
  parallel_for(caps.size(), threads, [&](std::size_t cell) {
    const int n = ns[cell / nt];
    CounterRng rng = CounterRng::stream(seed, {0x7374ULL, std::uint64_t(n), cell % nt});
    const PureState psi = haar_sample<double>(n, rng);
    int cap = minimal_success_cap(psi, m);
    if (cap < 0) cap = int(qcma_query_bound(n, m));
    caps[cell] = cap;
  });

  ScalingFit fit;
  fit.ns = ns;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < nt; ++t) sum += caps[i * nt + t];
    const double mean = sum / double(nt);
    if (!(mean > 0.0)) throw DomainError("T* is zero at n=" + std::to_string(ns[i]) + "; nothing to fit");
    fit.t_star.push_back(mean);
    xs.push_back(ns[i] / 2.0);
    ys.push_back(std::log2(mean));
  }
  const double k = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  return fit;
}

}  // namespace qcma
