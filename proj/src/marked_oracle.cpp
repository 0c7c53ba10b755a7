#include "qcma/marked_oracle.hpp"

#include <string>

namespace qcma {

RegisterOracle::RegisterOracle(int qubits) : qubits_(qubits) {
  PureState::check_qubits(qubits, kMaxJointQubits);
}

RegisterOracle::RegisterOracle(const RegisterOracle& other)
    : qubits_(other.qubits_), queries_(other.queries()) {}

PureState RegisterOracle::apply(const PureState& state) const {
  if (state.qubits() != qubits_) throw DimensionError("state does not match oracle register");
  return transform(state, std::nullopt);
}

PureState RegisterOracle::apply_on_register(const PureState& joint) const {
  if (joint.qubits() < qubits_) throw DimensionError("joint state smaller than oracle register");
  return transform(joint, std::nullopt);
}

PureState RegisterOracle::apply_controlled(const PureState& joint, int control_index) const {
  if (joint.qubits() <= qubits_) throw DimensionError("joint state has no control qubit");
  if (control_index < qubits_ || control_index >= joint.qubits()) {
    throw DimensionError("control qubit " + std::to_string(control_index) +
                         " must lie above the oracle register");
  }
  return transform(joint, control_index);
}

std::optional<double> RegisterOracle::marked_overlap(const PureState&) const { return std::nullopt; }

PureState RegisterOracle::transform(const PureState& joint, std::optional<int> control) const {
  count();
  ComplexVector v = joint.amplitudes();
  const Eigen::Index rows = dim();
  const Eigen::Index cols = v.size() / rows;
  Eigen::Map<ComplexMatrix> columns(v.data(), rows, cols);
  if (!control) {
    act(columns);
  } else {
    const int bit = *control - qubits_;
    // Columns with the control bit set form runs of 2^bit consecutive columns.
    const Eigen::Index run = Eigen::Index(1) << bit;
    for (Eigen::Index start = run; start < cols; start += 2 * run) {
      act(columns.middleCols(start, run));
    }
  }
  return joint.next(std::move(v));
}

MarkedStateOracle::MarkedStateOracle(PureState marked)
    : RegisterOracle(marked.qubits()), marked_(std::move(marked)) {}

std::optional<double> MarkedStateOracle::marked_overlap(const PureState& phi) const {
  return std::abs(overlap(marked_, phi));
}

void MarkedStateOracle::act(Eigen::Ref<ComplexMatrix> columns) const {
  const auto& psi = marked_.amplitudes();
  // M - 2 psi (psi^dagger M)
  const Eigen::Matrix<Complex, 1, Eigen::Dynamic> coeffs = psi.adjoint() * columns;
  columns.noalias() -= 2.0 * psi * coeffs;
}

QpolyOracle::QpolyOracle(PureState advice, std::vector<bool> language_bits)
    : advice_(std::move(advice)), language_(std::move(language_bits)) {
  if (advice_.qubits() > kMaxInputQubits) {
    throw DimensionError("qpoly oracle supports at most 7 input qubits");
  }
  if (Eigen::Index(language_.size()) != advice_.dim()) {
    throw DimensionError("language map must have one bit per input string");
  }
}

QpolyOracle::QpolyOracle(const QpolyOracle& other)
    : advice_(other.advice_), language_(other.language_), queries_(other.queries()) {}

PureState QpolyOracle::apply(const PureState& joint) const {
  if (joint.qubits() != 2 * advice_.qubits()) {
    throw DimensionError("qpoly oracle expects a 2n-qubit joint state");
  }
  queries_.fetch_add(1, std::memory_order_relaxed);
  ComplexVector v = joint.amplitudes();
  const Eigen::Index n = advice_.dim();
  Eigen::Map<ComplexMatrix> columns(v.data(), n, n);
  const auto& psi = advice_.amplitudes();
  for (Eigen::Index x = 0; x < n; ++x) {
    if (!language_[std::size_t(x)]) continue;
    const Complex c = psi.dot(columns.col(x));
    columns.col(x) -= 2.0 * c * psi;
  }
  return joint.next(std::move(v));
}

}  // namespace qcma
