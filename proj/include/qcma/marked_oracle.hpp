#pragma once

// Query-counted unitary black boxes acting on an n-qubit register.
//
// The register always occupies the low n qubits of whatever joint state the
// oracle is applied to; every higher qubit (control, workspace) indexes a
// column of the reshaped amplitude matrix and is left untouched except for
// the controlled variant, which acts only on columns whose control bit is 1.

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "qcma/pure_state.hpp"

namespace qcma {

class RegisterOracle {
 public:
  explicit RegisterOracle(int qubits);
  RegisterOracle(const RegisterOracle& other);
  RegisterOracle& operator=(const RegisterOracle&) = delete;
  virtual ~RegisterOracle() = default;

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return Eigen::Index(1) << qubits_; }
  std::uint64_t queries() const { return queries_.load(std::memory_order_relaxed); }

  /// U|phi>; one query.
  PureState apply(const PureState& state) const;
  /// U on the register of every workspace branch of `joint`; one query.
  PureState apply_on_register(const PureState& joint) const;
  /// Controlled-U with the given control qubit (which must lie above the
  /// register); one query.
  PureState apply_controlled(const PureState& joint, int control_index) const;

  /// Exact |<marked|phi>| when the oracle hides a marked state, nullopt
  /// otherwise. Used only to pick an amplification schedule.
  virtual std::optional<double> marked_overlap(const PureState& phi) const;

 protected:
  /// Applies U in place to each column (each column is one register vector).
  virtual void act(Eigen::Ref<ComplexMatrix> columns) const = 0;
  void count() const { queries_.fetch_add(1, std::memory_order_relaxed); }

 private:
  PureState transform(const PureState& joint, std::optional<int> control) const;

  int qubits_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

/// U_psi = I - 2|psi><psi|: flips the sign of the marked state and fixes its
/// orthogonal complement.
class MarkedStateOracle final : public RegisterOracle {
 public:
  explicit MarkedStateOracle(PureState marked);

  const PureState& marked() const { return marked_; }
  std::optional<double> marked_overlap(const PureState& phi) const override;

 protected:
  void act(Eigen::Ref<ComplexMatrix> columns) const override;

 private:
  PureState marked_;
};

class IdentityOracle final : public RegisterOracle {
 public:
  using RegisterOracle::RegisterOracle;

 protected:
  void act(Eigen::Ref<ComplexMatrix>) const override {}
};

/// Oracle on 2n qubits: |advice>|x> -> (-1)^L(x) |advice>|x>, and |phi>|x> is
/// fixed whenever <phi|advice> = 0. The advice register is the low n qubits,
/// so joint index = advice_index + 2^n * x.
class QpolyOracle {
 public:
  static constexpr int kMaxInputQubits = 7;

  QpolyOracle(PureState advice, std::vector<bool> language_bits);
  QpolyOracle(const QpolyOracle& other);
  QpolyOracle& operator=(const QpolyOracle&) = delete;

  int input_qubits() const { return advice_.qubits(); }
  const PureState& advice() const { return advice_; }
  bool in_language(std::uint64_t x) const { return language_.at(x); }
  std::uint64_t queries() const { return queries_.load(std::memory_order_relaxed); }

  PureState apply(const PureState& joint) const;

 private:
  PureState advice_;
  std::vector<bool> language_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

inline PureState apply_marked(const MarkedStateOracle& oracle, const PureState& state) {
  return oracle.apply(state);
}

inline PureState apply_controlled(const RegisterOracle& oracle, const PureState& joint,
                                  int control_index) {
  return oracle.apply_controlled(joint, control_index);
}

inline PureState apply_qpoly(const QpolyOracle& oracle, const PureState& joint) {
  return oracle.apply(joint);
}

}  // namespace qcma
