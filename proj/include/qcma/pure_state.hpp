#pragma once

// Dense pure states and the elementary gates every experiment is built from.
//
// Qubit q of an n-qubit register is bit q of the basis index (qubit 0 is the
// least significant bit). Composite registers place the "inner" register in
// the low bits, so a joint amplitude vector reshaped column-major into a
// (2^inner x 2^outer) matrix has one column per outer basis value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcma/errors.hpp"
#include "qcma/rng.hpp"

namespace qcma {

/// Largest register used by the sampling routines (N <= 16384).
inline constexpr int kMaxQubits = 14;
/// Largest joint register (sampling register plus control/flag/workspace).
inline constexpr int kMaxJointQubits = 16;
inline constexpr double kNormTolerance = 1e-10;
/// Operations composed since the last renormalization before drift is removed.
inline constexpr int kRenormalizeEvery = 32;

template <typename Scalar>
class BasicPureState {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  /// Takes ownership of amplitudes whose norm must already be 1 within
  /// kNormTolerance and whose length must be a power of two.
  explicit BasicPureState(Vector amplitudes, int composed_ops = 0)
      : amplitudes_(std::move(amplitudes)), composed_ops_(composed_ops) {
    qubits_ = qubits_for_length(amplitudes_.size());
    const Scalar norm = amplitudes_.norm();
    if (std::abs(norm - Scalar(1)) > Scalar(kNormTolerance)) {
      throw ValidationError("state norm " + std::to_string(double(norm)) + " is not 1");
    }
    if (composed_ops_ >= kRenormalizeEvery) {
      amplitudes_ /= norm;
      composed_ops_ = 0;
    }
  }

  static BasicPureState normalized(Vector amplitudes) {
    const Scalar norm = amplitudes.norm();
    if (!(norm > Scalar(0))) throw ValidationError("cannot normalize the zero vector");
    amplitudes /= norm;
    return BasicPureState(std::move(amplitudes));
  }

  static BasicPureState basis(int qubits, std::uint64_t index) {
    check_qubits(qubits, kMaxJointQubits);
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    if (index >= std::uint64_t(dim)) throw DimensionError("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(Eigen::Index(index)) = Complex(1);
    return BasicPureState(std::move(v));
  }

  static BasicPureState uniform(int qubits) {
    check_qubits(qubits, kMaxJointQubits);
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    return BasicPureState(Vector::Constant(dim, Complex(Scalar(1) / std::sqrt(Scalar(dim)))));
  }

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](Eigen::Index i) const { return amplitudes_(i); }
  int composed_ops() const { return composed_ops_; }

  /// Successor state produced by one more composed operation.
  BasicPureState next(Vector amplitudes) const {
    return BasicPureState(std::move(amplitudes), composed_ops_ + 1);
  }

  static int qubits_for_length(Eigen::Index length) {
    if (length < 2 || (length & (length - 1)) != 0) {
      throw DimensionError("amplitude count must be a power of two >= 2");
    }
    int q = 0;
    while ((Eigen::Index(1) << q) < length) ++q;
    check_qubits(q, kMaxJointQubits);
    return q;
  }

  static void check_qubits(int qubits, int ceiling) {
    if (qubits < 1 || qubits > ceiling) {
      throw DimensionError("qubit count " + std::to_string(qubits) + " outside [1, " +
                           std::to_string(ceiling) + "]");
    }
  }

 private:
  Vector amplitudes_;
  int qubits_ = 0;
  int composed_ops_ = 0;
};

using PureState = BasicPureState<double>;
using Complex = PureState::Complex;
using ComplexVector = PureState::Vector;
using ComplexMatrix = PureState::Matrix;

template <typename Scalar>
void require_same_dim(const BasicPureState<Scalar>& a, const BasicPureState<Scalar>& b) {
  if (a.dim() != b.dim()) throw DimensionError("state dimensions differ");
}

/// <a|b>, conjugate-linear in a.
template <typename Scalar>
std::complex<Scalar> overlap(const BasicPureState<Scalar>& a, const BasicPureState<Scalar>& b) {
  require_same_dim(a, b);
  return a.amplitudes().dot(b.amplitudes());
}

/// ||a - b||_2.
template <typename Scalar>
Scalar distance(const BasicPureState<Scalar>& a, const BasicPureState<Scalar>& b) {
  require_same_dim(a, b);
  return (a.amplitudes() - b.amplitudes()).norm();
}

/// Hadamard on a single qubit.
template <typename Scalar>
BasicPureState<Scalar> apply_hadamard(const BasicPureState<Scalar>& state, int qubit) {
  if (qubit < 0 || qubit >= state.qubits()) throw DimensionError("qubit index out of range");
  auto v = state.amplitudes();
  const Eigen::Index stride = Eigen::Index(1) << qubit;
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  for (Eigen::Index base = 0; base < v.size(); base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const auto a = v(i);
      const auto b = v(i + stride);
      v(i) = s * (a + b);
      v(i + stride) = s * (a - b);
    }
  }
  return state.next(std::move(v));
}

/// H on qubits [first, first + count); the whole register by default.
template <typename Scalar>
BasicPureState<Scalar> apply_hadamard_layer(const BasicPureState<Scalar>& state, int first = 0,
                                            int count = -1) {
  if (count < 0) count = state.qubits() - first;
  if (first < 0 || first + count > state.qubits()) throw DimensionError("qubit range out of range");
  // Fast Walsh-Hadamard transform over the selected qubits, one normalization at the end.
  auto v = state.amplitudes();
  for (int q = first; q < first + count; ++q) {
    const Eigen::Index stride = Eigen::Index(1) << q;
    for (Eigen::Index base = 0; base < v.size(); base += 2 * stride) {
      for (Eigen::Index i = base; i < base + stride; ++i) {
        const auto a = v(i);
        const auto b = v(i + stride);
        v(i) = a + b;
        v(i + stride) = a - b;
      }
    }
  }
  v *= std::pow(Scalar(2), -Scalar(count) / 2);
  return state.next(std::move(v));
}

/// Amplitude-wise multiplication by unit-modulus phases.
template <typename Scalar>
BasicPureState<Scalar> apply_diagonal(const BasicPureState<Scalar>& state,
                                      std::span<const std::complex<Scalar>> phases) {
  if (Eigen::Index(phases.size()) != state.dim()) throw DimensionError("phase count != dimension");
  auto v = state.amplitudes();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto ph = phases[std::size_t(i)];
    if (std::abs(std::abs(ph) - Scalar(1)) > Scalar(1e-12)) {
      throw ValidationError("diagonal entry " + std::to_string(i) + " is not unit modulus");
    }
    v(i) *= ph;
  }
  return state.next(std::move(v));
}

template <typename Scalar>
BasicPureState<Scalar> apply_diagonal(const BasicPureState<Scalar>& state,
                                      const std::vector<std::complex<Scalar>>& phases) {
  return apply_diagonal(state, std::span<const std::complex<Scalar>>(phases));
}

/// Reflection I - 2|axis><axis| on the full register.
template <typename Scalar>
BasicPureState<Scalar> reflect_about(const BasicPureState<Scalar>& state,
                                     const BasicPureState<Scalar>& axis) {
  require_same_dim(state, axis);
  const auto c = axis.amplitudes().dot(state.amplitudes());
  return state.next(state.amplitudes() - Scalar(2) * c * axis.amplitudes());
}

/// Marginal probability of `outcome` on the listed qubits (bit j of `outcome`
/// is the value of qubit indices[j]).
template <typename Scalar>
Scalar marginal_probability(const BasicPureState<Scalar>& state, std::span<const int> indices,
                            std::uint64_t outcome) {
  std::uint64_t mask = 0, want = 0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    mask |= std::uint64_t(1) << indices[j];
    if ((outcome >> j) & 1U) want |= std::uint64_t(1) << indices[j];
  }
  Scalar p = 0;
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    if ((std::uint64_t(i) & mask) == want) p += std::norm(state[i]);
  }
  return p;
}

template <typename Scalar>
struct Measurement {
  std::uint64_t outcome = 0;  // bit j = value of measured qubit indices[j]
  BasicPureState<Scalar> collapsed;
  Scalar probability = 0;
};

/// Born-rule measurement of a subset of qubits; the collapsed state is
/// renormalized and `probability` is the pre-measurement marginal.
template <typename Scalar>
Measurement<Scalar> measure_register(const BasicPureState<Scalar>& state,
                                     std::span<const int> indices, CounterRng& rng) {
  if (indices.empty()) throw ValidationError("empty qubit index set");
  std::uint64_t mask = 0;
  for (int q : indices) {
    if (q < 0 || q >= state.qubits()) throw DimensionError("qubit index out of range");
    if ((mask >> q) & 1U) throw ValidationError("duplicate qubit index");
    mask |= std::uint64_t(1) << q;
  }
  auto outcome_of = [&](Eigen::Index i) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < indices.size(); ++j) {
      out |= ((std::uint64_t(i) >> indices[j]) & 1U) << j;
    }
    return out;
  };
  std::vector<Scalar> probs(std::size_t(1) << indices.size(), Scalar(0));
  for (Eigen::Index i = 0; i < state.dim(); ++i) probs[outcome_of(i)] += std::norm(state[i]);

  const double u = rng.uniform();
  double acc = 0;
  std::uint64_t chosen = probs.size() - 1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += double(probs[k]);
    if (u < acc) {
      chosen = k;
      break;
    }
  }
  while (probs[chosen] <= Scalar(0)) --chosen;  // u landed in rounding slack at the top

  typename BasicPureState<Scalar>::Vector v = state.amplitudes();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (outcome_of(i) != chosen) v(i) = 0;
  }
  v /= std::sqrt(probs[chosen]);
  return {chosen, BasicPureState<Scalar>(std::move(v)), probs[chosen]};
}

template <typename Scalar>
Measurement<Scalar> measure_register(const BasicPureState<Scalar>& state,
                                     const std::vector<int>& indices, CounterRng& rng) {
  return measure_register(state, std::span<const int>(indices), rng);
}

/// |a> (x) |b> with `low` occupying the low-order qubits.
template <typename Scalar>
BasicPureState<Scalar> tensor(const BasicPureState<Scalar>& high, const BasicPureState<Scalar>& low) {
  typename BasicPureState<Scalar>::Vector v(high.dim() * low.dim());
  for (Eigen::Index h = 0; h < high.dim(); ++h) {
    v.segment(h * low.dim(), low.dim()) = high[h] * low.amplitudes();
  }
  return BasicPureState<Scalar>(std::move(v));
}

}  // namespace qcma
