#pragma once

// Probability measures over pure states: the uniform (Haar) measure and the
// uniform measure on a cap {|<psi|axis>| >= h(p)} of Haar mass p.

#include <cmath>
#include <numbers>

#include "qcma/pure_state.hpp"

namespace qcma {

/// Haar-random state: i.i.d. standard complex Gaussians, normalized.
template <typename Scalar = double>
BasicPureState<Scalar> haar_sample(int qubits, CounterRng& rng) {
  BasicPureState<Scalar>::check_qubits(qubits, kMaxQubits);
  const Eigen::Index dim = Eigen::Index(1) << qubits;
  typename BasicPureState<Scalar>::Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto z = rng.complex_normal();
    v(i) = {Scalar(z.real()), Scalar(z.imag())};
  }
  return BasicPureState<Scalar>::normalized(std::move(v));
}

template <typename Scalar = double>
BasicPureState<Scalar> haar_sample(int qubits, RngSeed seed) {
  CounterRng rng(seed);
  return haar_sample<Scalar>(qubits, rng);
}

/// h(p) = sqrt(1 - p^(1/(N-1))): the radius at which the cap around any axis
/// has Haar probability exactly p, since Pr[|<psi|axis>| >= h] = (1-h^2)^(N-1).
inline double cap_threshold(double p, double dim) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("cap mass p must lie in (0, 1]");
  if (dim < 2.0) throw DomainError("dimension must be at least 2");
  // expm1/log1p keep h accurate when p^(1/(N-1)) is within rounding of 1.
  const double exponent = std::log(p) / (dim - 1.0);
  return std::sqrt(-std::expm1(exponent));
}

/// Haar probability of the cap of radius h: (1 - h^2)^(N-1).
inline double cap_mass(double h, double dim) {
  if (h < 0.0 || h > 1.0) throw DomainError("cap radius must lie in [0, 1]");
  return std::pow(1.0 - h * h, dim - 1.0);
}

template <typename Scalar = double>
struct BasicCapSpec {
  double p = 1.0;
  BasicPureState<Scalar> axis;
  double h = 0.0;

  static BasicCapSpec make(double p, BasicPureState<Scalar> axis) {
    const double h = cap_threshold(p, double(axis.dim()));
    return {p, std::move(axis), h};
  }
};

using CapSpec = BasicCapSpec<double>;

/// Uniform sample from the cap tau(p) around spec.axis.
///
/// The axis magnitude r is drawn by inverting Pr[r >= s | cap] = (1-s^2)^(N-1)/p;
/// the axis phase is uniform and the orthogonal complement is Haar on the
/// sphere of radius sqrt(1 - r^2).
template <typename Scalar>
BasicPureState<Scalar> cap_sample(const BasicCapSpec<Scalar>& spec, CounterRng& rng) {
  const auto& axis = spec.axis.amplitudes();
  const Eigen::Index dim = axis.size();
  const double v = rng.uniform_open_closed();
  const double r = std::sqrt(-std::expm1(std::log(spec.p * v) / double(dim - 1)));

  typename BasicPureState<Scalar>::Vector g(dim);
  Scalar g_norm = 0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto z = rng.complex_normal();
      g(i) = {Scalar(z.real()), Scalar(z.imag())};
    }
    g -= axis.dot(g) * axis;
    g_norm = g.norm();
  } while (!(g_norm > Scalar(1e-300)));
  g *= Scalar(std::sqrt(std::max(0.0, 1.0 - r * r))) / g_norm;

  const auto ph = rng.phase();
  const std::complex<Scalar> axis_coeff(Scalar(r * ph.real()), Scalar(r * ph.imag()));
  return BasicPureState<Scalar>::normalized(axis_coeff * axis + g);
}

template <typename Scalar>
BasicPureState<Scalar> cap_sample(const BasicCapSpec<Scalar>& spec, RngSeed seed) {
  CounterRng rng(seed);
  return cap_sample(spec, rng);
}

}  // namespace qcma
