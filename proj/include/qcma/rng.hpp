#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace qcma {

/// 64-bit seed; identical seed + identical call sequence gives identical output.
struct RngSeed {
  std::uint64_t value = 0;
};

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output i is mix64(key + i * golden). Every random
/// draw in the project goes through this type so results never depend on the
/// standard library's distribution implementations.
///
/// Independent streams are derived from a seed plus any number of integer
/// coordinates (trial index, cell key, ...), which is what makes parallel runs
/// reproduce the sequential ones bit for bit.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(RngSeed seed) : key_(mix64(seed.value ^ 0x5851f42d4c957f2dULL)) {}

  static CounterRng stream(RngSeed seed, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t k = mix64(seed.value);
    for (std::uint64_t c : coords) k = mix64(k ^ mix64(c + 0x2545f4914f6cdd1dULL));
    return CounterRng(RngSeed{k});
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next(); }

  result_type next() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_closed() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  /// Uniform phase e^{i theta}.
  std::complex<double> phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qcma
