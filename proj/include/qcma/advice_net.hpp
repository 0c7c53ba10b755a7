#pragma once

// Classical advice for marked-state search: an m-bit witness naming up to
// k = floor(m/(n+2)) basis states with quarter-turn phases, whose uniform
// superposition is guaranteed to overlap the target by sqrt(k/(2Nn)).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qcma/pure_state.hpp"

namespace qcma {

enum class QuarterPhase : std::uint8_t { kPlusOne = 0, kMinusOne = 1, kPlusI = 2, kMinusI = 3 };

Complex to_complex(QuarterPhase phase);

/// Nearest of {1, -1, i, -i} to the unit phase u; ties go to the earlier
/// element in that order.
QuarterPhase nearest_quarter_phase(Complex u);

struct AdviceEntry {
  std::uint32_t index = 0;
  QuarterPhase phase = QuarterPhase::kPlusOne;

  friend bool operator==(const AdviceEntry&, const AdviceEntry&) = default;
};

struct AdviceWitness {
  int n = 0;
  std::vector<AdviceEntry> entries;

  std::size_t t() const { return entries.size(); }
  std::size_t bit_length() const { return entries.size() * std::size_t(n + 2); }

  /// Throws ValidationError on an empty witness, out-of-range or duplicate indices.
  void validate() const;

  friend bool operator==(const AdviceWitness&, const AdviceWitness&) = default;
};

using Bits = std::vector<bool>;

std::string to_string(const Bits& bits);
Bits bits_from_string(const std::string& text);

/// k = floor(m / (n + 2)).
int witness_capacity(int n, int m);

/// The overlap every honest witness guarantees: sqrt(k / (2 N n)).
double guaranteed_overlap(int n, int m);

struct PrefixBound {
  int t = 0;
  double value = 0.0;
};

/// max over t in [1, k] of (x_1 + ... + x_t) / sqrt(t), smallest t on ties.
/// Input must be nonincreasing, nonnegative, and unit in l2 (within 1e-9).
PrefixBound prefix_bound(std::span<const double> sorted_mags, int k);

/// sqrt(k / (N ceil(log2 N))): the floor every profile clears.
double prefix_lower_bound(std::size_t dim, int k);

AdviceWitness encode_witness(const PureState& psi, int m);
PureState decode_witness(const AdviceWitness& w);

/// n index bits (most significant first) then 2 phase bits per entry.
Bits serialize(const AdviceWitness& w);
/// Inverse of serialize. Fewer than n+2 trailing bits are treated as padding
/// and must be zero.
AdviceWitness deserialize(const Bits& bits, int n);

/// Witness file: "QNET", version byte, n byte, t as big-endian u16, then the
/// packed bit string zero-padded to a byte boundary.
inline constexpr std::uint8_t kWitnessFileVersion = 1;
std::vector<std::uint8_t> witness_file_bytes(const AdviceWitness& w);
AdviceWitness parse_witness_file(std::span<const std::uint8_t> bytes);
void write_witness_file(const std::filesystem::path& path, const AdviceWitness& w);
AdviceWitness read_witness_file(const std::filesystem::path& path);

/// N^(3/2) log(2 + N h^2) / (1 - h^2)^N with the implied constant set to 1.
/// Order-of-magnitude only; may overflow to +inf for large N.
double net_size_bound(double dim, double h);
double log_net_size_bound(double dim, double h);

}  // namespace qcma
