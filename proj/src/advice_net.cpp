#include "qcma/advice_net.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <unordered_set>

namespace qcma {

namespace {

constexpr std::array<QuarterPhase, 4> kPhaseOrder = {
    QuarterPhase::kPlusOne, QuarterPhase::kMinusOne, QuarterPhase::kPlusI, QuarterPhase::kMinusI};

int ceil_log2(std::size_t x) {
  int l = 0;
  while ((std::size_t(1) << l) < x) ++l;
  return l;
}

}  // namespace

Complex to_complex(QuarterPhase phase) {
  switch (phase) {
    case QuarterPhase::kPlusOne: return {1.0, 0.0};
    case QuarterPhase::kMinusOne: return {-1.0, 0.0};
    case QuarterPhase::kPlusI: return {0.0, 1.0};
    case QuarterPhase::kMinusI: return {0.0, -1.0};
  }
  return {1.0, 0.0};
}

QuarterPhase nearest_quarter_phase(Complex u) {
  std::array<double, 4> d{};
  for (std::size_t i = 0; i < 4; ++i) d[i] = std::abs(u - to_complex(kPhaseOrder[i]));
  const double best = *std::min_element(d.begin(), d.end());
  for (std::size_t i = 0; i < 4; ++i) {
    if (d[i] <= best + 1e-12) return kPhaseOrder[i];
  }
  return QuarterPhase::kPlusOne;
}

void AdviceWitness::validate() const {
  if (n < 1 || n > kMaxQubits) throw ValidationError("witness qubit count out of range");
  if (entries.empty()) throw ValidationError("witness has no entries");
  std::unordered_set<std::uint32_t> seen;
  for (const auto& e : entries) {
    if (e.index >= (std::uint32_t(1) << n)) throw ValidationError("witness index out of range");
    if (!seen.insert(e.index).second) throw ValidationError("duplicate witness index");
  }
}

std::string to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Bits bits_from_string(const std::string& text) {
  Bits bits;
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(c == '1');
    } else if (c != ' ' && c != '_') {
      throw ValidationError("bit string may only contain 0, 1, spaces and underscores");
    }
  }
  return bits;
}

int witness_capacity(int n, int m) { return m / (n + 2); }

double guaranteed_overlap(int n, int m) {
  const double dim = std::ldexp(1.0, n);
  const double k = std::min<double>(witness_capacity(n, m), dim);
  return std::sqrt(k / (2.0 * dim * n));
}

PrefixBound prefix_bound(std::span<const double> sorted_mags, int k) {
  const std::size_t dim = sorted_mags.size();
  if (k < 1 || std::size_t(k) > dim) throw ValidationError("k must lie in [1, N]");
  double sq = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (sorted_mags[i] < 0.0) throw ValidationError("magnitudes must be nonnegative");
    if (i > 0 && sorted_mags[i] > sorted_mags[i - 1]) {
      throw ValidationError("magnitudes must be nonincreasing");
    }
    sq += sorted_mags[i] * sorted_mags[i];
  }
  if (std::abs(sq - 1.0) > 1e-9) throw ValidationError("squared magnitudes must sum to 1");

  PrefixBound best{1, sorted_mags[0]};
  double prefix = 0.0;
  for (int t = 1; t <= k; ++t) {
    prefix += sorted_mags[std::size_t(t - 1)];
    const double value = prefix / std::sqrt(double(t));
    if (value > best.value) best = {t, value};
  }
  return best;
}

double prefix_lower_bound(std::size_t dim, int k) {
  const int l = std::max(1, ceil_log2(dim));
  return std::sqrt(double(k) / (double(dim) * l));
}

AdviceWitness encode_witness(const PureState& psi, int m) {
  const int n = psi.qubits();
  const int k = witness_capacity(n, m);
  if (k < 1) throw ValidationError("bit budget m must be at least n + 2");
  const auto& amps = psi.amplitudes();
  const std::size_t dim = std::size_t(amps.size());

  std::vector<std::uint32_t> order(dim);
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::abs(amps(a)) > std::abs(amps(b));
  });
  std::vector<double> mags(dim);
  for (std::size_t i = 0; i < dim; ++i) mags[i] = std::abs(amps(order[i]));
  // Renormalize the profile so rounding in |alpha| never trips the unit check.
  const double norm = std::sqrt(std::inner_product(mags.begin(), mags.end(), mags.begin(), 0.0));
  for (double& x : mags) x /= norm;

  int t = prefix_bound(mags, std::min<int>(k, int(dim))).t;
  while (t > 1 && mags[std::size_t(t - 1)] == 0.0) --t;

  AdviceWitness w{n, {}};
  for (int i = 0; i < t; ++i) {
    const std::uint32_t z = order[std::size_t(i)];
    const Complex a = amps(z);
    w.entries.push_back({z, nearest_quarter_phase(a / std::abs(a))});
  }
  return w;
}

PureState decode_witness(const AdviceWitness& w) {
  w.validate();
  ComplexVector v = ComplexVector::Zero(Eigen::Index(1) << w.n);
  const double s = 1.0 / std::sqrt(double(w.t()));
  for (const auto& e : w.entries) v(e.index) = s * to_complex(e.phase);
  return PureState(std::move(v));
}

Bits serialize(const AdviceWitness& w) {
  w.validate();
  Bits bits;
  bits.reserve(w.bit_length());
  for (const auto& e : w.entries) {
    for (int b = w.n - 1; b >= 0; --b) bits.push_back((e.index >> b) & 1U);
    const auto code = static_cast<std::uint8_t>(e.phase);
    bits.push_back(code & 2U);
    bits.push_back(code & 1U);
  }
  return bits;
}

AdviceWitness deserialize(const Bits& bits, int n) {
  if (n < 1 || n > kMaxQubits) throw ValidationError("witness qubit count out of range");
  const std::size_t width = std::size_t(n + 2);
  const std::size_t whole = bits.size() / width * width;
  for (std::size_t i = whole; i < bits.size(); ++i) {
    if (bits[i]) throw ValidationError("malformed witness length: nonzero trailing bits");
  }
  AdviceWitness w{n, {}};
  for (std::size_t off = 0; off < whole; off += width) {
    std::uint32_t index = 0;
    for (int b = 0; b < n; ++b) index = (index << 1) | (bits[off + std::size_t(b)] ? 1U : 0U);
    const std::uint8_t code = std::uint8_t((bits[off + width - 2] ? 2U : 0U) |
                                           (bits[off + width - 1] ? 1U : 0U));
    w.entries.push_back({index, static_cast<QuarterPhase>(code)});
  }
  w.validate();
  return w;
}

std::vector<std::uint8_t> witness_file_bytes(const AdviceWitness& w) {
  const Bits bits = serialize(w);
  if (w.t() > 0xFFFF) throw ValidationError("too many witness entries for the file format");
  std::vector<std::uint8_t> out = {'Q', 'N', 'E', 'T', kWitnessFileVersion, std::uint8_t(w.n),
                                   std::uint8_t(w.t() >> 8), std::uint8_t(w.t() & 0xFF)};
  std::uint8_t byte = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    byte = std::uint8_t(byte | (bits[i] ? 1U << (7 - i % 8) : 0U));
    if (i % 8 == 7) {
      out.push_back(byte);
      byte = 0;
    }
  }
  if (bits.size() % 8 != 0) out.push_back(byte);
  return out;
}

AdviceWitness parse_witness_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || bytes[0] != 'Q' || bytes[1] != 'N' || bytes[2] != 'E' || bytes[3] != 'T') {
    throw ValidationError("missing QNET header");
  }
  if (bytes[4] != kWitnessFileVersion) throw ValidationError("unsupported witness file version");
  const int n = bytes[5];
  const std::size_t t = (std::size_t(bytes[6]) << 8) | bytes[7];
  const std::size_t nbits = t * std::size_t(n + 2);
  if (bytes.size() != 8 + (nbits + 7) / 8) throw ValidationError("witness payload length mismatch");
  Bits bits(nbits);
  for (std::size_t i = 0; i < nbits; ++i) bits[i] = (bytes[8 + i / 8] >> (7 - i % 8)) & 1U;
  for (std::size_t i = nbits; i < (bytes.size() - 8) * 8; ++i) {
    if ((bytes[8 + i / 8] >> (7 - i % 8)) & 1U) throw ValidationError("nonzero padding bits");
  }
  AdviceWitness w = deserialize(bits, n);
  if (w.t() != t) throw ValidationError("entry count mismatch");
  return w;
}

void write_witness_file(const std::filesystem::path& path, const AdviceWitness& w) {
  const auto bytes = witness_file_bytes(w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

AdviceWitness read_witness_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_witness_file(bytes);
}

double log_net_size_bound(double dim, double h) {
  if (!(h > 0.0) || !(h < 1.0)) throw DomainError("net radius h must lie in (0, 1)");
  if (dim < 1.0) throw DomainError("dimension must be positive");
  return 1.5 * std::log(dim) + std::log(std::log(2.0 + dim * h * h)) - dim * std::log1p(-h * h);
}

double net_size_bound(double dim, double h) { return std::exp(log_net_size_bound(dim, h)); }

}  // namespace qcma
