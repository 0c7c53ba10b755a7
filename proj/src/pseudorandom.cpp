#include "qcma/pseudorandom.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

#include "qcma/measures.hpp"
#include "qcma/parallel.hpp"
#include "qcma/stats.hpp"

namespace qcma {

ClassicalOracle::ClassicalOracle(RngSeed seed, int n) : seed_(seed), n_(n) {
  if (n < 1 || n > 32) throw DimensionError("classical oracle output width must lie in [1, 32]");
}

std::shared_ptr<ClassicalOracle> ClassicalOracle::constant(int n, std::uint64_t value) {
  auto oracle = std::make_shared<ClassicalOracle>(RngSeed{0}, n);
  oracle->constant_ = value & ((std::uint64_t(1) << n) - 1);
  return oracle;
}

std::uint64_t ClassicalOracle::raw(std::uint64_t layer, std::uint64_t x) const {
  if (constant_) return *constant_ << (64 - n_);
  return mix64(mix64(seed_.value ^ mix64(layer + 0x632be59bd9b4e019ULL)) ^ (x * 0x9e3779b97f4a7c15ULL));
}

std::uint64_t ClassicalOracle::word(std::uint64_t layer, std::uint64_t x) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  return raw(layer, x);
}

std::uint64_t ClassicalOracle::value(std::uint64_t layer, std::uint64_t x) const {
  return word(layer, x) >> (64 - n_);
}

const std::vector<std::uint32_t>& ClassicalOracle::layer(std::uint64_t i) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(i); it != cache_.end()) return *it->second;
  }
  std::unique_lock lock(cache_mutex_);
  if (auto it = cache_.find(i); it != cache_.end()) return *it->second;
  if (n_ > kMaxQubits) throw DimensionError("layer tables are limited to the simulator register size");
  const std::size_t dim = std::size_t(1) << n_;
  auto values = std::make_unique<std::vector<std::uint32_t>>(dim);
  for (std::size_t x = 0; x < dim; ++x) (*values)[x] = std::uint32_t(raw(i, x) >> (64 - n_));
  evaluations_.fetch_add(dim, std::memory_order_relaxed);
  return *cache_.emplace(i, std::move(values)).first->second;
}

PureState apply_sigma_k(const PureState& state, const SigmaKSpec& spec) {
  if (spec.k < 0) throw ValidationError("layer count must be nonnegative");
  if (state.qubits() != spec.n) throw DimensionError("state does not match ensemble width");
  if (spec.k == 0) return state;
  if (!spec.oracle || spec.oracle->n() != spec.n) throw DimensionError("classical oracle width mismatch");
  const std::size_t dim = std::size_t(1) << spec.n;
  // omega^j for every exponent j mod 2^n; exponents never leave the integers.
  std::vector<Complex> roots(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * double(j) / double(dim));
  }
  PureState out = state;
  for (int i = 1; i <= spec.k; ++i) {
    out = apply_hadamard_layer(out);
    const auto& a = spec.oracle->layer(std::uint64_t(i));
    ComplexVector v = out.amplitudes();
    for (std::size_t x = 0; x < dim; ++x) v(Eigen::Index(x)) *= roots[a[x]];
    out = out.next(std::move(v));
  }
  return out;
}

PureState ensemble_sample(const EnsembleSpec& spec, RngSeed seed, std::uint64_t index) {
  CounterRng rng = CounterRng::stream(seed, {0x454e53ULL, std::uint64_t(spec.kind), std::uint64_t(spec.k), index});
  if (spec.kind == EnsembleKind::kHaar) return haar_sample<double>(spec.n, rng);
  const auto oracle = std::make_shared<const ClassicalOracle>(RngSeed{rng.next()}, spec.n);
  return apply_sigma_k(PureState::basis(spec.n, 0), SigmaKSpec{spec.n, spec.k, oracle});
}

double collision_of(const PureState& psi) { return psi.amplitudes().cwiseAbs2().squaredNorm(); }

CollisionEstimate collision_probability(const EnsembleSpec& spec, std::size_t samples, RngSeed seed, int threads) {
  if (samples < 1000) throw ValidationError("collision estimate needs at least 1000 samples");
  PureState::check_qubits(spec.n, kMaxQubits);
  std::vector<double> values(samples);
  parallel_for(samples, threads, [&](std::size_t i) { values[i] = collision_of(ensemble_sample(spec, seed, i)); });
  RunningStats acc;
  for (double v : values) acc.add(v);
  CollisionEstimate out;
  out.mean = acc.mean();
  out.stderr_of_mean = acc.stderr_of_mean();
  out.min = *std::min_element(values.begin(), values.end());
  out.max = *std::max_element(values.begin(), values.end());
  out.samples = samples;
  return out;
}

namespace {

double round_to_grid(double x, int q) { return std::ldexp(std::nearbyint(std::ldexp(x, q)), -q); }

}  // namespace

RandomStateAttempt random_state_attempt(int n, int q, const ClassicalOracle& oracle, std::uint64_t attempt,
                                        CounterRng& rng) {
  PureState::check_qubits(n, kMaxQubits);
  if (q < 1 || q > 1000) throw DomainError("precision q(n) must lie in [1, 1000]");
  const Eigen::Index dim = Eigen::Index(1) << n;
  const double sigma = std::sqrt(1.0 / (2.0 * double(q)));
  const double amp = 1.0 / std::sqrt(double(dim));
  ComplexVector v(2 * dim);
  double flag = 0.0;
  for (Eigen::Index x = 0; x < dim; ++x) {
    const double u1 = double((oracle.word(2 * attempt, std::uint64_t(x)) >> 11) + 1) * 0x1.0p-53;
    const double u2 = double(oracle.word(2 * attempt + 1, std::uint64_t(x)) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1)) * sigma;
    Complex alpha(round_to_grid(r * std::cos(2.0 * std::numbers::pi * u2), q),
                  round_to_grid(r * std::sin(2.0 * std::numbers::pi * u2), q));
    if (std::abs(alpha) > 1.0) alpha /= std::abs(alpha);
    const double a2 = std::min(1.0, std::norm(alpha));
    v(x) = amp * std::sqrt(1.0 - a2);
    v(x + dim) = amp * alpha;
    flag += a2;
  }
  RandomStateAttempt out;
  out.flag_probability = flag / double(dim);
  const PureState joint(std::move(v));
  const int idx[] = {n};
  const auto m = measure_register(joint, std::span<const int>(idx), rng);
  out.flagged = m.outcome == 1;
  if (out.flagged) out.state = PureState::normalized(m.collapsed.amplitudes().tail(dim));
  return out;
}

RandomStateResult prepare_random_state(int n, int p_value, const ClassicalOracle& oracle, RngSeed seed,
                                       int max_attempts) {
  if (max_attempts < 1) throw ValidationError("max_attempts must be at least 1");
  if (p_value < 0) throw DomainError("precision polynomial must be nonnegative");
  const int q = precision_bits(n, p_value);
  CounterRng rng = CounterRng::stream(seed, {0x52534dULL, std::uint64_t(n), std::uint64_t(p_value)});
  RandomStateResult out;
  for (int a = 0; a < max_attempts; ++a) {
    ++out.attempts;
    auto attempt = random_state_attempt(n, q, oracle, std::uint64_t(a), rng);
    if (attempt.flagged) {
      out.state = std::move(attempt.state);
      break;
    }
  }
  return out;
}

bool SmoothingReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const StatisticCheck& c) { return c.pass; });
}

const StatisticCheck& SmoothingReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no statistic named " + name);
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double fourth = 0.0;  // central fourth moment
  double n = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = double(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= m.n;
  for (double x : xs) {
    const double d = x - m.mean;
    m.var += d * d;
    m.fourth += d * d * d * d;
  }
  m.fourth /= m.n;
  m.var /= std::max(1.0, m.n - 1.0);
  return m;
}

}  // namespace

SmoothingReport smoothing_distance_proxy(const std::vector<PureState>& a, const std::vector<PureState>& b,
                                         double epsilon) {
  if (a.empty() || b.empty()) throw ValidationError("both ensembles need at least one state");
  if (!(epsilon >= 0.0) || epsilon > 1.0) throw DomainError("epsilon must lie in [0, 1]");
  const Eigen::Index dim = a.front().dim();
  for (const auto& s : a) {
    if (s.dim() != dim) throw DimensionError("ensemble states differ in dimension");
  }
  for (const auto& s : b) {
    if (s.dim() != dim) throw DimensionError("ensemble states differ in dimension");
  }
  const double trace_dist = std::sqrt(std::max(0.0, 2.0 * epsilon - epsilon * epsilon));
  const double z = bonferroni_z(0.0027, std::size_t(2 * dim + 1));

  SmoothingReport report;
  auto compare = [&](const std::string& name, const std::vector<double>& xa, const std::vector<double>& xb,
                     bool second_moment, double slack) {
    const Moments ma = moments(xa);
    const Moments mb = moments(xb);
    double diff, se;
    if (!second_moment) {
      diff = std::abs(ma.mean - mb.mean);
      se = std::sqrt(ma.var / ma.n + mb.var / mb.n);
    } else {
      diff = std::abs(ma.var - mb.var);
      se = std::sqrt(std::max(0.0, ma.fourth - ma.var * ma.var) / ma.n +
                     std::max(0.0, mb.fourth - mb.var * mb.var) / mb.n);
      slack = 4.0 * trace_dist * std::sqrt(std::max(ma.var, mb.var)) + 4.0 * trace_dist * trace_dist;
    }
    const double threshold = z * se + slack;
    report.checks.push_back({name, diff, threshold, diff <= threshold});
  };

  std::vector<double> xa(a.size()), xb(b.size());
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (std::size_t i = 0; i < a.size(); ++i) xa[i] = std::norm(a[i][x]);
    for (std::size_t i = 0; i < b.size(); ++i) xb[i] = std::norm(b[i][x]);
    compare("mean[" + std::to_string(x) + "]", xa, xb, false, trace_dist);
    compare("variance[" + std::to_string(x) + "]", xa, xb, true, 0.0);
  }
  for (std::size_t i = 0; i < a.size(); ++i) xa[i] = collision_of(a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) xb[i] = collision_of(b[i]);
  compare("collision", xa, xb, false, 4.0 * trace_dist);
  return report;
}

AffineReport check_affine_family(const std::vector<ComplexMatrix>& family) {
  AffineReport report;
  if (family.empty()) return report;
  const Eigen::Index dim = family.front().rows();
  for (const auto& e : family) {
    if (e.rows() != dim || e.cols() != dim) throw DimensionError("family matrices must be square and equal-sized");
  }
  report.dim = std::size_t(dim);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& e = family[i];
    if (e.norm() > kAffineTolerance) ++report.nonzero_count;
    const double self = (e * e.adjoint() + e + e.adjoint()).norm();
    if (self > kAffineTolerance) {
      report.self_relations_hold = false;
      report.violations.push_back({AffineViolation::Kind::kSelf, i, i, self});
    }
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double pair = (e * family[j].adjoint() + family[j] * e.adjoint()).norm();
      if (pair > kAffineTolerance) {
        report.pair_relations_hold = false;
        report.violations.push_back({AffineViolation::Kind::kPair, i, j, pair});
      }
    }
  }
  report.size_bound_holds = report.nonzero_count <= 2 * report.dim;
  report.log2_distinct_values = double(report.nonzero_count);
  return report;
}

ComplexMatrix affine_unitary(const std::vector<ComplexMatrix>& family, const std::vector<bool>& bits) {
  if (family.empty()) throw ValidationError("empty family");
  if (bits.size() != family.size()) throw DimensionError("one bit per family member");
  const Eigen::Index dim = family.front().rows();
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) u += family[i];
  }
  return u;
}

std::vector<ComplexMatrix> diagonal_example_family() {
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2), e2 = ComplexMatrix::Zero(2, 2);
  e1(0, 0) = -2.0;
  e2(1, 1) = -2.0;
  return {e1, e2};
}

std::vector<ComplexMatrix> pauli_family() {
  const Complex i(0.0, 1.0);
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2), ii(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -i, i, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  ii << i, 0.0, 0.0, i;
  return {x, y, z, ii};
}

std::vector<ComplexMatrix> phase_diagonal_family(std::size_t dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  std::vector<ComplexMatrix> out;
  for (std::size_t j = 0; j < dim; ++j) {
    for (const Complex c : {Complex(-1.0, 1.0), Complex(-1.0, -1.0)}) {
      ComplexMatrix e = ComplexMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
      e(Eigen::Index(j), Eigen::Index(j)) = c;
      out.push_back(std::move(e));
    }
  }
  return out;
}

ComplexMatrix haar_unitary(std::size_t dim, CounterRng& rng) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  const auto d = Eigen::Index(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix random_self_consistent_member(std::size_t dim, CounterRng& rng) {
  const auto d = Eigen::Index(dim);
  return haar_unitary(dim, rng) - ComplexMatrix::Identity(d, d);
}

}  // namespace qcma
