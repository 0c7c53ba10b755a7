#include "qcma/group/homomorphism.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qcma/errors.hpp"

namespace qcma::group {

RawHom::RawHom(std::shared_ptr<const ExplicitGroup> model, std::vector<Element> gammas, std::vector<Label> g_labels,
               OracleOps& ops)
    : model_(std::move(model)), decomposer_(model_, std::move(gammas)), labels_(std::move(g_labels)), ops_(ops) {
  if (labels_.size() != decomposer_.gens().size()) throw ValidationError("one label per model generator");
}

Label RawHom::operator()(Element gamma) {
  if (auto it = memo_.find(gamma); it != memo_.end()) return it->second;
  const std::vector<bool> bits = decomposer_.decompose(gamma);
  std::optional<Label> acc;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    acc = acc ? ops_.multiply(*acc, labels_[i]) : labels_[i];
  }
  const Label value = acc ? *acc : ops_.identity();
  memo_.emplace(gamma, value);
  return value;
}

HomTestResult homomorphism_test(const LabelMap& f, const ExplicitGroup& model, OracleOps& ops, int trials,
                                CounterRng& rng) {
  if (trials < 1) throw ValidationError("homomorphism test needs at least one trial");
  HomTestResult out;
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto x = Element(rng.below(model.order()));
    const auto y = Element(rng.below(model.order()));
    const Label lhs = f(model.multiply(x, y));
    const Label rhs = ops.multiply(f(x), f(y));
    if (lhs != rhs || lhs == ops.invalid()) ++out.failures;
  }
  out.accepted = out.failures == 0;
  return out;
}

CorrectedHom::CorrectedHom(RawHom& base, int repetition) : base_(base), r_(repetition) {
  if (repetition < 1) throw ValidationError("repetition must be positive");
}

Label CorrectedHom::operator()(Element gamma, CounterRng& rng) {
  const ExplicitGroup& g = base_.model();
  if (!g.contains(gamma)) throw ValidationError("element id out of range");
  ++evaluations_;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::map<Label, int> tally;
    for (int s = 0; s < 8 * r_; ++s) {
      const auto z = Element(rng.below(g.order()));
      const Label v = base_.ops().multiply(base_(z), base_(g.multiply(g.inverse(z), gamma)));
      ++tally[v];
    }
    int best = 0, second = 0;
    Label winner = 0;
    for (const auto& [label, count] : tally) {
      if (count > best) {
        second = best;
        best = count;
        winner = label;
      } else if (count > second) {
        second = count;
      }
    }
    if (best > second) return winner;
  }
  throw ProtocolError("self-correction found no strict plurality");
}

std::size_t default_kernel_samples(std::uint32_t order) {
  std::size_t l = 0;
  while ((std::uint64_t(1) << l) < order) ++l;
  return std::max<std::size_t>(16, l * l);
}

namespace {

/// Left-coset index of every element for subgroup k.
std::vector<std::uint32_t> coset_index(const ExplicitGroup& g, const ElementSet& k) {
  std::vector<std::uint32_t> idx(g.order(), ~0U);
  const auto ks = members(k);
  std::uint32_t next = 0;
  for (Element h = 0; h < g.order(); ++h) {
    if (idx[h] != ~0U) continue;
    for (Element x : ks) idx[g.multiply(h, x)] = next;
    ++next;
  }
  return idx;
}

}  // namespace

KernelReport kernel_triviality(CorrectedHom& corrected, KernelMode mode, CounterRng& rng, std::size_t samples) {
  RawHom& base = corrected.base();
  const ExplicitGroup& g = base.model();
  OracleOps& ops = base.ops();
  KernelReport report;
  report.mode = mode;
  const std::size_t order = g.order();

  if (mode == KernelMode::kExhaustive) {
    const std::uint64_t before = ops.oracle().queries();
    std::vector<Label> table(order);
    for (Element a = 0; a < order; ++a) table[a] = corrected(a, rng);
    report.kernel.assign(order, false);
    for (Element a = 0; a < order; ++a) report.kernel[a] = table[a] == table[g.identity()];
    std::vector<Label> sorted = table;
    std::sort(sorted.begin(), sorted.end());
    report.trivial = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    report.corrected_evaluations = order;
    report.charged_queries = ops.oracle().queries() - before;
    report.samples = order;
    return report;
  }

  std::vector<Label> table(order);
  {
    OracleOps::UncountedScope scope(ops);
    for (Element a = 0; a < order; ++a) table[a] = corrected(a, rng);
  }
  const auto& candidates = g.normal_subgroups();
  std::vector<std::vector<std::uint32_t>> cosets;
  cosets.reserve(candidates.size());
  for (const auto& k : candidates) cosets.push_back(coset_index(g, k));

  const std::size_t base_samples = samples > 0 ? samples : default_kernel_samples(g.order());
  const std::uint64_t cost = corrected.max_eval_cost();
  std::vector<double> v(order), pv(order), sums;
  for (int round = 0; round < 2; ++round) {
    const std::size_t count = round == 0 ? base_samples : 2 * base_samples;
    std::vector<bool> survived(candidates.size(), true);
    for (std::size_t s = 0; s < count; ++s) {
      ops.oracle().charge(cost);
      report.charged_queries += cost;
      ++report.corrected_evaluations;
      ++report.samples;
      // Image-register outcome: a uniform element's image; the first
      // register collapses to the uniform superposition over its preimage.
      const Label image = table[rng.below(order)];
      double mass = 0.0;
      for (std::size_t a = 0; a < order; ++a) mass += (v[a] = table[a] == image ? 1.0 : 0.0);
      for (double& x : v) x /= std::sqrt(mass);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& idx = cosets[c];
        const std::size_t ksize = subgroup_size(candidates[c]);
        sums.assign(order / ksize, 0.0);
        for (std::size_t a = 0; a < order; ++a) sums[idx[a]] += v[a];
        double p = 0.0;
        for (std::size_t a = 0; a < order; ++a) {
          pv[a] = sums[idx[a]] / double(ksize);
          p += pv[a] * pv[a];
        }
        double rest = 0.0;
        for (std::size_t a = 0; a < order; ++a) rest += (v[a] - pv[a]) * (v[a] - pv[a]);
        const bool pass = rest < 1e-20 || rng.uniform() < p;
        if (pass) {
          const double n = std::sqrt(p);
          for (std::size_t a = 0; a < order; ++a) v[a] = pv[a] / n;
        } else {
          survived[c] = false;
          const double n = std::sqrt(rest);
          for (std::size_t a = 0; a < order; ++a) v[a] = (v[a] - pv[a]) / n;
        }
      }
    }
    std::vector<std::size_t> maximal;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!survived[c]) continue;
      bool dominated = false;
      for (std::size_t d = 0; d < candidates.size() && !dominated; ++d) {
        if (d == c || !survived[d] || subgroup_size(candidates[d]) <= subgroup_size(candidates[c])) continue;
        bool contains = true;
        for (std::size_t a = 0; a < order && contains; ++a) contains = !candidates[c][a] || candidates[d][a];
        dominated = contains;
      }
      if (!dominated) maximal.push_back(c);
    }
    if (maximal.size() == 1) {
      report.kernel = candidates[maximal.front()];
      report.trivial = subgroup_size(report.kernel) == 1;
      return report;
    }
    report.resampled = true;
  }
  throw ProtocolError("coset sampling left an ambiguous kernel");
}

}  // namespace qcma::group
