#include "qcma/group/gnm.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qcma/errors.hpp"

namespace qcma::group {

using nlohmann::json;

std::string GnmWitness::to_json() const {
  json j;
  j["catalog_id"] = model.catalog_id();
  j["params"] = model.params;
  j["k"] = gammas.size();
  j["gammas"] = gammas;
  std::vector<std::string> hex;
  for (Label l : g_labels) hex.push_back(hex_label(l));
  j["g_labels"] = hex;
  j["z"] = z;
  j["lambdas"] = lambdas;
  return j.dump();
}

GnmWitness GnmWitness::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("witness is not valid JSON: ") + e.what());
  }
  static const std::vector<std::string> keys = {"catalog_id", "params", "k", "gammas", "g_labels", "z", "lambdas"};
  if (!j.is_object()) throw ValidationError("witness must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ValidationError("unknown witness field '" + key + "'");
  }
  try {
    GnmWitness w;
    w.model = GroupDescriptor::parse(j.at("catalog_id").get<std::string>(), j.at("params").get<std::vector<int>>());
    w.gammas = j.at("gammas").get<std::vector<Element>>();
    if (j.at("k").get<std::size_t>() != w.gammas.size()) throw ValidationError("k does not match the gamma count");
    for (const auto& s : j.at("g_labels").get<std::vector<std::string>>()) w.g_labels.push_back(parse_hex_label(s));
    w.z = j.at("z").get<Element>();
    w.lambdas = j.at("lambdas").get<std::vector<Element>>();
    return w;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed witness field: ") + e.what());
  }
}

std::vector<Element> subgroup_generators(const ExplicitGroup& group, const ElementSet& subgroup) {
  std::vector<Element> gens;
  ElementSet current = group.closure({});
  for (Element a = 0; a < group.order(); ++a) {
    if (subgroup.at(a) && !current[a]) {
      gens.push_back(a);
      current = group.closure(gens);
    }
  }
  return gens;
}

namespace {

int smallest_prime_factor(int n) {
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) return p;
  }
  return n;
}

Element element_order_pick(const ExplicitGroup& g, const ElementSet& mask, bool inside, int wanted_order) {
  for (Element a = 1; a < g.order(); ++a) {
    if (mask[a] != inside) continue;
    Element p = a;
    int ord = 1;
    while (p != g.identity()) {
      p = g.multiply(p, a);
      ++ord;
    }
    if (ord == wanted_order) return a;
  }
  return g.identity();
}

Element random_outside(const ExplicitGroup& g, const ElementSet& lambda, CounterRng& rng, Element fallback) {
  std::vector<Element> outside;
  for (Element a = 0; a < g.order(); ++a) {
    if (!lambda[a]) outside.push_back(a);
  }
  return outside.empty() ? fallback : outside[rng.below(outside.size())];
}

}  // namespace

GnmInstance make_instance(const GroupDescriptor& descriptor, bool x_in_h, RngSeed seed, int label_bits) {
  GnmInstance inst;
  inst.group = ExplicitGroup::make(descriptor);
  inst.name = descriptor.name();
  inst.x_in_h = x_in_h;
  const ExplicitGroup& g = *inst.group;
  switch (descriptor.family) {
    case Family::kCyclic: {
      const int n = descriptor.params[0];
      if (n < 2) throw ValidationError("cyclic instance needs n >= 2");
      const int p = smallest_prime_factor(n);
      inst.h_gens = {Element(p % n)};
      inst.x = x_in_h ? Element(p % n) : 1;
      break;
    }
    case Family::kDihedral: {
      const int n = descriptor.params[0];
      inst.h_gens = {Element(1 % n)};
      inst.x = x_in_h ? Element(1 % n) : Element(n);
      break;
    }
    case Family::kSymmetric: {
      if (descriptor.params[0] < 2) throw ValidationError("symmetric instance needs n >= 2");
      std::vector<Element> squares;
      for (Element a = 0; a < g.order(); ++a) squares.push_back(g.multiply(a, a));
      const ElementSet alt = g.closure(squares);
      inst.h_gens = subgroup_generators(g, alt);
      inst.x = x_in_h ? element_order_pick(g, alt, true, 3) : element_order_pick(g, alt, false, 2);
      break;
    }
    case Family::kProduct: {
      const int a = descriptor.params[0];
      if (a < 2) throw ValidationError("product instance needs a >= 2");
      inst.h_gens = {Element(a % int(g.order()))};
      inst.x = x_in_h ? Element(a % int(g.order())) : 1;
      break;
    }
    case Family::kQuaternion:
      inst.h_gens = {2};
      inst.x = x_in_h ? 1 : 4;
      break;
    case Family::kAlternating:
      throw ValidationError("no standard non-membership instance for alternating groups");
  }
  const int bits = label_bits > 0 ? label_bits : default_label_bits(g.order());
  inst.oracle = make_group_oracle(inst.group, bits, seed);
  for (Element h : inst.h_gens) inst.h_labels.push_back(inst.oracle->label_of(h));
  inst.x_label = inst.oracle->label_of(inst.x);
  return inst;
}

std::vector<GroupDescriptor> gnm_catalog() {
  std::vector<GroupDescriptor> out;
  for (int n = 2; n <= 64; ++n) out.push_back({Family::kCyclic, {n}});
  for (int n = 2; n <= 16; ++n) out.push_back({Family::kDihedral, {n}});
  for (int n = 3; n <= 5; ++n) out.push_back({Family::kSymmetric, {n}});
  out.push_back({Family::kProduct, {2, 4}});
  out.push_back({Family::kQuaternion, {}});
  return out;
}

GnmWitness honest_witness(const GnmInstance& instance, RngSeed seed) {
  GnmWitness w;
  w.model = instance.group->descriptor();
  w.gammas = efficient_generating_set(*instance.group, seed);
  for (Element g : w.gammas) w.g_labels.push_back(instance.oracle->label_of(g));
  w.z = instance.x;
  w.lambdas = instance.h_gens;
  return w;
}

std::string to_string(CheatStrategy s) {
  switch (s) {
    case CheatStrategy::kClaimTarget: return "claim-target";
    case CheatStrategy::kWrongTarget: return "wrong-target";
    case CheatStrategy::kRandomImages: return "random-images";
    case CheatStrategy::kShuffledImages: return "shuffled-images";
    case CheatStrategy::kNonInjective: return "non-injective";
    case CheatStrategy::kRandomWitness: return "random-witness";
  }
  return "?";
}

namespace {

struct Cover {
  GroupDescriptor model;
  std::function<Element(Element)> project;
};

std::optional<Cover> double_cover(const GroupDescriptor& d) {
  switch (d.family) {
    case Family::kCyclic: {
      const int n = d.params[0];
      if (2 * n > int(kMaxGroupOrder)) return std::nullopt;
      return Cover{{Family::kCyclic, {2 * n}}, [n](Element a) { return Element(int(a) % n); }};
    }
    case Family::kDihedral: {
      const int n = d.params[0];
      if (4 * n > int(kMaxGroupOrder)) return std::nullopt;
      return Cover{{Family::kDihedral, {2 * n}},
                   [n](Element a) { return Element(int(a) % (2 * n) % n + n * (int(a) / (2 * n))); }};
    }
    case Family::kProduct: {
      const int a = d.params[0], b = d.params[1];
      if (4 * a * b > int(kMaxGroupOrder)) return std::nullopt;
      return Cover{{Family::kProduct, {a, 2 * b}},
                   [a, b](Element e) { return Element(int(e) % a + a * ((int(e) / a) % b)); }};
    }
    default: return std::nullopt;
  }
}

}  // namespace

GnmWitness cheating_witness(const GnmInstance& inst, CheatStrategy strategy, RngSeed seed) {
  CounterRng rng = CounterRng::stream(seed, {0x63686561ULL, std::uint64_t(strategy)});
  const ExplicitGroup& g = *inst.group;
  const GroupOracle& oracle = *inst.oracle;
  const ElementSet lambda = g.closure(inst.h_gens);
  GnmWitness w = honest_witness(inst, RngSeed{rng.next()});
  auto random_label = [&] { return oracle.label_of(Element(rng.below(g.order()))); };

  switch (strategy) {
    case CheatStrategy::kClaimTarget:
      break;
    case CheatStrategy::kWrongTarget:
      w.z = random_outside(g, lambda, rng, inst.x);
      break;
    case CheatStrategy::kRandomImages:
      w.z = random_outside(g, lambda, rng, inst.x);
      for (Label& l : w.g_labels) l = random_label();
      break;
    case CheatStrategy::kShuffledImages:
      w.z = random_outside(g, lambda, rng, inst.x);
      if (w.g_labels.size() >= 2) {
        std::rotate(w.g_labels.begin(), w.g_labels.begin() + 1, w.g_labels.end());
      } else {
        for (Label& l : w.g_labels) l = random_label();
      }
      break;
    case CheatStrategy::kNonInjective: {
      const auto cover = double_cover(g.descriptor());
      if (!cover) {
        w.z = random_outside(g, lambda, rng, inst.x);
        break;
      }
      const auto big = ExplicitGroup::make(cover->model);
      w.model = cover->model;
      w.gammas = efficient_generating_set(*big, RngSeed{rng.next()});
      w.g_labels.clear();
      for (Element e : w.gammas) w.g_labels.push_back(oracle.label_of(cover->project(e)));
      auto preimage = [&](Element target) {
        std::vector<Element> pre;
        for (Element e = 0; e < big->order(); ++e) {
          if (cover->project(e) == target) pre.push_back(e);
        }
        return pre[rng.below(pre.size())];
      };
      for (int attempt = 0; attempt < 64; ++attempt) {
        w.lambdas.clear();
        for (Element h : inst.h_gens) w.lambdas.push_back(preimage(h));
        w.z = preimage(inst.x);
        if (!model_membership(*big, w.lambdas, w.z)) break;
      }
      break;
    }
    case CheatStrategy::kRandomWitness: {
      const std::size_t bound = generating_set_bound(g.order());
      w.gammas.assign(1 + rng.below(bound), 0);
      w.g_labels.assign(w.gammas.size(), 0);
      for (std::size_t i = 0; i < w.gammas.size(); ++i) {
        w.gammas[i] = Element(rng.below(g.order()));
        w.g_labels[i] = random_label();
      }
      w.z = Element(rng.below(g.order()));
      for (Element& l : w.lambdas) l = Element(rng.below(g.order()));
      break;
    }
  }
  return w;
}

std::string to_string(GnmStep step) {
  switch (step) {
    case GnmStep::kNone: return "none";
    case GnmStep::kStructure: return "structure";
    case GnmStep::kGeneratingSet: return "1-generating-set";
    case GnmStep::kMembership: return "2-membership";
    case GnmStep::kHomomorphismTest: return "3a-homomorphism-test";
    case GnmStep::kGeneratorImages: return "3a-generator-images";
    case GnmStep::kTargetImages: return "3b-target-images";
    case GnmStep::kKernel: return "3c-kernel";
    case GnmStep::kProtocol: return "protocol";
  }
  return "?";
}

GnmReport gnm_verify(const BlackBoxOracle& oracle, const std::vector<Label>& h_labels, Label x_label,
                     const GnmWitness& witness, const GnmOptions& options, CounterRng& rng) {
  GnmReport report;
  const std::uint64_t start = oracle.queries();
  auto finish = [&](GnmStep step, std::string reason, const OracleOps* ops) {
    report.failed_step = step;
    report.accepted = step == GnmStep::kNone;
    report.reason = std::move(reason);
    report.queries = oracle.queries() - start;
    if (ops && options.record_transcript) report.transcript_csv = ops->transcript_csv();
    return report;
  };

  std::shared_ptr<const ExplicitGroup> model;
  try {
    model = ExplicitGroup::make(witness.model);
  } catch (const ValidationError& e) {
    return finish(GnmStep::kStructure, e.what(), nullptr);
  }
  if (oracle.label_bits() < 63 && model->order() >= (std::uint64_t(1) << oracle.label_bits())) {
    return finish(GnmStep::kStructure, "model larger than the label space", nullptr);
  }
  const auto in_range = [&](Element e) { return model->contains(e); };
  if (witness.g_labels.size() != witness.gammas.size()) {
    return finish(GnmStep::kStructure, "label count differs from generator count", nullptr);
  }
  if (witness.gammas.size() > generating_set_bound(model->order())) {
    return finish(GnmStep::kStructure, "too many generators", nullptr);
  }
  if (witness.lambdas.size() != h_labels.size()) {
    return finish(GnmStep::kStructure, "one lambda per subgroup generator required", nullptr);
  }
  if (!std::all_of(witness.gammas.begin(), witness.gammas.end(), in_range) ||
      !std::all_of(witness.lambdas.begin(), witness.lambdas.end(), in_range) || !in_range(witness.z)) {
    return finish(GnmStep::kStructure, "model element id out of range", nullptr);
  }

  OracleOps ops(oracle, x_label);
  ops.record_transcript(options.record_transcript);
  if (ops.identity() == ops.invalid()) return finish(GnmStep::kStructure, "target label is not valid", &ops);

  ops.set_step("1");
  if (!is_efficient_generating_set(*model, witness.gammas)) {
    return finish(GnmStep::kGeneratingSet, "gammas do not form an efficient generating set", &ops);
  }
  ops.set_step("2");
  if (model_membership(*model, witness.lambdas, witness.z)) {
    return finish(GnmStep::kMembership, "z lies in the model subgroup", &ops);
  }

  try {
    ops.set_step("3a");
    RawHom f(model, witness.gammas, witness.g_labels, ops);
    const auto test = homomorphism_test([&f](Element e) { return f(e); }, *model, ops, options.hom_trials, rng);
    if (!test.accepted) {
      return finish(GnmStep::kHomomorphismTest, std::to_string(test.failures) + " failed pairs", &ops);
    }
    CorrectedHom corrected(f, options.repetition);
    for (std::size_t i = 0; i < witness.gammas.size(); ++i) {
      if (corrected(witness.gammas[i], rng) != witness.g_labels[i]) {
        report.corrected_evaluations = corrected.evaluations();
        return finish(GnmStep::kGeneratorImages, "corrected image of gamma " + std::to_string(i) + " differs", &ops);
      }
    }
    ops.set_step("3b");
    if (corrected(witness.z, rng) != x_label) {
      report.corrected_evaluations = corrected.evaluations();
      return finish(GnmStep::kTargetImages, "corrected image of z is not x", &ops);
    }
    for (std::size_t j = 0; j < witness.lambdas.size(); ++j) {
      if (corrected(witness.lambdas[j], rng) != h_labels[j]) {
        report.corrected_evaluations = corrected.evaluations();
        return finish(GnmStep::kTargetImages, "corrected image of lambda " + std::to_string(j) + " differs", &ops);
      }
    }
    const std::uint64_t before_kernel = corrected.evaluations();
    ops.set_step("3c");
    const KernelReport kernel = kernel_triviality(corrected, options.kernel_mode, rng, options.kernel_samples);
    report.corrected_evaluations = before_kernel + kernel.corrected_evaluations;
    report.kernel_charged_queries = kernel.charged_queries;
    if (!kernel.trivial) {
      return finish(GnmStep::kKernel, "kernel of size " + std::to_string(subgroup_size(kernel.kernel)), &ops);
    }
  } catch (const ProtocolError& e) {
    return finish(GnmStep::kProtocol, e.what(), &ops);
  }
  return finish(GnmStep::kNone, "accepted", &ops);
}

std::optional<bool> kernel_modes_agree(const BlackBoxOracle& oracle, Label x_label, const GnmWitness& witness,
                                       RngSeed seed, int repetition) {
  std::shared_ptr<const ExplicitGroup> model;
  try {
    model = ExplicitGroup::make(witness.model);
    for (Element g : witness.gammas) {
      if (!model->contains(g)) return std::nullopt;
    }
    if (witness.g_labels.size() != witness.gammas.size()) return std::nullopt;
    if (!is_efficient_generating_set(*model, witness.gammas)) return std::nullopt;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  OracleOps ops(oracle, x_label);
  RawHom f(model, witness.gammas, witness.g_labels, ops);
  CounterRng test_rng = CounterRng::stream(seed, {0});
  if (!homomorphism_test([&f](Element e) { return f(e); }, *model, ops, kHomTestTrials, test_rng).accepted) {
    return std::nullopt;
  }
  CorrectedHom corrected(f, repetition);
  try {
    CounterRng a = CounterRng::stream(seed, {1});
    CounterRng b = CounterRng::stream(seed, {2});
    const KernelReport coset = kernel_triviality(corrected, KernelMode::kCosetSampling, a);
    const KernelReport exhaustive = kernel_triviality(corrected, KernelMode::kExhaustive, b);
    return coset.kernel == exhaustive.kernel && coset.trivial == exhaustive.trivial;
  } catch (const ProtocolError&) {
    return false;
  }
}

double gnm_query_bound(std::uint32_t order) {
  double l = 0.0;
  while (std::ldexp(1.0, int(l)) < double(order)) l += 1.0;
  l = std::max(1.0, l);
  return kGnmQueryConstant * l * l * l;
}

}  // namespace qcma::group
