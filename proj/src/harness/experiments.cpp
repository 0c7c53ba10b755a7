#include "qcma/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "qcma/advice_net.hpp"
#include "qcma/errors.hpp"
#include "qcma/group/gnm.hpp"
#include "qcma/hybrid_lab.hpp"
#include "qcma/measures.hpp"
#include "qcma/parallel.hpp"
#include "qcma/pseudorandom.hpp"
#include "qcma/search_verify.hpp"

namespace qcma::harness {

using nlohmann::json;

namespace {

using I = std::int64_t;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check(std::vector<AssertionResult>& out, std::string name, bool pass, std::string detail) {
  out.push_back({std::move(name), pass, std::move(detail)});
}

std::string cell_name(std::initializer_list<std::pair<const char*, long long>> parts) {
  std::string s;
  for (const auto& [k, v] : parts) s += (s.empty() ? "" : " ") + std::string(k) + "=" + std::to_string(v);
  return s;
}

// grover-advice ------------------------------------------------------------

void run_grover_advice(const ExperimentConfig& c, RunRecord& rec) {
  Table table("grover-advice");
  const auto trials = std::size_t(c.trials);
  for (int n : c.get_ints("n")) {
    for (int m : c.get_ints("m")) {
      struct Trial {
        bool accepted = false;
        double probability = 0.0;
        double overlap = 0.0;
        std::uint64_t queries = 0;
      };
      std::vector<Trial> out(trials);
      parallel_for(trials, c.threads, [&](std::size_t t) {
        CounterRng rng = CounterRng::stream(RngSeed{c.seed}, {0x67726f76ULL, std::uint64_t(n), std::uint64_t(m), t});
        const PureState psi = haar_sample<double>(n, rng);
        const AdviceWitness w = encode_witness(psi, m);
        const MarkedStateOracle oracle(psi);
        const QcmaVerdict v = qcma_verify(oracle, serialize(w), n, m, rng);
        out[t] = {v.accepted(), v.report.final_overlap * v.report.final_overlap,
                  std::abs(overlap(decode_witness(w), psi)), oracle.queries()};
      });
      I successes = 0;
      std::uint64_t max_q = 0;
      double sum_p = 0.0, sum_q = 0.0, min_overlap = 1.0;
      for (const auto& r : out) {
        successes += r.accepted;
        sum_p += r.probability;
        sum_q += double(r.queries);
        max_q = std::max(max_q, r.queries);
        min_overlap = std::min(min_overlap, r.overlap);
      }
      const double guarantee = guaranteed_overlap(n, m);
      const auto bound = qcma_query_bound(n, m);
      const double rate = double(successes) / double(trials);
      table.add({I(n), I(m), I(witness_capacity(n, m)), I(trials), successes, rate, sum_p / double(trials),
                 min_overlap, guarantee, sum_q / double(trials), I(max_q), I(bound)});
      const std::string cell = cell_name({{"n", n}, {"m", m}});
      check(rec.assertions, "honest acceptance >= 2/3 [" + cell + "]", rate >= 2.0 / 3.0, "rate " + fmt(rate));
      check(rec.assertions, "queries within bound [" + cell + "]", max_q <= bound,
            std::to_string(max_q) + " <= " + std::to_string(bound));
      check(rec.assertions, "witness overlap guarantee [" + cell + "]", min_overlap >= guarantee - 1e-12,
            "min " + fmt(min_overlap) + " vs " + fmt(guarantee));
    }
  }
  rec.tables.push_back(std::move(table));
}

// hybrid -------------------------------------------------------------------

void run_hybrid_grover(const ExperimentConfig& c, RunRecord& rec) {
  Table table("hybrid");
  const auto trials = std::size_t(c.trials);
  for (int n : c.get_ints("n")) {
    for (int T : c.get_ints("T")) {
      struct Trial {
        double probability = 0.0;
        double mean_delta = 0.0;
        double violation = 0.0;
      };
      std::vector<Trial> out(trials);
      const AlgorithmSpec alg = grover_algorithm(n, T);
      parallel_for(trials, c.threads, [&](std::size_t t) {
        CounterRng rng = CounterRng::stream(RngSeed{c.seed}, {0x6879ULL, std::uint64_t(n), std::uint64_t(T), t});
        const PureState psi = haar_sample<double>(n, rng);
        const HybridTranscript h = run_hybrid(alg, psi, HybridMode::kFull);
        const MarkedStateOracle oracle(psi);
        const PureState final_state = run_algorithm(alg, oracle, std::vector<bool>(std::size_t(T), true));
        out[t] = {register_overlap(final_state, psi), h.mean_delta(), h.max_violation()};
      });
      I successes = 0;
      double sum_p = 0.0, sum_delta = 0.0, worst = -1e300;
      for (const auto& r : out) {
        successes += r.probability >= 0.5;
        sum_p += r.probability;
        sum_delta += r.mean_delta;
        worst = std::max(worst, r.violation);
      }
      if (T == 0) worst = 0.0;
      table.add({std::string("grover"), I(n), I(0), I(T), I(1), I(trials), successes,
                 double(successes) / double(trials), sum_p / double(trials), I(T), sum_delta / double(trials), worst,
                 I(0)});
      const std::string cell = cell_name({{"n", n}, {"T", T}});
      check(rec.assertions, "hybrid inequality [grover " + cell + "]", worst <= 1e-9, "max violation " + fmt(worst));
      if (T == 0) {
        check(rec.assertions, "zero deltas without queries [" + cell + "]", sum_delta == 0.0,
              "mean delta " + fmt(sum_delta / double(trials)));
      }
    }
  }
  rec.tables.push_back(std::move(table));
}

void run_hybrid_verifier(const ExperimentConfig& c, RunRecord& rec) {
  SweepConfig sc;
  sc.ns = c.get_ints("n");
  sc.ms = c.get_ints("m");
  sc.budgets = c.get_ints("T");
  sc.trials = c.trials;
  sc.seed = RngSeed{c.seed};
  sc.threads = c.threads;
  sc.with_hybrid = true;
  Table table("hybrid");
  for (const SweepRow& r : lower_bound_sweep(sc)) {
    table.add({std::string("verifier"), I(r.n), I(r.m), I(r.T), I(r.full_budget), I(r.trials), I(r.successes),
               r.success_rate(), r.mean_success_probability, I(r.max_queries), r.mean_delta, r.max_delta_violation,
               I(r.bias_violations)});
    const std::string cell = cell_name({{"n", r.n}, {"m", r.m}, {"T", r.T}});
    check(rec.assertions, "hybrid inequality [verifier " + cell + "]", r.max_delta_violation <= 1e-9,
          "max violation " + fmt(r.max_delta_violation));
    check(rec.assertions, "no bias without total delta [verifier " + cell + "]", r.bias_violations == 0,
          std::to_string(r.bias_violations) + " runs");
  }
  table.sort_by_key();
  rec.tables.push_back(std::move(table));

  const auto scaling_trials = int(c.get_int("scaling_trials"));
  if (scaling_trials > 0) {
    Table scaling("hybrid-scaling");
    for (int m : sc.ms) {
      const ScalingFit fit = fit_scaling(sc.ns, m, scaling_trials, RngSeed{c.seed}, c.threads);
      for (std::size_t i = 0; i < fit.ns.size(); ++i) {
        scaling.add({I(m), I(fit.ns[i]), I(scaling_trials), fit.t_star[i]});
      }
      check(rec.assertions, "T* exponent in [0.8, 1.2] [m=" + std::to_string(m) + "]",
            fit.exponent >= 0.8 && fit.exponent <= 1.2, "exponent " + fmt(fit.exponent));
    }
    scaling.sort_by_key();
    rec.tables.push_back(std::move(scaling));
  }
}

// ensemble -----------------------------------------------------------------

void run_ensemble(const ExperimentConfig& c, RunRecord& rec) {
  Table table("ensemble");
  const auto samples = std::size_t(c.trials);
  for (int n : c.get_ints("n")) {
    const double dim = std::ldexp(1.0, n);
    const double haar = haar_collision(dim);
    auto add = [&](const char* name, int k, const CollisionEstimate& e) {
      table.add({std::string(name), I(n), I(k), I(e.samples), e.mean, e.stderr_of_mean, e.min, e.max, haar});
    };
    if (c.get_bool("haar")) {
      const auto e = collision_probability({EnsembleKind::kHaar, n, 0}, samples, RngSeed{c.seed}, c.threads);
      add("haar", 0, e);
      const double z = std::abs(e.mean - haar) / e.stderr_of_mean;
      check(rec.assertions, "Haar collision within 3 sigma [n=" + std::to_string(n) + "]", z <= 3.0,
            "z " + fmt(z));
    }
    for (int k : c.get_ints("k")) {
      const auto e = collision_probability({EnsembleKind::kSigmaK, n, k}, samples, RngSeed{c.seed}, c.threads);
      add("sigma-k", k, e);
      const std::string cell = cell_name({{"n", n}, {"k", k}});
      if (k == 1) {
        const double dev = std::max(std::abs(e.max - 1.0 / dim), std::abs(e.min - 1.0 / dim));
        check(rec.assertions, "one layer is flat [" + cell + "]", dev <= 1e-12, "max deviation " + fmt(dev));
      } else if (k >= 2 && n >= 8) {
        const double rel = std::abs(e.mean / haar - 1.0);
        check(rec.assertions, "within 5% of Haar [" + cell + "]", rel <= 0.05, "relative deviation " + fmt(rel));
      }
    }
  }
  table.sort_by_key();
  rec.tables.push_back(std::move(table));
}

// randstate ----------------------------------------------------------------

void run_randstate(const ExperimentConfig& c, RunRecord& rec) {
  Table table("randstate");
  const auto trials = std::size_t(c.trials);
  const int max_attempts = int(c.get_int("max_attempts"));
  for (int n : c.get_ints("n")) {
    const int p = c.get_int("p") < 0 ? n : int(c.get_int("p"));
    const int q = precision_bits(n, p);
    struct Trial {
      bool success = false;
      int attempts = 0;
      double flag = 0.0;
    };
    std::vector<Trial> out(trials);
    parallel_for(trials, c.threads, [&](std::size_t t) {
      CounterRng rng = CounterRng::stream(RngSeed{c.seed}, {0x7273ULL, std::uint64_t(n), std::uint64_t(p), t});
      const ClassicalOracle oracle(RngSeed{rng.next()}, n);
      const RngSeed prep_seed{rng.next()};
      const RandomStateAttempt first = random_state_attempt(n, q, oracle, 0, rng);
      const RandomStateResult r = prepare_random_state(n, p, oracle, prep_seed, max_attempts);
      out[t] = {r.success(), r.attempts, first.flag_probability};
    });
    I successes = 0;
    double attempts = 0.0, flag = 0.0;
    for (const auto& r : out) {
      successes += r.success;
      attempts += r.attempts;
      flag += r.flag;
    }
    const double lo = 0.5 / q, hi = 2.0 / q, mean_flag = flag / double(trials);
    table.add({I(n), I(q), I(trials), successes, double(successes) / double(trials), attempts / double(trials),
               mean_flag, lo, hi});
    check(rec.assertions, "flag probability in [0.5/q, 2/q] [n=" + std::to_string(n) + "]",
          mean_flag >= lo && mean_flag <= hi, fmt(mean_flag) + " in [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  rec.tables.push_back(std::move(table));
}

// gnm ----------------------------------------------------------------------

std::vector<group::GroupDescriptor> gnm_groups(const ExperimentConfig& c) {
  const auto max_order = std::uint32_t(c.get_int("max_order"));
  std::vector<group::GroupDescriptor> out;
  std::set<std::string> seen;
  auto push = [&](const group::GroupDescriptor& d) {
    if (seen.insert(d.name()).second) out.push_back(d);
  };
  for (const auto& name : c.get_strings("groups")) {
    if (name == "catalog") {
      for (const auto& d : group::gnm_catalog()) {
        if (group::ExplicitGroup::make(d)->order() <= max_order) push(d);
      }
    } else {
      push(group::GroupDescriptor::from_name(name));
    }
  }
  return out;
}

void run_gnm(const ExperimentConfig& c, RunRecord& rec) {
  Table table("gnm");
  const auto trials = std::size_t(c.trials);
  const auto kernel_checks = std::size_t(c.get_int("kernel_checks"));
  const int label_bits = int(c.get_int("label_bits"));
  std::vector<group::GroupDescriptor> groups = gnm_groups(c);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& d = groups[gi];
    const std::uint32_t order = group::ExplicitGroup::make(d)->order();
    for (const bool in_h : {false, true}) {
      struct Trial {
        bool accepted = false;
        std::uint64_t queries = 0;
        int kernel_checked = 0;
        int kernel_agreed = 0;
      };
      std::vector<Trial> out(trials);
      parallel_for(trials, c.threads, [&](std::size_t t) {
        CounterRng rng = CounterRng::stream(RngSeed{c.seed}, {0x676e6dULL, gi, std::uint64_t(in_h), t});
        const group::GnmInstance inst = group::make_instance(d, in_h, RngSeed{rng.next()}, label_bits);
        const group::GnmWitness w =
            in_h ? group::cheating_witness(inst, group::CheatStrategy(t % group::kCheatStrategyCount),
                                           RngSeed{rng.next()})
                 : group::honest_witness(inst, RngSeed{rng.next()});
        const group::GnmReport r = group::gnm_verify(*inst.oracle, inst.h_labels, inst.x_label, w, {}, rng);
        Trial tr{r.accepted, r.queries, 0, 0};
        if (t < kernel_checks) {
          if (const auto agree = group::kernel_modes_agree(*inst.oracle, inst.x_label, w, RngSeed{rng.next()})) {
            tr.kernel_checked = 1;
            tr.kernel_agreed = *agree;
          }
        }
        out[t] = tr;
      });
      I accepted = 0, checked = 0, agreed = 0;
      std::uint64_t max_q = 0;
      double sum_q = 0.0;
      for (const auto& r : out) {
        accepted += r.accepted;
        max_q = std::max(max_q, r.queries);
        sum_q += double(r.queries);
        checked += r.kernel_checked;
        agreed += r.kernel_agreed;
      }
      const double rate = double(accepted) / double(trials);
      const double bound = group::gnm_query_bound(order);
      const std::string instance = in_h ? "in-h" : "honest";
      table.add({I(order), d.name(), instance, I(trials), accepted, rate, sum_q / double(trials), I(max_q), bound,
                 checked, agreed});
      const std::string cell = d.name() + " " + instance;
      if (in_h) {
        check(rec.assertions, "x in H rejected >= 2/3 [" + cell + "]", rate <= 1.0 / 3.0, "accept " + fmt(rate));
      } else {
        check(rec.assertions, "honest accepted >= 2/3 [" + cell + "]", rate >= 2.0 / 3.0, "accept " + fmt(rate));
      }
      check(rec.assertions, "queries <= C log^3 |G| [" + cell + "]", double(max_q) <= bound,
            std::to_string(max_q) + " <= " + fmt(bound));
      check(rec.assertions, "kernel modes agree [" + cell + "]", agreed == checked,
            std::to_string(agreed) + "/" + std::to_string(checked));
    }
  }
  table.sort_by_key();
  rec.tables.push_back(std::move(table));
}

// affine-check -------------------------------------------------------------

void run_affine(const ExperimentConfig& c, RunRecord& rec) {
  Table table("affine-check");
  const auto families = c.get_strings("families");
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const std::string& name = families[fi];
    std::vector<ComplexMatrix> family;
    if (name == "diagonal") {
      family = diagonal_example_family();
    } else if (name == "pauli") {
      family = pauli_family();
    } else {
      family = phase_diagonal_family(std::size_t(c.get_int("dim")));
    }
    const AffineReport r = check_affine_family(family);
    const bool attains = r.nonzero_count == 2 * r.dim;
    I extensions = 0, violations = 0;
    if (attains && r.pair_relations_hold) {
      extensions = c.trials;
      for (int t = 0; t < c.trials; ++t) {
        CounterRng rng = CounterRng::stream(RngSeed{c.seed}, {0x6166ULL, fi, std::uint64_t(t)});
        auto extended = family;
        extended.push_back(random_self_consistent_member(r.dim, rng));
        violations += !check_affine_family(extended).pair_relations_hold;
      }
    }
    table.add({name, I(r.dim), I(family.size()), I(r.self_relations_hold), I(r.pair_relations_hold),
               I(r.size_bound_holds), I(attains), r.log2_distinct_values, extensions, violations});
    const std::string cell = name + " N=" + std::to_string(r.dim);
    if (name == "pauli") {
      check(rec.assertions, "pair relations hold [" + cell + "]", r.pair_relations_hold,
            "self relations " + std::string(r.self_relations_hold ? "hold" : "not required"));
    } else {
      check(rec.assertions, "both relations hold [" + cell + "]", r.self_relations_hold && r.pair_relations_hold,
            std::to_string(r.violations.size()) + " violations");
    }
    check(rec.assertions, "member count <= 2N [" + cell + "]", r.size_bound_holds,
          std::to_string(r.nonzero_count) + " members");
    if (attains) {
      check(rec.assertions, "extensions beyond 2N break the pair relation [" + cell + "]", violations == extensions,
            std::to_string(violations) + "/" + std::to_string(extensions));
    }
  }
  table.sort_by_key();
  rec.tables.push_back(std::move(table));
}

json cell_json(const Cell& cell) {
  return std::visit([](const auto& v) { return json(v); }, cell);
}

}  // namespace

bool RunRecord::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.pass; });
}

std::string RunRecord::to_json() const {
  json j;
  j["version"] = version;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash;
  j["config"] = json::parse(config_to_json(config));
  j["wall_time_seconds"] = wall_seconds;
  json asserts = json::array();
  for (const auto& a : assertions) asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  j["assertions"] = asserts;
  json tables = json::object();
  for (const auto& t : this->tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::object();
      for (std::size_t col = 0; col < row.size(); ++col) r[t.schema->columns[col].name] = cell_json(row[col]);
      rows.push_back(r);
    }
    tables[t.schema->name] = rows;
  }
  j["tables"] = tables;
  return j.dump(2);
}

RunRecord run(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = config;
  rec.config_hash = config_hash(config);
  const std::string& e = config.experiment;
  if (e == "grover-advice") {
    run_grover_advice(config, rec);
  } else if (e == "hybrid") {
    if (config.get_string("algorithm") == "grover") {
      run_hybrid_grover(config, rec);
    } else {
      run_hybrid_verifier(config, rec);
    }
  } else if (e == "ensemble") {
    run_ensemble(config, rec);
  } else if (e == "randstate") {
    run_randstate(config, rec);
  } else if (e == "gnm") {
    run_gnm(config, rec);
  } else if (e == "affine-check") {
    run_affine(config, rec);
  } else {
    throw ValidationError("unknown experiment '" + e + "'");
  }
  for (auto& t : rec.tables) t.sort_by_key();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<std::filesystem::path> write_record(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << text;
    written.push_back(p);
  };
  for (const auto& t : record.tables) write(dir / (t.schema->name + ".csv"), t.to_csv());
  write(dir / (record.config.experiment + ".json"), record.to_json() + "\n");
  return written;
}

}  // namespace qcma::harness
