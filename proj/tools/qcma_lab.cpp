// qcma_lab: runs one experiment per subcommand and writes CSV + JSON records,
// or summarizes existing CSV records with `report`.
//
// Exit codes: 0 success, 1 an --assert check failed, 2 invalid input.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcma/errors.hpp"
#include "qcma/harness/config.hpp"
#include "qcma/harness/experiments.hpp"
#include "qcma/harness/report.hpp"

namespace {

using namespace qcma::harness;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qcma::ValidationError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::vector<std::string> sets;
  bool assert_checks = false;
  bool quiet = false;
};

int run_experiment(const std::string& experiment, const GlobalFlags& g) {
  ExperimentConfig config = default_config(experiment);
  if (g.config) {
    config = parse_config_json(read_file(*g.config));
    if (config.experiment != experiment) {
      throw qcma::ValidationError("config file is for '" + config.experiment + "', not '" + experiment + "'");
    }
  }
  if (g.seed) config.seed = *g.seed;
  if (g.trials) config.trials = *g.trials;
  if (g.threads) config.threads = *g.threads;
  if (g.out) config.out = *g.out;
  for (const auto& s : g.sets) apply_override(config, s);

  const RunRecord record = run(config);
  const auto written = write_record(record, config.out);

  if (!g.quiet) {
    for (const auto& t : record.tables) std::cout << "== " << t.schema->name << "\n" << t.to_text() << "\n";
  }
  int failures = 0;
  for (const auto& a : record.assertions) {
    failures += !a.pass;
    if (g.assert_checks && (!g.quiet || !a.pass)) {
      std::cout << (a.pass ? "PASS  " : "FAIL  ") << a.name << "  (" << a.detail << ")\n";
    }
  }
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  if (g.assert_checks && failures > 0) {
    std::cerr << failures << " assertion(s) failed\n";
    return 1;
  }
  return 0;
}

int run_report(const std::vector<std::string>& files, const std::optional<std::string>& out) {
  std::vector<Table> inputs;
  for (const auto& f : files) inputs.push_back(parse_csv(read_file(f)));
  const ReportOutput report = build_report(inputs);
  std::cout << report.text;
  if (out) {
    std::filesystem::create_directories(*out);
    for (const auto& t : report.tables) {
      const auto path = std::filesystem::path(*out) / ("summary_" + t.schema->name + ".csv");
      std::ofstream(path, std::ios::binary) << t.to_csv();
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-complexity experiments: advice search, hybrids, pseudorandom ensembles, group non-membership"};
  app.require_subcommand(1);
  GlobalFlags g;

  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--trials", g.trials, "trials (samples for ensemble, extensions for affine-check)");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores); never changes results");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--set", g.sets, "override a parameter: key=value (repeatable)")->take_all();
  app.add_flag("--assert", g.assert_checks, "check acceptance assertions and exit 1 on failure");
  app.add_flag("--quiet", g.quiet, "print only failures and written paths");

  std::vector<std::pair<std::string, CLI::App*>> experiments;
  for (const auto& schema : experiment_schemas()) {
    std::string help = schema.summary + ". Keys:";
    for (const auto& p : schema.params) help += " " + p.key + " (" + p.help + ")";
    CLI::App* sub = app.add_subcommand(schema.id, help);
    sub->fallthrough();
    experiments.emplace_back(schema.id, sub);
  }
  std::vector<std::string> report_files;
  std::optional<std::string> report_out;
  CLI::App* report = app.add_subcommand("report", "summarize CSV records (merge by cell key, T* and fits)");
  report->add_option("files", report_files, "CSV files")->required();
  report->add_option("--out", report_out, "directory for summary_<table>.csv files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (report->parsed()) return run_report(report_files, report_out);
    for (const auto& [id, sub] : experiments) {
      if (sub->parsed()) return run_experiment(id, g);
    }
  } catch (const qcma::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qcma::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qcma::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
