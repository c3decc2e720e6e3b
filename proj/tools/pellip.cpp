#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pellip/error.hpp"
#include "pellip/experiment.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  bool strict = false;
};

int run_experiment(const std::string& kind, const RunOptions& opt) {
  pellip::ExperimentConfig cfg = opt.config.empty() ? pellip::ExperimentConfig{} : pellip::load_config(opt.config);
  cfg.kind = kind;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.seed) cfg.params.seed = *opt.seed;
  if (opt.resolution) {
    if (*opt.resolution < 2) throw pellip::Error(pellip::ErrorKind::config, "--resolution: needs at least 2 cells");
    cfg.domain.resolution.assign(cfg.domain.dim, *opt.resolution);
  }
  const auto rec = pellip::run(cfg);
  for (const auto& [name, c] : rec.checks) {
    const char* status = c.passed ? "PASS" : (c.advisory && !opt.strict ? "WARN" : "FAIL");
    std::cout << status << "  " << name << "  " << std::setprecision(6) << c.value << ' ' << c.relation << ' '
              << c.tolerance << '\n';
  }
  const int failed = rec.failures(opt.strict);
  std::cout << rec.checks.size() << " checks, " << failed << " failed, " << rec.warnings() << " warnings; summary in "
            << cfg.output_dir << "/summary.json\n";
  return failed == 0 ? 0 : 1;
}

int run_report(const std::vector<std::string>& files, bool strict) {
  std::vector<pellip::ExperimentRecord> records;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw pellip::Error(pellip::ErrorKind::config, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    pellip::json j;
    try {
      j = pellip::json::parse(ss.str());
    } catch (const pellip::json::parse_error& e) {
      throw pellip::Error(pellip::ErrorKind::config, path + ": " + e.what());
    }
    records.push_back(pellip::ExperimentRecord::from_summary(j));
  }
  const auto table = pellip::report(records, strict);
  std::cout << table.text;
  return table.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for p-elliptic divergence-form operators"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string chosen;
  for (const auto& kind : pellip::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", opt.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides the config)");
    sub->add_option("--seed", opt.seed, "base seed (overrides the config)");
    sub->add_option("--resolution", opt.resolution, "cells per axis (overrides the config)");
    sub->add_flag("--strict", opt.strict, "treat warnings as failures");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  std::vector<std::string> files;
  bool report_strict = false;
  auto* rep = app.add_subcommand("report", "pass/fail matrix over summary.json files");
  rep->add_option("summaries", files, "summary.json files");
  rep->add_flag("--strict", report_strict, "treat warnings as failures");
  rep->callback([&chosen] { chosen = "report"; });

  CLI11_PARSE(app, argc, argv);
  try {
    if (chosen == "report") return run_report(files, report_strict);
    return run_experiment(chosen, opt);
  } catch (const pellip::Error& e) {
    std::cerr << "error (" << pellip::to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  }
}
