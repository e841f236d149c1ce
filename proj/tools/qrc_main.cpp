// Command-line driver for the reservoir experiments.
//
//   qrc run --config cfg.json [overrides]   simulate, train, write outputs
//   qrc validate-config --config cfg.json   check and print the effective config
//   qrc replot rows.csv [--out-dir DIR]     rebuild aggregates and charts
//
// Exit codes: 0 success, 1 config error, 2 partial simulation failure, 3 IO error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qrc/config.hpp"
#include "qrc/output.hpp"
#include "qrc/version.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string experiment;
  std::vector<std::string> models;
  std::vector<int> dims;
  std::vector<int> train_sizes;
  std::vector<double> noise_grid;
  std::uint64_t seed = 0;
  int test_size = 0;
  int n_reservoirs = 0;
  int threads = 0;
  double rel_std = 0.0;
  double fixed_dt = 0.0;
  std::string classical_form, radius_form, gamma_selection, out_dir;
  bool serial = false;
};

void add_override_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config or run manifest");
  cmd->add_option("--experiment", o.experiment,
                  "experiment name (train_size_sweep, dimension_sweep, model_comparison, "
                  "output_noise_sweep, input_noise_sweep)");
  cmd->add_option("--models", o.models, "models to run (qrc, full_qrc, crc, full_crc, hvrc)")
      ->delimiter(',');
  cmd->add_option("--dims", o.dims, "Hilbert dimensions for the qrc model")->delimiter(',');
  cmd->add_option("--train-sizes", o.train_sizes, "training-set sizes")->delimiter(',');
  cmd->add_option("--noise-grid", o.noise_grid, "noise levels sigma/alpha")->delimiter(',');
  cmd->add_option("--seed", o.seed, "base random seed");
  cmd->add_option("--test-size", o.test_size, "test-set size");
  cmd->add_option("--n-reservoirs", o.n_reservoirs, "ensemble size (index 0 is the mean set)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = runtime default)");
  cmd->add_option("--rel-std", o.rel_std, "relative std of the parameter distribution");
  cmd->add_option("--fixed-dt", o.fixed_dt, "fixed step for input-noise integration");
  cmd->add_option("--classical-form", o.classical_form, "literal or normal_ordered");
  cmd->add_option("--radius-form", o.radius_form, "literal or conventional");
  cmd->add_option("--gamma-selection", o.gamma_selection, "test or holdout");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_flag("--serial", o.serial, "run the serial reference path instead of the OpenMP pool");
}

nlohmann::json overrides_to_json(const CLI::App* cmd, const CliOverrides& o) {
  nlohmann::json j;
  auto passed = [&](const char* name) { return cmd->count(name) > 0; };
  if (passed("--experiment")) j["experiment"] = o.experiment;
  if (passed("--models")) j["models"] = o.models;
  if (passed("--dims")) j["dims"] = o.dims;
  if (passed("--train-sizes")) j["train_sizes"] = o.train_sizes;
  if (passed("--noise-grid")) j["noise_grid"] = o.noise_grid;
  if (passed("--seed")) j["seed"] = o.seed;
  if (passed("--test-size")) j["test_size"] = o.test_size;
  if (passed("--n-reservoirs")) j["n_reservoirs"] = o.n_reservoirs;
  if (passed("--threads")) j["threads"] = o.threads;
  if (passed("--rel-std")) j["rel_std"] = o.rel_std;
  if (passed("--fixed-dt")) j["fixed_dt"] = o.fixed_dt;
  if (passed("--classical-form")) j["classical_form"] = o.classical_form;
  if (passed("--radius-form")) j["radius_form"] = o.radius_form;
  if (passed("--gamma-selection")) j["gamma_selection"] = o.gamma_selection;
  if (passed("--out-dir")) j["out_dir"] = o.out_dir;
  return j;
}

qrc::ExperimentConfig build_config(const CLI::App* cmd, const CliOverrides& o) {
  nlohmann::ordered_json doc;
  if (!o.config_path.empty()) {
    // reuse the file loader for parse errors, then keep its JSON body
    std::ifstream in(o.config_path);
    if (!in) throw qrc::ConfigError("cannot open config file '" + o.config_path + "'");
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw qrc::ConfigError("cannot parse '" + o.config_path + "': " + e.what());
    }
    if (doc.contains("config")) doc = doc["config"];
  } else {
    doc = nlohmann::ordered_json::object();
  }
  const nlohmann::json overrides = overrides_to_json(cmd, o);
  for (const auto& [key, value] : overrides.items()) doc[key] = value;
  if (!doc.contains("experiment"))
    throw qrc::ConfigError("no experiment selected; pass --config or --experiment");
  return qrc::config_from_json(doc);
}

int run_command(const CLI::App* cmd, const CliOverrides& o) {
  const qrc::ExperimentConfig cfg = build_config(cmd, o);
  const qrc::RunMode mode = o.serial ? qrc::RunMode::serial : qrc::RunMode::parallel;
  std::printf("qrc %s: %s -> %s (%zu rows pending)\n", qrc::kVersion,
              qrc::to_string(cfg.experiment).c_str(), cfg.out_dir.c_str(),
              static_cast<std::size_t>(cfg.models.size()));
  const qrc::ExperimentResult result = qrc::run_experiment(cfg, mode);
  qrc::emit_outputs(result, cfg.out_dir);

  std::size_t failed = 0;
  for (const auto& r : result.rows)
    if (!r.ok()) ++failed;
  std::printf("wrote %zu rows (%zu failed), %zu aggregate groups to %s\n", result.rows.size(),
              failed, result.aggregates.size(), cfg.out_dir.c_str());
  if (result.hvrc_transform_check)
    std::printf("hvrc/full_qrc transform check: max |deviation| = %g\n",
                *result.hvrc_transform_check);
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single nonlinear-oscillator reservoir computing experiments"};
  app.require_subcommand(1);

  CliOverrides run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment and write its outputs");
  add_override_flags(run_cmd, run_opts);

  CliOverrides check_opts;
  CLI::App* check_cmd = app.add_subcommand("validate-config", "validate and echo the effective config");
  add_override_flags(check_cmd, check_opts);

  std::string rows_path, replot_out;
  CLI::App* replot_cmd = app.add_subcommand("replot", "rebuild aggregates and charts from rows.csv");
  replot_cmd->add_option("rows", rows_path, "per-reservoir rows CSV")->required();
  replot_cmd->add_option("--out-dir", replot_out, "output directory (default: alongside the rows)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return run_command(run_cmd, run_opts);
    if (check_cmd->parsed()) {
      const qrc::ExperimentConfig cfg = build_config(check_cmd, check_opts);
      std::cout << qrc::config_to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (replot_cmd->parsed()) {
      std::string out = replot_out;
      if (out.empty()) {
        const auto parent = std::filesystem::path(rows_path).parent_path();
        out = parent.empty() ? std::string(".") : parent.string();
      }
      qrc::replot(rows_path, out);
      std::printf("replotted %s into %s\n", rows_path.c_str(), out.c_str());
      return 0;
    }
  } catch (const qrc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const qrc::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
