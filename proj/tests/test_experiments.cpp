#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrc/config.hpp"
#include "qrc/experiments.hpp"
#include "qrc/output.hpp"

namespace fs = std::filesystem;

using qrc::Experiment;
using qrc::ExperimentConfig;
using qrc::Model;
using qrc::RunMode;

namespace {

ExperimentConfig tiny_train_sweep() {
  ExperimentConfig cfg = qrc::experiment_defaults(Experiment::train_size_sweep);
  cfg.dims = {3};
  cfg.n_reservoirs = 2;
  cfg.test_size = 12;
  cfg.train_sizes = {4, 8};
  cfg.seed = 20260808;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool rows_equal(const std::vector<qrc::RowResult>& a, const std::vector<qrc::RowResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool rms_same = (std::isnan(a[i].rms) && std::isnan(b[i].rms)) || a[i].rms == b[i].rms;
    const bool gamma_same =
        (std::isnan(a[i].gamma) && std::isnan(b[i].gamma)) || a[i].gamma == b[i].gamma;
    if (!rms_same || !gamma_same || a[i].status != b[i].status || a[i].model != b[i].model ||
        a[i].dim != b[i].dim || a[i].train_size != b[i].train_size ||
        a[i].reservoir_index != b[i].reservoir_index)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("serial and parallel runs produce identical rows") {
  const ExperimentConfig cfg = tiny_train_sweep();
  const auto serial = qrc::run_experiment(cfg, RunMode::serial);
  const auto parallel = qrc::run_experiment(cfg, RunMode::parallel);
  CHECK(rows_equal(serial.rows, parallel.rows));
  CHECK_FALSE(serial.any_failed());
}

TEST_CASE("reruns are byte-identical regardless of worker count") {
  ExperimentConfig cfg = tiny_train_sweep();
  const auto dir = fs::temp_directory_path() / "qrc_test_determinism";
  fs::remove_all(dir);

  cfg.threads = 1;
  const auto r1 = qrc::run_experiment(cfg, RunMode::parallel);
  qrc::emit_outputs(r1, (dir / "t1").string());

  cfg.threads = 8;
  const auto r8 = qrc::run_experiment(cfg, RunMode::parallel);
  qrc::emit_outputs(r8, (dir / "t8").string());

  CHECK(slurp(dir / "t1" / "rows.csv") == slurp(dir / "t8" / "rows.csv"));
  CHECK(slurp(dir / "t1" / "aggregate.csv") == slurp(dir / "t8" / "aggregate.csv"));
  CHECK(slurp(dir / "t1" / "ensemble.csv") == slurp(dir / "t8" / "ensemble.csv"));
  fs::remove_all(dir);
}

TEST_CASE("single reservoir with zero spread matches its own aggregate") {
  ExperimentConfig cfg = tiny_train_sweep();
  cfg.n_reservoirs = 1;
  cfg.rel_std = 0.0;
  cfg.train_sizes = {5};
  const auto result = qrc::run_experiment(cfg);
  REQUIRE(result.rows.size() == 2);  // qrc + crc
  REQUIRE(result.aggregates.size() == 2);
  for (const auto& agg : result.aggregates) {
    CHECK(agg.count == 1);
    const qrc::RowResult* row = nullptr;
    for (const auto& r : result.rows)
      if (r.model == agg.model) row = &r;
    REQUIRE(row != nullptr);
    CHECK(agg.stats.rms_mean == row->rms);
    CHECK(agg.stats.rms_best == row->rms);
    CHECK(agg.stats.rms_worst == row->rms);
    CHECK(agg.stats.rms_std == 0.0);
    CHECK(agg.stats.spread_factor == 0.0);
    CHECK(agg.gamma_mode == row->gamma);
  }
}

TEST_CASE("ensemble index 0 carries the exact mean parameters") {
  const auto result = qrc::run_experiment(tiny_train_sweep());
  REQUIRE(result.ensemble.size() == 2);
  CHECK(result.ensemble[0].kerr == -2.0);
  CHECK(result.ensemble[0].kappa == 1.0);
  CHECK(result.ensemble[0].drive_amp == 6.0);
  CHECK(result.ensemble[0].drive_freq == 10.0);
  CHECK(result.ensemble[1].kerr != -2.0);  // a genuine draw
}

TEST_CASE("aggregates are recomputable from the rows") {
  const auto result = qrc::run_experiment(tiny_train_sweep());
  const auto again = qrc::aggregate_rows(result.rows);
  REQUIRE(again.size() == result.aggregates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].stats.rms_mean == result.aggregates[i].stats.rms_mean);
    CHECK(again[i].stats.spread_factor == result.aggregates[i].stats.spread_factor);
    const auto& st = again[i].stats;
    if (again[i].count > 0 && st.rms_mean > 0.0)
      CHECK(std::abs(st.spread_factor - (st.rms_worst - st.rms_best) / st.rms_mean) < 1e-12);
  }
}

TEST_CASE("dimension sweep emits rows for every dim at the M=30 slice") {
  ExperimentConfig cfg = qrc::experiment_defaults(Experiment::dimension_sweep);
  cfg.dims = {2, 3};
  cfg.train_sizes = {30};
  cfg.n_reservoirs = 2;
  cfg.test_size = 10;
  cfg.seed = 7;
  const auto result = qrc::run_experiment(cfg);
  CHECK_FALSE(result.any_failed());
  int d2 = 0, d3 = 0;
  for (const auto& r : result.rows) {
    CHECK(r.train_size == 30);
    if (r.dim == 2) ++d2;
    if (r.dim == 3) ++d3;
  }
  CHECK(d2 == 2);
  CHECK(d3 == 2);
  for (const auto& agg : result.aggregates) CHECK(agg.train_size == 30);
}

TEST_CASE("model comparison pairs the hvrc features with the full-qrc transform") {
  ExperimentConfig cfg = qrc::experiment_defaults(Experiment::model_comparison);
  cfg.n_reservoirs = 2;
  cfg.test_size = 8;
  cfg.train_sizes = {5};
  cfg.seed = 11;
  const auto result = qrc::run_experiment(cfg);
  CHECK_FALSE(result.any_failed());
  REQUIRE(result.hvrc_transform_check.has_value());
  CHECK(*result.hvrc_transform_check == 0.0);

  // full_crc rows advertise their two output channels
  bool saw_full_crc = false;
  for (const auto& r : result.rows) {
    if (r.model == Model::full_crc) {
      saw_full_crc = true;
      CHECK(r.n_out == 2);
    }
    if (r.model == Model::full_qrc || r.model == Model::hvrc) CHECK(r.n_out == 3);
  }
  CHECK(saw_full_crc);
}

TEST_CASE("output noise sweep: zero level reproduces the clean rows") {
  ExperimentConfig cfg = qrc::experiment_defaults(Experiment::output_noise_sweep);
  cfg.models = {Model::qrc, Model::crc};
  cfg.dims = {3};
  cfg.test_size = 15;
  cfg.noise_grid = {0.0, 1e-2};
  cfg.seed = 3;
  const auto result = qrc::run_experiment(cfg);
  CHECK_FALSE(result.any_failed());

  ExperimentConfig cfg_zero = cfg;
  cfg_zero.noise_grid = {0.0};
  const auto zero_only = qrc::run_experiment(cfg_zero);

  for (const auto& r : result.rows) {
    if (r.noise_sigma_over_alpha != 0.0) continue;
    for (const auto& z : zero_only.rows)
      if (z.model == r.model) {
        CHECK(z.rms == r.rms);
        CHECK(z.gamma == r.gamma);
      }
  }

  // noise must change the result at the nonzero level
  for (const auto& r : result.rows)
    if (r.noise_sigma_over_alpha > 0.0 && r.model == Model::qrc) {
      for (const auto& z : result.rows)
        if (z.model == Model::qrc && z.noise_sigma_over_alpha == 0.0) CHECK(r.rms != z.rms);
    }
}

TEST_CASE("input noise sweep records the step and scale per row") {
  ExperimentConfig cfg = qrc::experiment_defaults(Experiment::input_noise_sweep);
  cfg.models = {Model::crc};
  cfg.dims = {2};
  cfg.test_size = 6;
  cfg.noise_grid = {0.0, 1e-3};
  cfg.seed = 5;
  const auto result = qrc::run_experiment(cfg);
  CHECK_FALSE(result.any_failed());
  REQUIRE(result.rows.size() == 2);
  for (const auto& r : result.rows) {
    CHECK(r.noise_kind == qrc::NoiseKind::input);
    CHECK(r.fixed_dt == cfg.fixed_dt);
    const double expected_scale = r.noise_sigma_over_alpha * 6.0 / std::sqrt(cfg.fixed_dt);
    CHECK(r.noise_scale_s == doctest::Approx(expected_scale));
  }
  const auto rerun = qrc::run_experiment(cfg);
  CHECK(rows_equal(result.rows, rerun.rows));
}

TEST_CASE("replot rebuilds matching aggregates from rows.csv") {
  const auto result = qrc::run_experiment(tiny_train_sweep());
  const auto dir = fs::temp_directory_path() / "qrc_test_replot";
  fs::remove_all(dir);
  qrc::emit_outputs(result, (dir / "run").string());
  qrc::replot((dir / "run" / "rows.csv").string(), (dir / "replot").string());
  CHECK(slurp(dir / "run" / "aggregate.csv") == slurp(dir / "replot" / "aggregate.csv"));
  CHECK(fs::exists(dir / "replot" / "fig_rms_vs_train_size.svg"));
  fs::remove_all(dir);
}

TEST_CASE("manifest reproduces the identical run") {
  const ExperimentConfig cfg = tiny_train_sweep();
  const auto result = qrc::run_experiment(cfg);
  const auto dir = fs::temp_directory_path() / "qrc_test_manifest_rerun";
  fs::remove_all(dir);
  qrc::emit_outputs(result, dir.string());

  const auto reloaded = qrc::config_from_file((dir / "manifest.json").string());
  const auto rerun = qrc::run_experiment(reloaded);
  CHECK(rows_equal(result.rows, rerun.rows));
  fs::remove_all(dir);
}
