#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrc/config.hpp"
#include "qrc/output.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips and stays short") {
  CHECK(qrc::format_double(0.02) == "0.02");
  CHECK(qrc::format_double(1.0) == "1");
  for (double v : {1.0 / 3.0, 2.5e-13, 3.00000000000004, -0.0, 6.02e23}) {
    const std::string s = qrc::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(std::isnan(std::strtod(qrc::format_double(qrc::kNaN).c_str(), nullptr)));
}

TEST_CASE("feature series stacking order is channel-major within a time point") {
  qrc::FeatureSeries fs;
  fs.n_out = 2;
  fs.times = {0.1, 0.2, 0.3};
  fs.values = {10, 20, 11, 21, 12, 22};
  CHECK(fs.value(0, 0) == 10);
  CHECK(fs.value(1, 0) == 20);
  CHECK(fs.value(0, 2) == 12);
  const auto stacked = fs.stacked();
  CHECK(stacked == std::vector<double>{10, 20, 11, 21, 12, 22});
  fs.validate(0.4);
  CHECK_THROWS_AS(fs.validate(0.25), std::invalid_argument);  // last sample beyond duration

  qrc::FeatureSeries bad = fs;
  bad.times = {0.1, 0.1, 0.3};
  CHECK_THROWS_AS(bad.validate(0.4), std::invalid_argument);
}

TEST_CASE("trajectory CSV uses time,channel,value") {
  qrc::FeatureSeries fs;
  fs.n_out = 2;
  fs.times = {0.5, 1.0};
  fs.values = {1.5, -2.5, 3.5, 4.5};
  const auto dir = temp_dir("qrc_test_traj_csv");
  const auto path = dir / "traj.csv";
  qrc::write_feature_series_csv(path.string(), fs);
  const std::string text = slurp(path);
  CHECK(text ==
        "time,channel,value\n"
        "0.5,0,1.5\n"
        "0.5,1,-2.5\n"
        "1,0,3.5\n"
        "1,1,4.5\n");
  fs::remove_all(dir);
}

TEST_CASE("rows CSV round-trips") {
  std::vector<qrc::RowResult> rows(2);
  rows[0].model = qrc::Model::qrc;
  rows[0].dim = 12;
  rows[0].train_size = 30;
  rows[0].reservoir_index = 3;
  rows[0].rms = 1.25e-4;
  rows[0].gamma = 1e-9;
  rows[1].model = qrc::Model::crc;
  rows[1].dim = 0;
  rows[1].train_size = 30;
  rows[1].reservoir_index = 3;
  rows[1].status = "failed: integration blew up";
  const auto dir = temp_dir("qrc_test_rows_csv");
  const auto path = dir / "rows.csv";
  qrc::write_rows_csv(path.string(), rows);
  const auto back = qrc::read_rows_csv(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].model == qrc::Model::qrc);
  CHECK(back[0].rms == rows[0].rms);
  CHECK(back[0].gamma == rows[0].gamma);
  CHECK(back[1].ok() == false);
  CHECK(back[1].status == rows[1].status);
  fs::remove_all(dir);
}

TEST_CASE("aggregate CSV header is the pinned schema") {
  const auto dir = temp_dir("qrc_test_agg_csv");
  const auto path = dir / "aggregate.csv";
  qrc::write_aggregate_csv(path.string(), {});
  const std::string text = slurp(path);
  CHECK(text ==
        "model,dim,train_size,noise_sigma_over_alpha,rms_mean,rms_std,rms_best,rms_worst,"
        "spread_factor,gamma_mode\n");
  fs::remove_all(dir);
}

TEST_CASE("svg chart is self-contained") {
  qrc::ChartSpec spec;
  spec.title = "demo";
  spec.x_label = "x";
  spec.y_label = "y";
  spec.log_y = true;
  qrc::ChartSeries s;
  s.label = "series";
  s.x = {1, 2, 3, 4};
  s.y = {1e-3, 5e-3, 2e-2, 1e-1};
  spec.series.push_back(s);
  qrc::ChartBand band;
  band.x = {1, 2, 3, 4};
  band.y_lo = {5e-4, 2e-3, 1e-2, 5e-2};
  band.y_hi = {2e-3, 1e-2, 4e-2, 2e-1};
  spec.bands.push_back(band);

  const auto dir = temp_dir("qrc_test_svg");
  const auto path = dir / "chart.svg";
  qrc::write_svg_chart(path.string(), spec);
  const std::string text = slurp(path);
  CHECK(text.find("<svg") == 0);
  CHECK(text.find("<polyline") != std::string::npos);
  CHECK(text.find("<polygon") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("href") == std::string::npos);     // no external assets
  CHECK(text.find("<image") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("empty result emits header-only CSVs and no charts") {
  qrc::ExperimentResult result;
  result.config = qrc::experiment_defaults(qrc::Experiment::train_size_sweep);
  const auto dir = temp_dir("qrc_test_empty_emit");
  qrc::emit_outputs(result, dir.string());
  CHECK(slurp(dir / "rows.csv").find('\n') == slurp(dir / "rows.csv").size() - 1);
  CHECK(slurp(dir / "aggregate.csv").find('\n') == slurp(dir / "aggregate.csv").size() - 1);
  bool any_svg = false;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".svg") any_svg = true;
  CHECK_FALSE(any_svg);
  fs::remove_all(dir);
}

TEST_CASE("config defaults follow the experiment protocols") {
  const auto fig1 = qrc::experiment_defaults(qrc::Experiment::train_size_sweep);
  CHECK(fig1.test_size == 5000);
  CHECK(fig1.n_reservoirs == 101);
  CHECK(fig1.dims == std::vector<int>{12});

  const auto dim = qrc::experiment_defaults(qrc::Experiment::dimension_sweep);
  CHECK(dim.dims.size() == 11);
  CHECK(dim.models == std::vector<qrc::Model>{qrc::Model::qrc});

  const auto noise_out = qrc::experiment_defaults(qrc::Experiment::output_noise_sweep);
  CHECK(noise_out.train_sizes == std::vector<int>{10});
  CHECK(noise_out.test_size == 5000);
  CHECK(noise_out.n_reservoirs == 1);

  const auto noise_in = qrc::experiment_defaults(qrc::Experiment::input_noise_sweep);
  CHECK(noise_in.test_size == 100);
  CHECK(noise_in.noise_grid.front() == 0.0);
}

TEST_CASE("config json round-trip preserves every field") {
  qrc::ExperimentConfig cfg = qrc::experiment_defaults(qrc::Experiment::model_comparison);
  cfg.seed = 987654321;
  cfg.test_size = 123;
  cfg.n_reservoirs = 7;
  cfg.train_sizes = {5, 30};
  cfg.classical_form = qrc::ClassicalForm::normal_ordered;
  cfg.radius_form = qrc::RadiusForm::conventional;
  cfg.rel_std = 0.05;
  cfg.out_dir = "elsewhere";
  const auto j = qrc::config_to_json(cfg);
  const auto back = qrc::config_from_json(j);
  CHECK(qrc::config_to_json(back) == j);
}

TEST_CASE("manifest wraps the config and reproduces it") {
  qrc::ExperimentConfig cfg = qrc::experiment_defaults(qrc::Experiment::train_size_sweep);
  cfg.seed = 77;
  cfg.n_reservoirs = 3;
  cfg.test_size = 10;
  const auto dir = temp_dir("qrc_test_manifest");
  const auto path = dir / "manifest.json";
  qrc::write_manifest(path.string(), cfg);
  const auto loaded = qrc::config_from_file(path.string());
  CHECK(qrc::config_to_json(loaded) == qrc::config_to_json(cfg));
  fs::remove_all(dir);
}

TEST_CASE("unknown config keys are rejected") {
  nlohmann::json j;
  j["experiment"] = "train_size_sweep";
  j["tset_size"] = 10;  // typo
  CHECK_THROWS_AS(qrc::config_from_json(j), qrc::ConfigError);
}

TEST_CASE("config validation rejects protocol violations") {
  auto cfg = qrc::experiment_defaults(qrc::Experiment::dimension_sweep);
  cfg.train_sizes = {5, 10};  // missing the M=30 slice
  CHECK_THROWS_AS(cfg.validate(), qrc::ConfigError);

  auto cfg2 = qrc::experiment_defaults(qrc::Experiment::train_size_sweep);
  cfg2.models = {qrc::Model::qrc};  // crc missing
  CHECK_THROWS_AS(cfg2.validate(), qrc::ConfigError);

  auto cfg3 = qrc::experiment_defaults(qrc::Experiment::output_noise_sweep);
  cfg3.n_reservoirs = 5;
  CHECK_THROWS_AS(cfg3.validate(), qrc::ConfigError);

  auto cfg4 = qrc::experiment_defaults(qrc::Experiment::input_noise_sweep);
  cfg4.fixed_dt = 3e-3;  // does not divide the 0.02 sample spacing... and too coarse
  CHECK_THROWS_AS(cfg4.validate(), qrc::ConfigError);

  auto cfg5 = qrc::experiment_defaults(qrc::Experiment::model_comparison);
  cfg5.dims = {4};
  CHECK_THROWS_AS(cfg5.validate(), qrc::ConfigError);
}
