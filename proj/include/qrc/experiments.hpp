#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qrc/classical.hpp"
#include "qrc/quantum.hpp"
#include "qrc/readout.hpp"
#include "qrc/task.hpp"

namespace qrc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  train_size_sweep,
  dimension_sweep,
  model_comparison,
  output_noise_sweep,
  input_noise_sweep,
};

enum class Model { qrc, full_qrc, crc, full_crc, hvrc };

enum class NoiseKind { none, output, input };

enum class GammaSelection { test_set, holdout };

/// Serial keeps a plain reference loop; parallel runs the same work items on
/// an OpenMP pool. Both orders of execution produce bitwise-identical results.
enum class RunMode { serial, parallel };

std::string to_string(Experiment e);
std::string to_string(Model m);
std::string to_string(NoiseKind k);
std::string to_string(ClassicalForm f);
std::string to_string(RadiusForm f);
std::string to_string(GammaSelection g);
Experiment experiment_from_string(const std::string& s);
Model model_from_string(const std::string& s);
NoiseKind noise_kind_from_string(const std::string& s);
ClassicalForm classical_form_from_string(const std::string& s);
RadiusForm radius_form_from_string(const std::string& s);
GammaSelection gamma_selection_from_string(const std::string& s);

/// Output channel count per model: 1 for qrc/crc, 2 for full_crc, 3 for
/// full_qrc and hvrc.
int model_output_channels(Model m);

struct ExperimentConfig {
  Experiment experiment = Experiment::train_size_sweep;
  std::vector<Model> models = {Model::qrc, Model::crc};
  std::vector<int> dims = {12};
  std::vector<int> train_sizes = {2, 5, 10, 20, 30, 50, 75, 100};
  int test_size = 5000;
  int n_reservoirs = 101;
  std::uint64_t seed = 1;
  std::vector<double> noise_grid = {0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  ClassicalForm classical_form = ClassicalForm::literal;
  RadiusForm radius_form = RadiusForm::literal;
  GammaSelection gamma_selection = GammaSelection::test_set;
  double rel_std = 0.10;
  int threads = 0;        // 0 keeps the runtime default
  double fixed_dt = 1e-3; // input-noise integration step
  double t_signal = 2.0;
  int n_samples = 100;
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError
};

/// Reference-protocol defaults for each experiment (set sizes, models, grids).
ExperimentConfig experiment_defaults(Experiment e);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RowResult {
  Model model = Model::qrc;
  int dim = 0;  // 0 for the classical models
  int n_out = 1;
  int train_size = 0;
  NoiseKind noise_kind = NoiseKind::none;
  double noise_sigma_over_alpha = 0.0;
  int reservoir_index = 0;
  double rms = kNaN;
  double gamma = kNaN;
  double fixed_dt = 0.0;      // input-noise rows only
  double noise_scale_s = 0.0; // input-noise rows only
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct AggregateRow {
  Model model = Model::qrc;
  int dim = 0;
  int train_size = 0;
  double noise_sigma_over_alpha = 0.0;
  int count = 0;  // contributing rows
  PerformanceStats stats{};
  double gamma_mode = kNaN;  // most frequent selected gamma, ties toward larger
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReservoirParams> ensemble;  // index 0 is the exact mean set
  std::vector<RowResult> rows;
  std::vector<AggregateRow> aggregates;
  // model_comparison only: max |hvrc - transform(full_qrc)| over shared
  // test features of reservoir 0.
  std::optional<double> hvrc_transform_check;

  bool any_failed() const {
    for (const auto& r : rows)
      if (!r.ok()) return true;
    return false;
  }
};

/// Aggregates per-reservoir rows by (model, dim, train_size, noise level) in
/// first-appearance order. Failed rows are excluded from the statistics.
std::vector<AggregateRow> aggregate_rows(const std::vector<RowResult>& rows);

/// Runs the configured experiment. Work is decomposed into independent
/// simulation and readout items with per-item random streams, so the result is
/// identical for any worker count and for both run modes.
ExperimentResult run_experiment(const ExperimentConfig& cfg, RunMode mode = RunMode::parallel);

}  // namespace qrc
