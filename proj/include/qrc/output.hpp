#pragma once

#include <string>
#include <vector>

#include "qrc/experiments.hpp"

namespace qrc {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

void write_rows_csv(const std::string& path, const std::vector<RowResult>& rows);
std::vector<RowResult> read_rows_csv(const std::string& path);

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& aggregates);

/// Parameter ensemble as index,K,kappa,alpha,omega_u.
void write_ensemble_csv(const std::string& path, const std::vector<ReservoirParams>& ensemble);

/// Sampled trajectory as time,channel,value.
void write_feature_series_csv(const std::string& path, const FeatureSeries& fs);

/// Run manifest: tool version, seed, and the full effective configuration.
/// Feeding the manifest back to `qrc run --config` reproduces the run.
void write_manifest(const std::string& path, const ExperimentConfig& cfg);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ChartBand {
  std::vector<double> x;
  std::vector<double> y_lo;
  std::vector<double> y_hi;
  std::string color = "#1f77b4";
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
  std::vector<ChartSeries> series;
  std::vector<ChartBand> bands;
};

/// Self-contained static SVG line chart (no external assets).
void write_svg_chart(const std::string& path, const ChartSpec& spec);

/// Writes rows.csv, aggregate.csv, ensemble.csv, manifest.json and one SVG
/// chart per figure analogue into out_dir. An empty result produces
/// header-only CSVs and no charts.
void emit_outputs(const ExperimentResult& result, const std::string& out_dir);

/// Recomputes aggregates and charts from a previously written rows.csv.
void replot(const std::string& rows_csv_path, const std::string& out_dir);

}  // namespace qrc
