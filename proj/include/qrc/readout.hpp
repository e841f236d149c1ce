#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/types.hpp"

namespace qrc {

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training data for the linear readout: column j of features is the stacked
/// FeatureSeries for phases[j].
struct TrainingSet {
  std::vector<double> phases;
  Eigen::MatrixXd features;  // (n_out * n_samples) x M

  static TrainingSet from_series(std::span<const double> phases,
                                 const std::vector<FeatureSeries>& series);
};

/// Stacks a list of FeatureSeries as the columns of a feature matrix.
Eigen::MatrixXd feature_matrix(const std::vector<FeatureSeries>& series);

struct ReadoutWeights {
  Eigen::RowVectorXd weights;
  double gamma = 0.0;
};

/// Ridge-regression readout W = Y Sᵀ (S Sᵀ + γI)⁻¹, computed by solving the
/// symmetric positive-(semi)definite system rather than inverting. Throws
/// RankDeficientError when the system cannot be solved reliably (singular at
/// gamma = 0); use gamma > 0 in that case.
ReadoutWeights train_readout(const TrainingSet& ts, double gamma);

/// Linear readout output W · s for one stacked feature vector.
double predict(const ReadoutWeights& w, std::span<const double> stacked_features);

/// Root-mean-square error sqrt(sum |est - act|² / T).
double rms_error(std::span<const double> estimated, std::span<const double> actual);

/// (worst - best) / mean, reported as a nonnegative magnitude. Requires
/// mean > 0 and best <= worst, where best is the lowest error.
double spread_factor(double best, double worst, double mean);

/// The 13-point grid 1e-12, 1e-11, ..., 1 used for ridge-parameter selection.
std::array<double, 13> gamma_grid();

struct GammaSweepResult {
  ReadoutWeights weights;
  double rms = 0.0;
};

/// Trains at every grid value, evaluates RMS error on the evaluation set, and
/// returns the weights achieving the minimum. Ties break toward larger gamma;
/// grid values that fail to train or produce non-finite errors are skipped.
GammaSweepResult gamma_sweep(const TrainingSet& train, const Eigen::MatrixXd& eval_features,
                             std::span<const double> eval_phases,
                             std::span<const double> grid = {});

/// Held-out variant: gamma is selected on the validation set, the reported RMS
/// is then computed on the test set with the selected weights.
GammaSweepResult gamma_sweep_holdout(const TrainingSet& train, const Eigen::MatrixXd& val_features,
                                     std::span<const double> val_phases,
                                     const Eigen::MatrixXd& test_features,
                                     std::span<const double> test_phases,
                                     std::span<const double> grid = {});

/// Summary statistics of per-reservoir RMS errors.
struct PerformanceStats {
  double rms_mean = 0.0;
  double rms_std = 0.0;
  double rms_best = 0.0;
  double rms_worst = 0.0;
  double spread_factor = 0.0;
};

PerformanceStats performance_stats(std::span<const double> rms_values);

// Weight vectors round-trip as a single CSV row: gamma, then the entries.
void save_weights_csv(const std::string& path, const ReadoutWeights& w);
ReadoutWeights load_weights_csv(const std::string& path);

}  // namespace qrc
