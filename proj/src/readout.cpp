#include "qrc/readout.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrc {

Eigen::MatrixXd feature_matrix(const std::vector<FeatureSeries>& series) {
  if (series.empty()) throw std::invalid_argument("feature_matrix: no series");
  const std::size_t rows = series.front().values.size();
  Eigen::MatrixXd m(rows, series.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    if (series[j].values.size() != rows)
      throw std::invalid_argument("feature_matrix: inconsistent series lengths");
    const auto stacked = series[j].stacked();
    m.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(stacked.data(), static_cast<Eigen::Index>(rows));
  }
  return m;
}

TrainingSet TrainingSet::from_series(std::span<const double> phases,
                                     const std::vector<FeatureSeries>& series) {
  if (phases.size() != series.size())
    throw std::invalid_argument("TrainingSet: phases and series count differ");
  TrainingSet ts;
  ts.phases.assign(phases.begin(), phases.end());
  ts.features = feature_matrix(series);
  return ts;
}

ReadoutWeights train_readout(const TrainingSet& ts, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("train_readout: gamma must be >= 0");
  if (ts.features.size() == 0) throw std::invalid_argument("train_readout: empty features");
  if (static_cast<std::size_t>(ts.features.cols()) != ts.phases.size())
    throw std::invalid_argument("train_readout: feature columns and phase count differ");

  const Eigen::MatrixXd& s = ts.features;
  Eigen::MatrixXd gram = s * s.transpose();
  gram.diagonal().array() += gamma;
  const Eigen::VectorXd targets =
      s * Eigen::Map<const Eigen::VectorXd>(ts.phases.data(), static_cast<Eigen::Index>(ts.phases.size()));

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (gamma == 0.0) {
    // with no ridge term a singular gram matrix is unsolvable by contract,
    // even when the right-hand side happens to be consistent
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    const double tol = dmax * static_cast<double>(gram.rows()) * std::numeric_limits<double>::epsilon();
    if (!(dmax > 0.0) || d.minCoeff() <= tol)
      throw RankDeficientError("train_readout: singular system at gamma = 0; use gamma > 0");
  }
  Eigen::VectorXd w;
  if (ldlt.info() == Eigen::Success) w = ldlt.solve(targets);
  const double scale = std::max(1.0, targets.norm());
  if (ldlt.info() != Eigen::Success || !w.allFinite() || (gram * w - targets).norm() > 1e-6 * scale)
    throw RankDeficientError("train_readout: system is rank deficient; use gamma > 0");

  ReadoutWeights out;
  out.weights = w.transpose();
  out.gamma = gamma;
  return out;
}

double predict(const ReadoutWeights& w, std::span<const double> stacked_features) {
  if (static_cast<std::size_t>(w.weights.size()) != stacked_features.size())
    throw std::invalid_argument("predict: feature length does not match weight length");
  return w.weights.dot(Eigen::Map<const Eigen::VectorXd>(stacked_features.data(),
                                                         static_cast<Eigen::Index>(stacked_features.size())));
}

double rms_error(std::span<const double> estimated, std::span<const double> actual) {
  if (estimated.empty()) throw std::invalid_argument("rms_error: empty input");
  if (estimated.size() != actual.size()) throw std::invalid_argument("rms_error: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double d = estimated[i] - actual[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(estimated.size()));
}

double spread_factor(double best, double worst, double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("spread_factor: mean must be > 0");
  if (best > worst) throw std::invalid_argument("spread_factor: best must not exceed worst");
  return (worst - best) / mean;
}

std::array<double, 13> gamma_grid() {
  std::array<double, 13> g{};
  for (int i = 0; i < 13; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, i - 12);
  return g;
}

namespace {

double eval_rms(const ReadoutWeights& w, const Eigen::MatrixXd& features,
                std::span<const double> phases) {
  if (static_cast<std::size_t>(features.cols()) != phases.size())
    throw std::invalid_argument("gamma_sweep: evaluation columns and phase count differ");
  const Eigen::RowVectorXd est = w.weights * features;
  double s = 0.0;
  for (Eigen::Index j = 0; j < est.size(); ++j) {
    const double d = est(j) - phases[static_cast<std::size_t>(j)];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(est.size()));
}

GammaSweepResult sweep_impl(const TrainingSet& train, const Eigen::MatrixXd& select_features,
                            std::span<const double> select_phases, std::span<const double> grid) {
  const auto default_grid = gamma_grid();
  if (grid.empty()) grid = std::span<const double>(default_grid.data(), default_grid.size());
  if (select_phases.empty()) throw std::invalid_argument("gamma_sweep: empty evaluation set");

  bool found = false;
  GammaSweepResult best;
  std::string last_error = "gamma_sweep: no grid value trained successfully";
  for (double gamma : grid) {
    ReadoutWeights w;
    try {
      w = train_readout(train, gamma);
    } catch (const RankDeficientError& e) {
      last_error = e.what();
      continue;
    }
    const double rms = eval_rms(w, select_features, select_phases);
    if (!std::isfinite(rms)) continue;
    if (!found || rms <= best.rms) {  // <= breaks ties toward larger gamma
      best.weights = std::move(w);
      best.rms = rms;
      found = true;
    }
  }
  if (!found) throw RankDeficientError(last_error);
  return best;
}

}  // namespace

GammaSweepResult gamma_sweep(const TrainingSet& train, const Eigen::MatrixXd& eval_features,
                             std::span<const double> eval_phases, std::span<const double> grid) {
  return sweep_impl(train, eval_features, eval_phases, grid);
}

GammaSweepResult gamma_sweep_holdout(const TrainingSet& train, const Eigen::MatrixXd& val_features,
                                     std::span<const double> val_phases,
                                     const Eigen::MatrixXd& test_features,
                                     std::span<const double> test_phases,
                                     std::span<const double> grid) {
  GammaSweepResult selected = sweep_impl(train, val_features, val_phases, grid);
  selected.rms = eval_rms(selected.weights, test_features, test_phases);
  return selected;
}

PerformanceStats performance_stats(std::span<const double> rms_values) {
  if (rms_values.empty()) throw std::invalid_argument("performance_stats: empty input");
  PerformanceStats st;
  st.rms_best = std::numeric_limits<double>::infinity();
  st.rms_worst = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : rms_values) {
    sum += v;
    st.rms_best = std::min(st.rms_best, v);
    st.rms_worst = std::max(st.rms_worst, v);
  }
  st.rms_mean = sum / static_cast<double>(rms_values.size());
  double var = 0.0;
  for (double v : rms_values) var += (v - st.rms_mean) * (v - st.rms_mean);
  st.rms_std = std::sqrt(var / static_cast<double>(rms_values.size()));
  st.spread_factor = spread_factor(st.rms_best, st.rms_worst, st.rms_mean);
  return st;
}

void save_weights_csv(const std::string& path, const ReadoutWeights& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_weights_csv: cannot open " + path);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w.gamma);
  out << buf;
  for (Eigen::Index i = 0; i < w.weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", w.weights(i));
    out << ',' << buf;
  }
  out << '\n';
}

ReadoutWeights load_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_weights_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_weights_csv: empty file " + path);
  std::stringstream ss(line);
  std::string cell;
  std::vector<double> vals;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.empty()) throw std::runtime_error("load_weights_csv: no values in " + path);
  ReadoutWeights w;
  w.gamma = vals.front();
  w.weights.resize(static_cast<Eigen::Index>(vals.size()) - 1);
  for (std::size_t i = 1; i < vals.size(); ++i)
    w.weights(static_cast<Eigen::Index>(i - 1)) = vals[i];
  return w;
}

}  // namespace qrc
