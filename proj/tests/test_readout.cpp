#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "qrc/readout.hpp"
#include "qrc/rng.hpp"

using qrc::ReadoutWeights;
using qrc::TrainingSet;

namespace {

// Brute-force ridge oracle: forms the normal equations densely and solves by
// Gauss-Jordan elimination with partial pivoting. Shares no code with the
// production path.
std::vector<double> oracle_ridge(const Eigen::MatrixXd& s, const std::vector<double>& y,
                                 double gamma) {
  const int n = static_cast<int>(s.rows());
  const int m = static_cast<int>(s.cols());
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += s(i, k) * s(j, k);
      a[i][j] = acc;
    }
    a[i][i] += gamma;
    double rhs = 0.0;
    for (int k = 0; k < m; ++k) rhs += s(i, k) * y[static_cast<std::size_t>(k)];
    a[i][n] = rhs;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    const double p = a[col][col];
    for (int c = col; c <= n; ++c) a[col][c] /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = a[i][n];
  return w;
}

TrainingSet random_training_set(int n_features, int m, qrc::Rng& rng) {
  TrainingSet ts;
  ts.features = Eigen::MatrixXd(n_features, m);
  for (int i = 0; i < n_features; ++i)
    for (int j = 0; j < m; ++j) ts.features(i, j) = rng.gaussian();
  ts.phases.resize(static_cast<std::size_t>(m));
  for (auto& p : ts.phases) p = rng.uniform(0.0, 1.5);
  return ts;
}

}  // namespace

TEST_CASE("identity features reproduce the targets at gamma 0") {
  TrainingSet ts;
  ts.features = Eigen::MatrixXd::Identity(2, 2);
  ts.phases = {1.0, 2.0};
  const auto w = qrc::train_readout(ts, 0.0);
  CHECK(w.weights(0) == doctest::Approx(1.0));
  CHECK(w.weights(1) == doctest::Approx(2.0));
}

TEST_CASE("ridge shrinkage is monotone in gamma") {
  qrc::Rng rng(17);
  const auto ts = random_training_set(8, 6, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : qrc::gamma_grid()) {
    const auto w = qrc::train_readout(ts, gamma);
    const double norm = w.weights.norm();
    CHECK(norm <= prev * (1.0 + 1e-9));
    prev = norm;
  }
  const auto w_huge = qrc::train_readout(ts, 1e12);
  CHECK(w_huge.weights.norm() < 1e-6);
}

TEST_CASE("trained weights match the brute-force oracle") {
  qrc::Rng rng(90210);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 18);
    const int m = 1 + static_cast<int>(rng.uniform() * 19);
    const double gamma = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
    const auto ts = random_training_set(n, m, rng);
    const auto w = qrc::train_readout(ts, gamma);
    const auto ref = oracle_ridge(ts.features, ts.phases, gamma);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += std::pow(w.weights(i) - ref[static_cast<std::size_t>(i)], 2);
      den += std::pow(ref[static_cast<std::size_t>(i)], 2);
    }
    CHECK(std::sqrt(num) <= 1e-10 * std::max(1.0, std::sqrt(den)));
  }
}

TEST_CASE("ridge optimality: gradient of the penalized loss vanishes") {
  qrc::Rng rng(5150);
  const auto ts = random_training_set(10, 7, rng);
  const double gamma = 1e-3;
  const auto w = qrc::train_readout(ts, gamma);
  // gradient of ||y - wS||^2 + gamma ||w||^2 is 2(w(SS^T + gamma I) - yS^T)
  const Eigen::MatrixXd& s = ts.features;
  const Eigen::RowVectorXd y = Eigen::Map<const Eigen::RowVectorXd>(ts.phases.data(), 7);
  const Eigen::RowVectorXd grad =
      2.0 * (w.weights * (s * s.transpose() + gamma * Eigen::MatrixXd::Identity(10, 10)) -
             y * s.transpose());
  const double s2 = (s * s.transpose()).norm();
  CHECK(grad.norm() <= 1e-8 * (1.0 + s2));
}

TEST_CASE("exact interpolation at tiny gamma for full-column-rank features") {
  qrc::Rng rng(31);
  const int n = 30, m = 8;
  const auto ts = random_training_set(n, m, rng);
  const auto w = qrc::train_readout(ts, 1e-12);
  std::vector<double> est(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = ts.features(i, j);
    est[static_cast<std::size_t>(j)] = qrc::predict(w, col);
  }
  CHECK(qrc::rms_error(est, ts.phases) <= 1e-6);
}

TEST_CASE("rank-deficient system at gamma 0 raises an advisory error") {
  TrainingSet ts;
  ts.features = Eigen::MatrixXd::Zero(4, 2);
  ts.features(0, 0) = 1.0;
  ts.features(0, 1) = 1.0;  // rank 1, singular gram at gamma 0
  ts.phases = {1.0, 2.0};
  CHECK_THROWS_AS(qrc::train_readout(ts, 0.0), qrc::RankDeficientError);
}

TEST_CASE("predict is a linear functional") {
  qrc::Rng rng(8);
  ReadoutWeights w;
  w.weights = Eigen::RowVectorXd(5);
  for (int i = 0; i < 5; ++i) w.weights(i) = rng.gaussian();

  std::vector<double> zero_features(5, 0.0);
  ReadoutWeights zero_w;
  zero_w.weights = Eigen::RowVectorXd::Zero(5);
  CHECK(qrc::predict(zero_w, zero_features) == 0.0);

  ReadoutWeights unit;
  unit.weights = Eigen::RowVectorXd::Zero(5);
  unit.weights(3) = 1.0;
  std::vector<double> f{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(qrc::predict(unit, f) == doctest::Approx(0.4));

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f1(5), f2(5), sum(5);
    for (int i = 0; i < 5; ++i) {
      f1[static_cast<std::size_t>(i)] = rng.gaussian();
      f2[static_cast<std::size_t>(i)] = rng.gaussian();
      sum[static_cast<std::size_t>(i)] = f1[static_cast<std::size_t>(i)] + f2[static_cast<std::size_t>(i)];
    }
    CHECK(std::abs(qrc::predict(w, sum) - qrc::predict(w, f1) - qrc::predict(w, f2)) < 1e-12);
  }

  std::vector<double> too_short(3, 0.0);
  CHECK_THROWS_AS(qrc::predict(w, too_short), std::invalid_argument);
}

TEST_CASE("rms error reference values") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(qrc::rms_error(a, a) == 0.0);

  const std::vector<double> shifted{1.25, 2.25, 3.25};
  CHECK(qrc::rms_error(shifted, a) == doctest::Approx(0.25));

  const std::vector<double> est{0.3, -0.4};
  const std::vector<double> act{0.0, 0.0};
  CHECK(qrc::rms_error(est, act) == doctest::Approx(0.35355339059327373));

  CHECK_THROWS_AS(qrc::rms_error({}, {}), std::invalid_argument);
  const std::vector<double> b{1.0};
  CHECK_THROWS_AS(qrc::rms_error(a, b), std::invalid_argument);
}

TEST_CASE("spread factor reference values") {
  CHECK(qrc::spread_factor(0.5, 0.5, 1.0) == 0.0);
  CHECK(qrc::spread_factor(1.0, 3.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(qrc::spread_factor(1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(qrc::spread_factor(3.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("gamma sweep selects the grid minimum") {
  qrc::Rng rng(64);
  const auto ts = random_training_set(6, 6, rng);  // full rank, train == test
  const auto result = qrc::gamma_sweep(ts, ts.features, ts.phases);

  const auto w1 = qrc::train_readout(ts, 1.0);
  std::vector<double> est(6);
  for (int j = 0; j < 6; ++j) {
    std::vector<double> col(6);
    for (int i = 0; i < 6; ++i) col[static_cast<std::size_t>(i)] = ts.features(i, j);
    est[static_cast<std::size_t>(j)] = qrc::predict(w1, col);
  }
  CHECK(result.rms <= qrc::rms_error(est, ts.phases) + 1e-15);
}

TEST_CASE("extending the candidate grid can only improve the minimum") {
  qrc::Rng rng(65);
  const auto ts = random_training_set(8, 5, rng);
  const auto eval = random_training_set(8, 9, rng);

  const auto base = qrc::gamma_sweep(ts, eval.features, eval.phases);
  auto grid = qrc::gamma_grid();
  std::vector<double> extended(grid.begin(), grid.end());
  extended.push_back(3.3e-5);
  const auto wider = qrc::gamma_sweep(ts, eval.features, eval.phases, extended);
  CHECK(wider.rms <= base.rms + 1e-15);
}

TEST_CASE("duplicate training columns are handled by the sweep") {
  qrc::Rng rng(66);
  TrainingSet ts = random_training_set(6, 3, rng);
  ts.features.col(2) = ts.features.col(1);  // rank deficient
  ts.phases[2] = ts.phases[1];
  const auto eval = random_training_set(6, 5, rng);
  const auto result = qrc::gamma_sweep(ts, eval.features, eval.phases);
  CHECK(std::isfinite(result.rms));
}

TEST_CASE("ties between gamma values break toward the larger one") {
  TrainingSet ts;
  ts.features = Eigen::MatrixXd::Zero(4, 3);  // all-zero features: W = 0 for every gamma
  ts.phases = {0.3, 0.6, 0.9};
  Eigen::MatrixXd eval = Eigen::MatrixXd::Zero(4, 2);
  const std::vector<double> eval_phases{0.2, 0.4};
  const auto result = qrc::gamma_sweep(ts, eval, eval_phases);
  CHECK(result.weights.gamma == doctest::Approx(1.0));
}

TEST_CASE("holdout sweep reports the test error of the validation choice") {
  qrc::Rng rng(67);
  const auto ts = random_training_set(10, 6, rng);
  const auto val = random_training_set(10, 8, rng);
  const auto test = random_training_set(10, 8, rng);
  const auto result = qrc::gamma_sweep_holdout(ts, val.features, val.phases, test.features, test.phases);
  // the reported rms must be the test-set rms of the selected weights
  const Eigen::RowVectorXd est = result.weights.weights * test.features;
  double s = 0.0;
  for (int j = 0; j < 8; ++j) s += std::pow(est(j) - test.phases[static_cast<std::size_t>(j)], 2);
  CHECK(result.rms == doctest::Approx(std::sqrt(s / 8.0)));
}

TEST_CASE("performance stats summarize an ensemble") {
  const std::vector<double> rms{0.2, 0.1, 0.4};
  const auto st = qrc::performance_stats(rms);
  CHECK(st.rms_best == doctest::Approx(0.1));
  CHECK(st.rms_worst == doctest::Approx(0.4));
  CHECK(st.rms_mean == doctest::Approx(0.7 / 3.0));
  CHECK(st.spread_factor == doctest::Approx((0.4 - 0.1) / (0.7 / 3.0)));
  CHECK(st.rms_best <= st.rms_mean);
  CHECK(st.rms_mean <= st.rms_worst);
}

TEST_CASE("weights CSV round-trips exactly") {
  ReadoutWeights w;
  w.gamma = 1e-7;
  w.weights = Eigen::RowVectorXd(3);
  w.weights << 0.1, -2.5e-13, 3.00000000000004;
  const auto path = std::filesystem::temp_directory_path() / "qrc_weights_test.csv";
  qrc::save_weights_csv(path.string(), w);
  const auto back = qrc::load_weights_csv(path.string());
  CHECK(back.gamma == w.gamma);
  REQUIRE(back.weights.size() == w.weights.size());
  for (int i = 0; i < 3; ++i) CHECK(back.weights(i) == w.weights(i));
  std::filesystem::remove(path);
}
