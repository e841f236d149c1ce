#include "qrc/task.hpp"

#include <cmath>
#include <stdexcept>

namespace qrc {

std::vector<double> TaskConfig::sample_times() const {
  if (n_samples < 1) throw std::invalid_argument("TaskConfig: n_samples must be >= 1");
  if (!(t_signal > 0.0)) throw std::invalid_argument("TaskConfig: t_signal must be > 0");
  std::vector<double> times(static_cast<std::size_t>(n_samples));
  const double dt = t_signal / static_cast<double>(n_samples);
  for (int k = 1; k <= n_samples; ++k) times[static_cast<std::size_t>(k - 1)] = dt * k;
  return times;
}

double input_noise_step_sigma(double input_scale, double fixed_dt) {
  if (input_scale < 0.0) throw std::invalid_argument("input_noise_step_sigma: scale must be >= 0");
  if (!(fixed_dt > 0.0)) throw std::invalid_argument("input_noise_step_sigma: fixed_dt must be > 0");
  return input_scale * std::sqrt(fixed_dt);
}

std::function<double(double)> make_signal(double phase, const ReservoirParams& params) {
  if (phase < kPhaseMin || phase > kPhaseMax)
    throw std::invalid_argument("make_signal: phase must lie in [0, pi/2]");
  params.validate();
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  return [amp, freq, phase](double t) { return amp * std::sin(freq * t + phase); };
}

std::vector<double> training_phases(int m) {
  if (m < 2) throw std::invalid_argument("training_phases: need at least 2 phases");
  std::vector<double> phases(static_cast<std::size_t>(m));
  const double step = (kPhaseMax - kPhaseMin) / static_cast<double>(m - 1);
  for (int i = 0; i < m; ++i) phases[static_cast<std::size_t>(i)] = kPhaseMin + step * i;
  phases.back() = kPhaseMax;
  return phases;
}

std::vector<double> test_phases(int t, Rng& rng) {
  if (t < 1) throw std::invalid_argument("test_phases: need at least 1 phase");
  std::vector<double> phases(static_cast<std::size_t>(t));
  for (auto& p : phases) p = rng.uniform(kPhaseMin, kPhaseMax);
  return phases;
}

FeatureSeries add_output_noise(FeatureSeries fs, double sigma_abs, Rng& rng) {
  if (sigma_abs < 0.0) throw std::invalid_argument("add_output_noise: sigma must be >= 0");
  if (sigma_abs == 0.0) return fs;
  for (auto& v : fs.values) v += sigma_abs * rng.gaussian();
  return fs;
}

std::vector<ReservoirParams> sample_parameters(const ParameterDistribution& dist, Rng& rng) {
  dist.means.validate();
  if (dist.rel_std < 0.0) throw std::invalid_argument("sample_parameters: rel_std must be >= 0");
  if (dist.count < 0) throw std::invalid_argument("sample_parameters: count must be >= 0");

  const auto draw = [&](double mean) { return mean + dist.rel_std * std::abs(mean) * rng.gaussian(); };
  const auto draw_positive = [&](double mean) {
    double v = draw(mean);
    while (!(v > 0.0)) v = draw(mean);
    return v;
  };

  std::vector<ReservoirParams> out;
  out.reserve(static_cast<std::size_t>(dist.count));
  for (int i = 0; i < dist.count; ++i) {
    ReservoirParams p = dist.means;
    p.kerr = draw(dist.means.kerr);
    p.kappa = draw_positive(dist.means.kappa);
    p.drive_amp = draw_positive(dist.means.drive_amp);
    p.drive_freq = draw_positive(dist.means.drive_freq);
    out.push_back(p);
  }
  return out;
}

double measurement_uncertainty(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 2)
    throw std::invalid_argument("measurement_uncertainty: invalid density matrix");
  const ComplexMatrix x = quadrature_x(static_cast<int>(rho.rows()));
  const double ex = (rho * x).trace().real();
  const double ex2 = (rho * x * x).trace().real();
  return std::sqrt(std::max(0.0, ex2 - ex * ex));
}

double repeated_measurement_uncertainty(const ComplexMatrix& rho, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("repeated_measurement_uncertainty: R must be >= 1");
  return measurement_uncertainty(rho) / std::sqrt(static_cast<double>(repetitions));
}

}  // namespace qrc
