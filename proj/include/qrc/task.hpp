#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "qrc/operators.hpp"
#include "qrc/rng.hpp"
#include "qrc/types.hpp"

namespace qrc {

inline constexpr double kPhaseMin = 0.0;
inline constexpr double kPhaseMax = std::numbers::pi / 2.0;

/// Signal duration, output sample count and set sizes for the phase-estimation
/// task. The sample grid is t_k = k * (t_signal / n_samples), k = 1..n_samples;
/// t = 0 is excluded because the output there is identically zero.
struct TaskConfig {
  double t_signal = 2.0;
  int n_samples = 100;
  int train_size = 30;
  int test_size = 5000;

  std::vector<double> sample_times() const;
};

struct NoiseConfig {
  double output_sigma = 0.0;  // in units of the drive amplitude
  double input_scale = 0.0;   // white-noise spectral amplitude s
  std::uint64_t seed = 0;
};

/// Per-step standard deviation of the discretized input white noise,
/// s * sqrt(dt).
double input_noise_step_sigma(double input_scale, double fixed_dt);

/// Gaussian parameter ensemble: each scalar is drawn around its mean with
/// standard deviation rel_std * |mean|.
struct ParameterDistribution {
  ReservoirParams means{};  // K = -2, kappa = 1, alpha = 6, omega = 10
  double rel_std = 0.10;
  int count = 101;
};

/// Drive signal u(t) = drive_amp * sin(drive_freq * t + phase). The amplitude
/// is applied exactly once, here.
std::function<double(double)> make_signal(double phase, const ReservoirParams& params);

/// M equidistant training phases spanning [0, pi/2] inclusive of both ends.
std::vector<double> training_phases(int m);

/// T uniform random phases on [0, pi/2); deterministic under the stream.
std::vector<double> test_phases(int t, Rng& rng);

/// Adds i.i.d. zero-mean Gaussian noise of absolute standard deviation
/// sigma_abs to every sampled value, in stacking order. sigma_abs = 0 returns
/// the input bitwise-unchanged without consuming the stream.
FeatureSeries add_output_noise(FeatureSeries fs, double sigma_abs, Rng& rng);

/// Draws `count` parameter sets; kappa, drive_amp and drive_freq are resampled
/// until positive.
std::vector<ReservoirParams> sample_parameters(const ParameterDistribution& dist, Rng& rng);

/// Quantum uncertainty of the X-quadrature output,
/// sqrt(Tr[rho X²] - Tr[rho X]²).
double measurement_uncertainty(const ComplexMatrix& rho);

/// Standard error after averaging R repeated runs: measurement_uncertainty / sqrt(R).
double repeated_measurement_uncertainty(const ComplexMatrix& rho, int repetitions);

}  // namespace qrc
