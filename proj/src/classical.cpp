#include "qrc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qrc/quantum.hpp"

namespace qrc {

namespace {

// Real/imaginary components of the equation of motion; u is the full
// instantaneous drive value.
void crc_derivative(double re, double im, const ReservoirParams& p, double u, ClassicalForm form,
                    double& dre, double& dim) {
  const double half_kappa = 0.5 * p.kappa;
  switch (form) {
    case ClassicalForm::literal:
      // -iK(a - 2a*): a - 2a* = (-re, 3 im) componentwise
      dre = 3.0 * p.kerr * im - half_kappa * re;
      dim = p.kerr * re - half_kappa * im - u;
      return;
    case ClassicalForm::normal_ordered: {
      const double c = p.kerr * (1.0 + 2.0 * (re * re + im * im));
      dre = c * im - half_kappa * re;
      dim = -c * re - half_kappa * im - u;
      return;
    }
  }
  throw std::invalid_argument("crc_rhs: unknown classical form");
}

FeatureSeries features_from_amplitudes(std::span<const double> sample_times,
                                       const std::vector<FlatState>& states, bool full_quadratures) {
  const double root2 = std::sqrt(2.0);
  FeatureSeries fs;
  fs.n_out = full_quadratures ? 2 : 1;
  fs.times.assign(sample_times.begin(), sample_times.end());
  fs.values.resize(fs.times.size() * static_cast<std::size_t>(fs.n_out));
  for (std::size_t s = 0; s < states.size(); ++s) {
    fs.value(0, static_cast<int>(s)) = root2 * states[s][0];
    if (full_quadratures) fs.value(1, static_cast<int>(s)) = root2 * states[s][1];
  }
  return fs;
}

void check_inputs(const ReservoirParams& params, std::span<const double> sample_times) {
  params.validate();
  if (sample_times.empty()) throw std::invalid_argument("sample_times must be non-empty");
  double prev = 0.0;
  for (double t : sample_times) {
    if (!(t > prev)) throw std::invalid_argument("sample_times must be strictly increasing and > 0");
    prev = t;
  }
}

}  // namespace

ClassicalAmplitude crc_rhs(const ClassicalAmplitude& a, const ReservoirParams& params, double u,
                           ClassicalForm form) {
  ClassicalAmplitude d;
  crc_derivative(a.re, a.im, params, u, form, d.re, d.im);
  return d;
}

FeatureSeries simulate_crc(const ReservoirParams& params, double phase,
                           std::span<const double> sample_times, bool full_quadratures,
                           ClassicalForm form, const IntegratorConfig& cfg) {
  check_inputs(params, sample_times);
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    crc_derivative(y[0], y[1], params, amp * std::sin(freq * t + phase), form, dy[0], dy[1]);
  };
  const auto states = integrate_adaptive(rhs, FlatState{0.0, 0.0}, 0.0, sample_times, cfg);
  return features_from_amplitudes(sample_times, states, full_quadratures);
}

FeatureSeries simulate_crc_input_noise(const ReservoirParams& params, double phase,
                                       std::span<const double> sample_times,
                                       std::span<const double> step_noise, bool full_quadratures,
                                       ClassicalForm form, const IntegratorConfig& cfg) {
  check_inputs(params, sample_times);
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  auto rhs = [&](double t, std::span<const double> y, double xi, std::span<double> dy) {
    crc_derivative(y[0], y[1], params, amp * std::sin(freq * t + phase) + xi, form, dy[0], dy[1]);
  };
  const auto states = integrate_fixed_noisy(rhs, FlatState{0.0, 0.0}, 0.0, sample_times.back(), cfg,
                                            step_noise, sample_times);
  return features_from_amplitudes(sample_times, states, full_quadratures);
}

BlochVector bloch_from_density(const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("bloch_from_density: requires a 2x2 density matrix");
  BlochVector b;
  b.x = 2.0 * rho(0, 1).real();
  b.y = -2.0 * rho(0, 1).imag();
  b.z = rho(0, 0).real() - rho(1, 1).real();
  return b;
}

HVCoords hv_from_bloch(const BlochVector& b, RadiusForm radius) {
  const double r2 = b.x * b.x + b.y * b.y + b.z * b.z;
  HVCoords hv;
  hv.r = radius == RadiusForm::literal ? r2 : std::sqrt(r2);
  if (hv.r == 0.0) return hv;  // theta and phi default to 0 at the origin
  hv.theta = std::acos(std::clamp(b.z / hv.r, -1.0, 1.0));
  hv.phi = std::atan2(b.y, b.x);
  return hv;
}

FeatureSeries hv_transform_series(const FeatureSeries& bloch_series, RadiusForm radius) {
  if (bloch_series.n_out != 3)
    throw std::invalid_argument("hv_transform_series: expected a 3-channel (x, y, z) series");
  FeatureSeries fs;
  fs.n_out = 3;
  fs.times = bloch_series.times;
  fs.values.resize(bloch_series.values.size());
  for (int s = 0; s < bloch_series.n_samples(); ++s) {
    const BlochVector b{bloch_series.value(0, s), bloch_series.value(1, s), bloch_series.value(2, s)};
    const HVCoords hv = hv_from_bloch(b, radius);
    fs.value(0, s) = hv.r;
    fs.value(1, s) = hv.theta;
    fs.value(2, s) = hv.phi;
  }
  return fs;
}

FeatureSeries simulate_hvrc(const ReservoirParams& params, double phase,
                            std::span<const double> sample_times, RadiusForm radius,
                            const IntegratorConfig& cfg) {
  ReservoirParams qubit = params;
  qubit.dim = 2;
  return hv_transform_series(simulate_qrc(qubit, phase, sample_times, true, cfg), radius);
}

FeatureSeries simulate_hvrc_input_noise(const ReservoirParams& params, double phase,
                                        std::span<const double> sample_times,
                                        std::span<const double> step_noise, RadiusForm radius,
                                        const IntegratorConfig& cfg) {
  ReservoirParams qubit = params;
  qubit.dim = 2;
  return hv_transform_series(simulate_qrc_input_noise(qubit, phase, sample_times, step_noise, true, cfg),
                             radius);
}

}  // namespace qrc
