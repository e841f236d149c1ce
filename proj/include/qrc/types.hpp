#pragma once

#include <stdexcept>
#include <vector>

namespace qrc {

/// Physical parameters of one Kerr oscillator reservoir, plus the Fock-space
/// truncation used when it is simulated quantum mechanically. All frequencies
/// are in units of the ensemble-mean decay rate.
struct ReservoirParams {
  double kerr = -2.0;        // Kerr nonlinearity K
  double kappa = 1.0;        // photon loss rate, must be > 0
  double drive_amp = 6.0;    // drive amplitude
  double drive_freq = 10.0;  // drive frequency
  int dim = 12;              // Hilbert-space truncation, >= 2

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("ReservoirParams: kappa must be > 0");
    if (dim < 2) throw std::invalid_argument("ReservoirParams: dim must be >= 2");
    if (drive_amp < 0.0) throw std::invalid_argument("ReservoirParams: drive_amp must be >= 0");
    if (drive_freq < 0.0) throw std::invalid_argument("ReservoirParams: drive_freq must be >= 0");
  }
};

/// Sampled reservoir output signal: n_out channels at each of times.size()
/// sample points. values is stored directly in stacking order -- channels vary
/// fastest within a time point, time points ascend -- so stacked() is just a
/// copy of values. That order is part of the training-data contract.
struct FeatureSeries {
  int n_out = 0;
  std::vector<double> times;
  std::vector<double> values;  // size n_out * times.size()

  int n_samples() const { return static_cast<int>(times.size()); }

  double value(int channel, int sample) const {
    return values[static_cast<std::size_t>(sample) * n_out + channel];
  }
  double& value(int channel, int sample) {
    return values[static_cast<std::size_t>(sample) * n_out + channel];
  }

  std::vector<double> stacked() const { return values; }

  void validate(double t_signal) const {
    if (n_out < 1) throw std::invalid_argument("FeatureSeries: n_out must be >= 1");
    if (values.size() != times.size() * static_cast<std::size_t>(n_out))
      throw std::invalid_argument("FeatureSeries: values size does not match n_out * n_samples");
    double prev = 0.0;  // times must lie in (0, t_signal]
    for (double t : times) {
      if (!(t > prev)) throw std::invalid_argument("FeatureSeries: times must be strictly increasing and > 0");
      prev = t;
    }
    if (!times.empty() && times.back() > t_signal * (1.0 + 1e-12))
      throw std::invalid_argument("FeatureSeries: sample time beyond signal duration");
  }
};

}  // namespace qrc
