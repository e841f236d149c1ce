#pragma once

#include <span>

#include "qrc/integrators.hpp"
#include "qrc/operators.hpp"
#include "qrc/types.hpp"

namespace qrc {

/// Complex amplitude a = (X + iP)/√2 of the classical oscillator.
struct ClassicalAmplitude {
  double re = 0.0;
  double im = 0.0;
};

/// Which classical Kerr equation of motion to use. `literal` is
/// da/dt = -iK(a - 2a*) - (kappa/2) a - i u.
/// `normal_ordered` replaces the Kerr term with -iK(1 + 2|a|²) a.
enum class ClassicalForm { literal, normal_ordered };

ClassicalAmplitude crc_rhs(const ClassicalAmplitude& a, const ReservoirParams& params, double u,
                           ClassicalForm form = ClassicalForm::literal);

/// Integrates the classical oscillator from a(0) = 0 with drive
/// u(t) = drive_amp * sin(drive_freq * t + phase). Output channel is
/// X = √2 Re a, plus P = √2 Im a as a second channel when full_quadratures
/// is set.
FeatureSeries simulate_crc(const ReservoirParams& params, double phase,
                           std::span<const double> sample_times, bool full_quadratures = false,
                           ClassicalForm form = ClassicalForm::literal,
                           const IntegratorConfig& cfg = {});

FeatureSeries simulate_crc_input_noise(const ReservoirParams& params, double phase,
                                       std::span<const double> sample_times,
                                       std::span<const double> step_noise, bool full_quadratures,
                                       ClassicalForm form, const IntegratorConfig& cfg);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Pauli expectation values of a qubit density matrix (dim == 2 required).
BlochVector bloch_from_density(const ComplexMatrix& rho);

/// Radius convention for the spherical transform: `literal` uses
/// r = x² + y² + z², `conventional` uses the square root of that.
enum class RadiusForm { literal, conventional };

struct HVCoords {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Cartesian-to-spherical hidden-variable transform. theta = arccos(z/r) with
/// the argument clipped to [-1, 1]; phi = atan2(y, x) in (-pi, pi]. At r = 0
/// both angles default to 0 so features stay deterministic.
HVCoords hv_from_bloch(const BlochVector& b, RadiusForm radius = RadiusForm::literal);

/// Hidden-variable reservoir output: runs the qubit simulation with full
/// tomography and maps each sampled Bloch vector through hv_from_bloch,
/// giving the three channels (r, theta, phi).
FeatureSeries simulate_hvrc(const ReservoirParams& params, double phase,
                            std::span<const double> sample_times,
                            RadiusForm radius = RadiusForm::literal, const IntegratorConfig& cfg = {});

FeatureSeries simulate_hvrc_input_noise(const ReservoirParams& params, double phase,
                                        std::span<const double> sample_times,
                                        std::span<const double> step_noise, RadiusForm radius,
                                        const IntegratorConfig& cfg);

/// Applies hv_from_bloch samplewise to a 3-channel (x, y, z) series.
FeatureSeries hv_transform_series(const FeatureSeries& bloch_series, RadiusForm radius);

}  // namespace qrc
