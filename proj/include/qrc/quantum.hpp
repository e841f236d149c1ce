#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qrc/integrators.hpp"
#include "qrc/operators.hpp"
#include "qrc/types.hpp"

namespace qrc {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Density-matrix health thresholds enforced at every sample time.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kPositivitySlack = -1e-8;

/// Master-equation right-hand side -i[H, rho] + kappa (a rho a† - {a†a, rho}/2)
/// with the photon-loss dissipator built for rho's dimension. The result is
/// traceless and Hermitian for Hermitian inputs.
ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, double kappa);

struct QuantumTrajectory {
  ReservoirParams params;
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
};

/// Integrates the driven Kerr master equation from vacuum with drive
/// u(t) = drive_amp * sin(drive_freq * t + phase), returning the density
/// matrix at each sample time. Throws SimulationError if a sampled state
/// violates the Hermiticity/trace/positivity thresholds.
QuantumTrajectory simulate_qrc_trajectory(const ReservoirParams& params, double phase,
                                          std::span<const double> sample_times,
                                          const IntegratorConfig& cfg = {});

/// Sampled output signal: Tr[rho X] as a single channel, or with
/// full_tomography (dim == 2 only) the three Pauli expectation values
/// (x, y, z) as three channels.
FeatureSeries simulate_qrc(const ReservoirParams& params, double phase,
                           std::span<const double> sample_times, bool full_tomography = false,
                           const IntegratorConfig& cfg = {});

/// Fixed-step variant with additive per-step noise on the drive signal
/// (zero-order hold, causal). step_noise must have one value per fixed step
/// covering (0, last sample time].
FeatureSeries simulate_qrc_input_noise(const ReservoirParams& params, double phase,
                                       std::span<const double> sample_times,
                                       std::span<const double> step_noise, bool full_tomography,
                                       const IntegratorConfig& cfg);

struct TruncationReport {
  double max_top_population = 0.0;     // max over time of rho(d-1, d-1)
  double max_second_population = 0.0;  // max over time of rho(d-2, d-2)
  double max_commutator_error = 0.0;   // max over time of |Tr([a, a†] rho) - 1|
};

/// Descriptive truncation diagnostics over a sampled trajectory.
TruncationReport check_truncation(const QuantumTrajectory& trajectory);

}  // namespace qrc
