#include "qrc/quantum.hpp"

#include <cmath>
#include <complex>

#include "qrc/classical.hpp"

namespace qrc {

namespace {

// Structured right-hand side for H = K(a†a)² + u(a + a†) plus photon loss.
// H is tridiagonal and the dissipator is a diagonal shift, so one evaluation
// is O(d²). Only the upper triangle is computed; the lower triangle is the
// conjugate mirror, which keeps the state Hermitian to the bit through the
// linear Runge-Kutta updates.
struct DrivenKerrKernel {
  int dim;
  double kerr = 0.0;
  double kappa = 0.0;
  std::vector<double> sqrt_n;     // sqrt_n[k] = sqrt(k)
  std::vector<double> kerr_diag;  // kerr * n^2

  explicit DrivenKerrKernel(const ReservoirParams& p)
      : dim(p.dim), kerr(p.kerr), kappa(p.kappa), sqrt_n(p.dim + 1), kerr_diag(p.dim) {
    for (int k = 0; k <= dim; ++k) sqrt_n[k] = std::sqrt(static_cast<double>(k));
    for (int n = 0; n < dim; ++n) kerr_diag[n] = kerr * static_cast<double>(n) * static_cast<double>(n);
  }

  // y and dy are interleaved complex, column-major d x d.
  void operator()(double u, std::span<const double> y, std::span<double> dy) const {
    const auto* rho = reinterpret_cast<const Complex*>(y.data());
    auto* out = reinterpret_cast<Complex*>(dy.data());
    const int d = dim;
    const auto at = [&](int m, int n) { return rho[m + n * d]; };
    for (int n = 0; n < d; ++n) {
      for (int m = 0; m <= n; ++m) {
        Complex h_rho = kerr_diag[m] * at(m, n);
        if (m > 0) h_rho += u * sqrt_n[m] * at(m - 1, n);
        if (m + 1 < d) h_rho += u * sqrt_n[m + 1] * at(m + 1, n);

        Complex rho_h = kerr_diag[n] * at(m, n);
        if (n > 0) rho_h += u * sqrt_n[n] * at(m, n - 1);
        if (n + 1 < d) rho_h += u * sqrt_n[n + 1] * at(m, n + 1);

        Complex diss = -0.5 * static_cast<double>(m + n) * at(m, n);
        if (m + 1 < d && n + 1 < d) diss += sqrt_n[m + 1] * sqrt_n[n + 1] * at(m + 1, n + 1);

        const Complex val = Complex(0.0, -1.0) * (h_rho - rho_h) + kappa * diss;
        if (m == n) {
          out[m + n * d] = Complex(val.real(), 0.0);
        } else {
          out[m + n * d] = val;
          out[n + m * d] = std::conj(val);
        }
      }
    }
  }
};

FlatState vacuum_state(int dim) {
  FlatState y(2 * static_cast<std::size_t>(dim) * dim, 0.0);
  y[0] = 1.0;  // Re rho(0,0)
  return y;
}

ComplexMatrix matrix_from_flat(const FlatState& y, int dim) {
  return Eigen::Map<const ComplexMatrix>(reinterpret_cast<const Complex*>(y.data()), dim, dim);
}

void validate_sampled_state(const ComplexMatrix& rho, double t) {
  const double herm = hermiticity_deviation(rho);
  if (herm > kHermitianTol)
    throw SimulationError("density matrix lost Hermiticity (" + std::to_string(herm) + ") at t = " +
                          std::to_string(t));
  const double tr = trace_deviation(rho);
  if (tr > kTraceTol)
    throw SimulationError("density matrix trace drifted (" + std::to_string(tr) + ") at t = " +
                          std::to_string(t));
  const double lo = min_diagonal_real(rho);
  if (lo < kPositivitySlack)
    throw SimulationError("density matrix lost positivity (" + std::to_string(lo) + ") at t = " +
                          std::to_string(t));
}

double expectation_x(const ComplexMatrix& rho) {
  // Tr[rho X] = sum_m sqrt((m+1)/2) * 2 Re rho(m, m+1)
  double s = 0.0;
  const int d = static_cast<int>(rho.rows());
  for (int m = 0; m + 1 < d; ++m)
    s += std::sqrt(0.5 * static_cast<double>(m + 1)) * 2.0 * rho(m, m + 1).real();
  return s;
}

FeatureSeries features_from_states(const ReservoirParams& params, std::span<const double> sample_times,
                                   const std::vector<FlatState>& states, bool full_tomography) {
  FeatureSeries fs;
  fs.n_out = full_tomography ? 3 : 1;
  fs.times.assign(sample_times.begin(), sample_times.end());
  fs.values.resize(fs.times.size() * static_cast<std::size_t>(fs.n_out));
  for (std::size_t s = 0; s < states.size(); ++s) {
    const ComplexMatrix rho = matrix_from_flat(states[s], params.dim);
    validate_sampled_state(rho, sample_times[s]);
    if (full_tomography) {
      const BlochVector b = bloch_from_density(rho);
      fs.value(0, static_cast<int>(s)) = b.x;
      fs.value(1, static_cast<int>(s)) = b.y;
      fs.value(2, static_cast<int>(s)) = b.z;
    } else {
      fs.value(0, static_cast<int>(s)) = expectation_x(rho);
    }
  }
  return fs;
}

void check_simulation_inputs(const ReservoirParams& params, std::span<const double> sample_times,
                             bool full_tomography) {
  params.validate();
  if (full_tomography && params.dim != 2)
    throw std::invalid_argument("full tomography output is only defined for dim == 2");
  if (sample_times.empty()) throw std::invalid_argument("sample_times must be non-empty");
  double prev = 0.0;
  for (double t : sample_times) {
    if (!(t > prev)) throw std::invalid_argument("sample_times must be strictly increasing and > 0");
    prev = t;
  }
}

}  // namespace

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, double kappa) {
  if (rho.rows() != rho.cols() || hamiltonian.rows() != hamiltonian.cols() ||
      rho.rows() != hamiltonian.rows())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  const int dim = static_cast<int>(rho.rows());
  const ComplexMatrix a = lowering_operator(dim);
  const ComplexMatrix n = number_operator(dim);
  ComplexMatrix drho = Complex(0.0, -1.0) * (hamiltonian * rho - rho * hamiltonian);
  drho += kappa * (a * rho * a.adjoint() - 0.5 * (n * rho + rho * n));
  return drho;
}

QuantumTrajectory simulate_qrc_trajectory(const ReservoirParams& params, double phase,
                                          std::span<const double> sample_times,
                                          const IntegratorConfig& cfg) {
  check_simulation_inputs(params, sample_times, false);
  const DrivenKerrKernel kernel(params);
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    kernel(amp * std::sin(freq * t + phase), y, dy);
  };
  const auto states = integrate_adaptive(rhs, vacuum_state(params.dim), 0.0, sample_times, cfg);

  QuantumTrajectory traj;
  traj.params = params;
  traj.times.assign(sample_times.begin(), sample_times.end());
  traj.states.reserve(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    ComplexMatrix rho = matrix_from_flat(states[s], params.dim);
    validate_sampled_state(rho, sample_times[s]);
    traj.states.push_back(std::move(rho));
  }
  return traj;
}

FeatureSeries simulate_qrc(const ReservoirParams& params, double phase,
                           std::span<const double> sample_times, bool full_tomography,
                           const IntegratorConfig& cfg) {
  check_simulation_inputs(params, sample_times, full_tomography);
  const DrivenKerrKernel kernel(params);
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    kernel(amp * std::sin(freq * t + phase), y, dy);
  };
  const auto states = integrate_adaptive(rhs, vacuum_state(params.dim), 0.0, sample_times, cfg);
  return features_from_states(params, sample_times, states, full_tomography);
}

FeatureSeries simulate_qrc_input_noise(const ReservoirParams& params, double phase,
                                       std::span<const double> sample_times,
                                       std::span<const double> step_noise, bool full_tomography,
                                       const IntegratorConfig& cfg) {
  check_simulation_inputs(params, sample_times, full_tomography);
  const DrivenKerrKernel kernel(params);
  const double amp = params.drive_amp;
  const double freq = params.drive_freq;
  auto rhs = [&](double t, std::span<const double> y, double xi, std::span<double> dy) {
    kernel(amp * std::sin(freq * t + phase) + xi, y, dy);
  };
  const auto states = integrate_fixed_noisy(rhs, vacuum_state(params.dim), 0.0, sample_times.back(),
                                            cfg, step_noise, sample_times);
  return features_from_states(params, sample_times, states, full_tomography);
}

TruncationReport check_truncation(const QuantumTrajectory& trajectory) {
  TruncationReport report;
  for (const ComplexMatrix& rho : trajectory.states) {
    const int d = static_cast<int>(rho.rows());
    const double top = rho(d - 1, d - 1).real();
    const double second = rho(d - 2, d - 2).real();
    // Tr([a, a†] rho) = sum_{n<d-1} rho(n,n) - (d-1) rho(d-1,d-1) in the truncated basis.
    double comm = -(static_cast<double>(d) - 1.0) * top;
    for (int n = 0; n + 1 < d; ++n) comm += rho(n, n).real();
    report.max_top_population = std::max(report.max_top_population, top);
    report.max_second_population = std::max(report.max_second_population, second);
    report.max_commutator_error = std::max(report.max_commutator_error, std::abs(comm - 1.0));
  }
  return report;
}

}  // namespace qrc
