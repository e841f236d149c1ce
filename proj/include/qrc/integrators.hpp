#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrc {

/// State vectors are flat arrays of reals; callers map complex structures to
/// interleaved real/imaginary components.
using FlatState = std::vector<double>;

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double fixed_dt = 1e-3;  // fixed-step driver only
  double max_dt = 0.0;     // adaptive step cap; 0 disables the cap
  long max_steps = 10'000'000;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& msg, double t_reached)
      : std::runtime_error(msg + " at t = " + std::to_string(t_reached)), t_reached_(t_reached) {}
  double time_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

namespace detail {

// Dormand-Prince 5(4) tableau. The fifth-order solution is propagated; the
// difference against the embedded fourth-order weights drives step control.
// Stage 7 is evaluated at the accepted solution (FSAL).
inline constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double kDpB5[7] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84,  0.0};
inline constexpr double kDpB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

inline constexpr double kTimeSlack = 1e-14;

inline void validate_sample_times(std::span<const double> sample_times, double t0, const char* who) {
  double prev = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (double ts : sample_times) {
    if (ts < t0) throw std::invalid_argument(std::string(who) + ": sample time before t0");
    if (!first && !(ts > prev))
      throw std::invalid_argument(std::string(who) + ": sample times must be strictly increasing");
    prev = ts;
    first = false;
  }
}

}  // namespace detail

/// Embedded Runge-Kutta 5(4) driver with PI-free step control and exact
/// step-to-sample landing. Returns the state at each requested sample time.
/// Deterministic: the produced sequence is a pure function of the inputs.
///
/// Rhs signature: void(double t, std::span<const double> y, std::span<double> dydt).
template <class Rhs>
std::vector<FlatState> integrate_adaptive(Rhs&& rhs, const FlatState& y0, double t0,
                                          std::span<const double> sample_times,
                                          const IntegratorConfig& cfg = {}) {
  using namespace detail;
  const std::size_t n = y0.size();
  if (n == 0) throw std::invalid_argument("integrate_adaptive: empty state");
  validate_sample_times(sample_times, t0, "integrate_adaptive");

  std::vector<FlatState> out;
  out.reserve(sample_times.size());
  if (sample_times.empty()) return out;

  FlatState y = y0;
  FlatState ynew(n), ytmp(n);
  std::array<FlatState, 7> k;
  for (auto& ki : k) ki.assign(n, 0.0);

  double t = t0;
  rhs(t, std::span<const double>(y), std::span<double>(k[0]));

  // Initial step from the magnitude of y and f(t0, y0).
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (k[0][i] / sc) * (k[0][i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1 = std::sqrt(d1 / static_cast<double>(n));
  const double span_total = sample_times.back() - t0;
  double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 * std::max(span_total, 1e-30) : 0.01 * d0 / d1;
  if (span_total > 0.0) h = std::min(h, span_total);
  if (cfg.max_dt > 0.0) h = std::min(h, cfg.max_dt);

  std::size_t next_sample = 0;
  long steps = 0;
  const double eps = std::numeric_limits<double>::epsilon();

  while (next_sample < sample_times.size()) {
    const double t_target = sample_times[next_sample];
    if (t_target - t <= kTimeSlack * std::max(1.0, std::abs(t_target))) {
      out.push_back(y);
      ++next_sample;
      continue;
    }

    double h_try = h;
    if (cfg.max_dt > 0.0) h_try = std::min(h_try, cfg.max_dt);
    bool landing = false;
    if (t + h_try >= t_target) {
      h_try = t_target - t;
      landing = true;
    }
    if (++steps > cfg.max_steps) throw IntegrationError("integrate_adaptive: max step count exceeded", t);
    if (h_try <= 16.0 * eps * std::max(1.0, std::abs(t)))
      throw IntegrationError("integrate_adaptive: step size underflow", t);

    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (int j = 0; j < s; ++j) {
          if (kDpA[s][j] != 0.0) acc += h_try * kDpA[s][j] * k[j][i];
        }
        ytmp[i] = acc;
      }
      if (s == 6) ynew = ytmp;  // row 7 of A equals the 5th-order weights
      rhs(t + kDpC[s] * h_try, std::span<const double>(ytmp), std::span<double>(k[s]));
    }

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (int j = 0; j < 7; ++j) e += (kDpB5[j] - kDpB4[j]) * k[j][i];
      e *= h_try;
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      t = landing ? t_target : t + h_try;
      std::swap(y, ynew);
      k[0] = k[6];  // FSAL
      if (landing) {
        out.push_back(y);
        ++next_sample;
      }
      const double fac = (err == 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h = h_try * fac;
    } else {
      h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
      // y, t, k[0] unchanged; retry with the smaller step
    }
  }
  return out;
}

/// Classical fixed-step RK4 with an externally supplied per-step noise value.
/// The noise value for step i is held constant across all four stage
/// evaluations of that step, so no stage ever sees future noise. Returns the
/// state at each sample time; every sample must land on a step boundary.
///
/// Rhs signature: void(double t, std::span<const double> y, double noise, std::span<double> dydt).
template <class RhsNoisy>
std::vector<FlatState> integrate_fixed_noisy(RhsNoisy&& rhs, const FlatState& y0, double t0, double t1,
                                             const IntegratorConfig& cfg, std::span<const double> noise,
                                             std::span<const double> sample_times) {
  using namespace detail;
  const std::size_t n = y0.size();
  if (n == 0) throw std::invalid_argument("integrate_fixed_noisy: empty state");
  const double dt = cfg.fixed_dt;
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_fixed_noisy: fixed_dt must be > 0");
  const double span = t1 - t0;
  if (!(span > 0.0)) throw std::invalid_argument("integrate_fixed_noisy: t1 must exceed t0");

  const long n_steps = std::lround(span / dt);
  if (n_steps < 1 || std::abs(static_cast<double>(n_steps) * dt - span) > 1e-9 * std::max(1.0, span))
    throw std::invalid_argument("integrate_fixed_noisy: fixed_dt does not divide the integration span");
  if (noise.size() != static_cast<std::size_t>(n_steps))
    throw std::invalid_argument("integrate_fixed_noisy: noise length must equal the step count");

  validate_sample_times(sample_times, t0, "integrate_fixed_noisy");
  std::vector<long> sample_step;
  sample_step.reserve(sample_times.size());
  for (double ts : sample_times) {
    const long ks = std::lround((ts - t0) / dt);
    if (ks < 0 || ks > n_steps || std::abs(t0 + static_cast<double>(ks) * dt - ts) > 1e-9 * std::max(1.0, std::abs(ts)))
      throw std::invalid_argument("integrate_fixed_noisy: sample grid is not divisible by fixed_dt");
    sample_step.push_back(ks);
  }

  std::vector<FlatState> out;
  out.reserve(sample_times.size());
  std::size_t next_sample = 0;
  FlatState y = y0;
  if (next_sample < sample_step.size() && sample_step[next_sample] == 0) {
    out.push_back(y);
    ++next_sample;
  }

  FlatState k1(n), k2(n), k3(n), k4(n), ytmp(n);
  for (long step = 0; step < n_steps; ++step) {
    const double t = t0 + static_cast<double>(step) * dt;
    const double xi = noise[static_cast<std::size_t>(step)];
    rhs(t, std::span<const double>(y), xi, std::span<double>(k1));
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, std::span<const double>(ytmp), xi, std::span<double>(k2));
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, std::span<const double>(ytmp), xi, std::span<double>(k3));
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * k3[i];
    rhs(t + dt, std::span<const double>(ytmp), xi, std::span<double>(k4));
    for (std::size_t i = 0; i < n; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (next_sample < sample_step.size() && sample_step[next_sample] == step + 1) {
      out.push_back(y);
      ++next_sample;
    }
  }
  return out;
}

}  // namespace qrc
