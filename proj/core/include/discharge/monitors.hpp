/// @file monitors.hpp
/// @brief Runtime diagnostics built from the well-posedness theory:
/// positivity, charge continuity, the energy functional and its Bihari-type
/// bound, level-set tails, blow-up detection and continuous dependence.
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "discharge/geometry.hpp"
#include "discharge/model.hpp"
#include "discharge/run_config.hpp"
#include "discharge/transport.hpp"

namespace discharge {

struct Trajectory;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of timeseries.csv. NaN marks an unconfigured monitor.
struct MonitorRecord {
  double t = 0.0;
  double min_p = 0.0;
  double min_n = 0.0;
  double L2_p = 0.0;
  double L2_n = 0.0;
  double H1_p = 0.0;
  double H1_n = 0.0;
  double charge_residual = kNaN;
  double Y = 0.0;
  double bihari_bound = kNaN;
  bool clamp_active = false;
  bool source_finite = true;
};

struct PositivityReport {
  double min_p = 0.0;
  double min_n = 0.0;
  std::size_t argmin_p = 0;
  std::size_t argmin_n = 0;
  bool pass = true;
};

inline constexpr double kPositivityTol = 1e-12;

PositivityReport positivity_report(const State& state, double tol = kPositivityTol);

/// Q = integral of (p - n) with the mass-lumped weights.
double total_charge(const Mesh& mesh, const State& state);

/// |(Q(next) - Q(prev))/dt + boundary outflow of (j+ + j-)| using the same
/// discrete fluxes as the step (potential frozen at prev.phi).
double charge_continuity_residual(const State& prev, const State& next, const Mesh& mesh,
                                  const PhysParams& params, const VelocityField& velocity,
                                  double dt,
                                  DensityBoundary bc = DensityBoundary::Dirichlet);

/// Y(t) = |p(t)|^2 + |n(t)|^2 + int_0^t (|grad p|^2 + |grad n|^2) ds,
/// trapezoidal in time over the stored states.
double compute_energy_Y(const Mesh& mesh, const Trajectory& traj, double t);

/// h(t) = 1 + H4 + H5 t - (H4 + H5 t) e^{H6 t}.
double bihari_window(const MonitorConstants& c, double t);
/// (H4 + H5 t) e^{H6 t} / h(t); throws ValidationError once h(t) <= 0.
double bihari_bound(const MonitorConstants& c, double t);
/// Smallest root of h; +infinity when h stays positive.
double estimate_T1(const MonitorConstants& c);

/// Smallest H6 (with H4 = Y(0), H5 = 0) whose bound envelopes every
/// (t, Y) sample; the empirical stand-in for unknown Sobolev constants.
MonitorConstants fit_bihari_constants(std::span<const double> t, std::span<const double> Y);

struct TailReport {
  std::vector<double> delta;
  std::vector<double> w;
  /// Envelope w(delta) <= a1 exp(-a2 delta) over the samples with w > 0.
  double a1 = 0.0;
  double a2 = 0.0;
  /// RMS residual of the least-squares fit of log w.
  double fit_residual = 0.0;
  /// Intercept shift from the least-squares line to the envelope.
  double envelope_shift = 0.0;
  bool monotone = true;
  double trajectory_max = 0.0;
};

/// w(delta) = sum_steps dt (|{p > delta}| + |{n > delta}|).
TailReport level_set_tail(const Mesh& mesh, const Trajectory& traj,
                          const std::vector<double>& deltas);

/// First t with max(L2_p, L2_n) > threshold. Throws ValidationError if the
/// threshold does not exceed the initial norms.
std::optional<double> blowup_detect(std::span<const MonitorRecord> records, double threshold);

struct DependenceReport {
  std::vector<double> t;
  std::vector<double> D;
  /// Least-squares fit D(t) ~ D0 exp(rate t) over samples with D > 0.
  double growth_rate = 0.0;
  double log_D0 = 0.0;
};

DependenceReport continuous_dependence(const RunConfig& config, double delta);

}  // namespace discharge
