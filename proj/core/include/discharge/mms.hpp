/// @file mms.hpp
/// @brief Method-of-manufactured-solutions convergence harness.
#pragma once

#include <memory>
#include <vector>

#include "discharge/run_config.hpp"
#include "discharge/transport.hpp"

namespace discharge {

/// u = base + slope_y y + amp e^{-decay t} (1 + beta cos(pi s)) sin(k y + omega),
/// s = (x + r) / 2r. Every member satisfies du/dx = 0 on |x| = r.
struct ManufacturedField {
  double base = 0.0;
  double slope_y = 0.0;
  double amp = 1.0;
  double beta = 0.5;
  double k = 1.0;
  double omega = 0.0;
  double decay = 0.0;

  struct Eval {
    double u, ux, uy, lap, ut;
  };
  Eval eval(double x, double y, double t, double r) const;
};

struct ManufacturedSet {
  ManufacturedField p, n, phi;
};

/// Default smooth fields used by verify_mms.
ManufacturedSet default_manufactured_set();

/// Builds exact values and forcing terms for the full system (OriginalF
/// source, gas velocity from `velocity`). With `drift` false the forcing
/// assumes mu_+ = mu_- = 0 and no ionization source.
std::shared_ptr<Manufactured> make_manufactured(const ManufacturedSet& set, const DomainSpec& domain,
                                                const PhysParams& params,
                                                const VelocitySpec& velocity, bool drift,
                                                bool source);

struct ConvergenceReport {
  MmsKind kind = MmsKind::Poisson;
  std::vector<int> nx, ny;
  std::vector<double> dt;
  std::vector<double> err_p, err_n, err_phi;
  /// e_i / e_{i+1} between consecutive refinements (NaN where unused).
  std::vector<double> ratio_p, ratio_n, ratio_phi;
  /// log2 of the ratios.
  std::vector<double> order_p, order_n, order_phi;
};

/// Runs the configured kind on meshes h, h/2, h/4, ... (config.verify.levels)
/// with dt scaled by h^2, and reports L2 errors at t_end and observed orders.
ConvergenceReport verify_mms(const RunConfig& config);

}  // namespace discharge
