/// @file auxiliary.hpp
/// @brief The truncated auxiliary system: clamp G(M, z), the min-modified
/// sources F1, F2, auxiliary runs and the M -> infinity sweep.
#pragma once

#include <string>
#include <vector>

#include "discharge/model.hpp"
#include "discharge/poisson.hpp"
#include "discharge/run_config.hpp"
#include "discharge/simulation.hpp"

namespace discharge {

/// M for z > M, z for |z| <= M, -M for z < -M. Throws for M <= 0.
double clamp_G(double M, double z);

/// min{M, -M n / (1 + M p)}, the factor multiplying eta0 p in F1.
double aux_sink_factor_p(double M, double p, double n);
/// min{M, -M p / (1 + M p)}, the factor multiplying eta0 n in F2.
double aux_sink_factor_n(double M, double p);

struct TruncatedSources {
  Field F1;
  Field F2;
  bool finite = true;
};

/// Pointwise F1, F2 including the advective terms -grad(p).v, -grad(n).v.
/// Evaluated exactly as written, including where 1 + M p <= 0.
TruncatedSources truncated_sources(const Field& p, const Field& n, const Field& emag,
                                   const GradientField& grad_p, const GradientField& grad_n,
                                   const VelocityField& velocity, double M,
                                   const PhysParams& params);

/// run_simulation with scheme = AuxiliaryM(M).
Trajectory run_auxiliary(const RunConfig& config, double M, const RunOptions& options = {});

struct SweepLevel {
  double M = 0.0;
  bool ok = false;
  std::string error;
  bool clamp_active = false;
};

struct SweepReport {
  std::vector<SweepLevel> levels;
  /// Space-time L2 differences between levels i and i+1.
  std::vector<double> diff_p;
  std::vector<double> diff_n;
  /// Empirical decay ratio per doubling of M between consecutive pairs,
  /// (diff_i / diff_{i+1})^(1/log2(M_{i+2}/M_{i+1})).
  std::vector<double> ratio_p;
  std::vector<double> ratio_n;
};

/// Runs every level (in parallel, capped by DISCHARGE_SIM_THREADS). Level
/// failures are recorded and the sweep continues.
SweepReport m_sweep(const RunConfig& config, const std::vector<double>& levels);

/// Space-time L2(Omega x (0,T)) difference of p and n between two runs on
/// the same mesh and time grid.
std::pair<double, double> spacetime_difference(const Mesh& mesh, const Trajectory& a,
                                               const Trajectory& b);

}  // namespace discharge
