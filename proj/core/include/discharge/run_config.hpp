/// @file run_config.hpp
/// @brief Plain configuration aggregate shared by drivers and the CLI.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "discharge/geometry.hpp"
#include "discharge/model.hpp"
#include "discharge/transport.hpp"

namespace discharge {

struct InitialConfig {
  double amplitude = 0.0;
};

struct TruncationConfig {
  std::vector<double> levels;
  void validate() const;
};

/// User-supplied analogues of the normalized constants H4, H5, H6 of the
/// Bihari-type energy bound.
struct MonitorConstants {
  double H4 = 0.0;
  double H5 = 0.0;
  double H6 = 0.0;
  void validate() const;
};

struct MonitorConfig {
  std::optional<MonitorConstants> constants;
  std::optional<double> blowup_threshold;
};

struct OutputConfig {
  std::string dir = "out";
  int stride = 0;  ///< field snapshot every `stride` steps; 0 disables
};

struct GalerkinConfig {
  int modes_x = 8;
  int modes_y = 8;
  int quad_n = 0;  ///< quadrature intervals per direction; 0 picks 4 max(K, Mo)
  double dt = 0.0; ///< 0 uses step.dt
};

enum class MmsKind { Poisson, Diffusion, Coupled };

struct VerifyConfig {
  MmsKind kind = MmsKind::Poisson;
  int levels = 3;
};

struct RunConfig {
  DomainSpec domain;
  PhysParams params;
  VelocitySpec velocity;
  StepConfig step;
  InitialConfig initial;
  TruncationConfig truncation;
  MonitorConfig monitors;
  OutputConfig output;
  GalerkinConfig galerkin;
  VerifyConfig verify;

  /// Cross-field validation; throws ValidationError naming the key path.
  void validate() const;
};

}  // namespace discharge
