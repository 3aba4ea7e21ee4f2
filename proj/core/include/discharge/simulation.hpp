/// @file simulation.hpp
/// @brief Time loop from t = 0 to t_end with per-step monitor records.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "discharge/monitors.hpp"
#include "discharge/run_config.hpp"

namespace discharge {

struct Trajectory {
  /// States at t = 0 and after every step (empty unless keep_states).
  std::vector<State> states;
  /// Record at t = 0 and after every step.
  std::vector<MonitorRecord> records;
  std::string stop_cause = "completed";
  std::optional<double> blowup_time;
};

struct RunOptions {
  bool keep_states = true;
  /// Overrides config.monitors.blowup_threshold when set.
  std::optional<double> blowup_threshold;
  /// Called for the initial state (step 0) and after every step.
  std::function<void(std::size_t step, const State&, const MonitorRecord&)> on_step;
};

Trajectory run_simulation(const RunConfig& config, const RunOptions& options = {});

/// Monitor record of a state; prev/info feed the charge residual and the
/// clamp/source flags. Y_integral is the running time integral of the
/// gradient norms up to state.t.
MonitorRecord make_record(const Mesh& mesh, const State& state, double Y_integral,
                          const std::optional<MonitorConstants>& constants);

}  // namespace discharge
