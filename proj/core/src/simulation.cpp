#include "discharge/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "discharge/error.hpp"

namespace discharge {

MonitorRecord make_record(const Mesh& mesh, const State& state, double Y_integral,
                          const std::optional<MonitorConstants>& constants) {
  MonitorRecord r;
  r.t = state.t;
  const PositivityReport pos = positivity_report(state);
  r.min_p = pos.min_p;
  r.min_n = pos.min_n;
  const Norms np = field_norms(mesh, state.p);
  const Norms nn = field_norms(mesh, state.n);
  r.L2_p = np.L2;
  r.L2_n = nn.L2;
  r.H1_p = np.H1_seminorm;
  r.H1_n = nn.H1_seminorm;
  r.Y = np.L2 * np.L2 + nn.L2 * nn.L2 + Y_integral;
  if (constants && bihari_window(*constants, state.t) > 0.0) {
    r.bihari_bound = bihari_bound(*constants, state.t);
  }
  return r;
}

Trajectory run_simulation(const RunConfig& config, const RunOptions& options) {
  config.validate();
  const Mesh mesh(config.domain);
  const VelocityField velocity = build_velocity(mesh, config.velocity);
  State state = init_state(mesh, config.params, Bump{config.initial.amplitude, {}},
                           config.step.poisson_tol);
  Stepper stepper(mesh, config.params, velocity, config.step);
  bool clamp0 = false;
  stepper.charge_density(state.p, state.n, 0.0, &clamp0);
  state.phi = stepper.solve_potential(state.p, state.n, 0.0, &state.phi).phi;

  const auto& constants = config.monitors.constants;
  const std::optional<double> threshold =
      options.blowup_threshold ? options.blowup_threshold : config.monitors.blowup_threshold;

  Trajectory traj;
  double y_integral = 0.0;
  MonitorRecord rec = make_record(mesh, state, 0.0, constants);
  rec.clamp_active = clamp0;
  if (threshold && !(*threshold > std::max(rec.L2_p, rec.L2_n))) {
    throw ValidationError("blow-up threshold must exceed the initial L2 norms");
  }
  auto emit = [&](std::size_t step, const State& s, const MonitorRecord& r) {
    traj.records.push_back(r);
    if (options.keep_states) traj.states.push_back(s);
    if (options.on_step) options.on_step(step, s, r);
  };
  emit(0, state, rec);

  const std::size_t steps = config.step.num_steps();
  for (std::size_t step = 1; step <= steps; ++step) {
    StepInfo info;
    State next;
    try {
      next = stepper.advance(state, &info);
    } catch (const NumericalError&) {
      if (info.source_finite) throw;
      MonitorRecord bad = rec;
      bad.t = state.t;
      bad.source_finite = false;
      bad.clamp_active = info.clamp_active;
      traj.records.push_back(bad);
      traj.stop_cause = "non_finite_source";
      return traj;
    }
    const double g_prev = rec.H1_p * rec.H1_p + rec.H1_n * rec.H1_n;
    MonitorRecord r = make_record(mesh, next, y_integral, constants);
    const double g_next = r.H1_p * r.H1_p + r.H1_n * r.H1_n;
    y_integral += 0.5 * (next.t - state.t) * (g_prev + g_next);
    r.Y += 0.5 * (next.t - state.t) * (g_prev + g_next);
    r.charge_residual = charge_continuity_residual(state, next, mesh, config.params, velocity,
                                                   config.step.dt, config.step.density_bc);
    r.clamp_active = info.clamp_active;
    r.source_finite = info.source_finite;
    emit(step, next, r);
    state = std::move(next);
    rec = r;
    if (threshold && std::max(r.L2_p, r.L2_n) > *threshold) {
      traj.blowup_time = r.t;
      traj.stop_cause = "blowup";
      break;
    }
  }
  return traj;
}

}  // namespace discharge
