#include "discharge/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "discharge/auxiliary.hpp"
#include "discharge/config.hpp"
#include "discharge/error.hpp"
#include "discharge/galerkin.hpp"
#include "discharge/mms.hpp"
#include "discharge/monitors.hpp"
#include "discharge/output.hpp"
#include "discharge/simulation.hpp"

namespace discharge {

namespace {

struct Options {
  std::string subcommand;
  std::string config_path;
  std::optional<std::string> out;
  std::string levels;
  std::optional<double> delta;
  std::optional<double> threshold;
};

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--levels: cannot parse '" + item + "'");
    }
  }
  return out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

/// Writes fields snapshots every `stride` steps plus the final state.
struct SnapshotWriter {
  const Mesh* mesh = nullptr;
  std::string dir;
  int stride = 0;
  std::size_t last_step = 0;
  void operator()(std::size_t step, const State& s) const {
    if (stride > 0 && step % static_cast<std::size_t>(stride) == 0) {
      write_text(join(dir, fields_filename(step)), fields_csv(*mesh, s));
    }
  }
};

int cmd_run(const RunConfig& config, const Options& opt, MetaInfo& meta) {
  const Mesh mesh(config.domain);
  SnapshotWriter snap{&mesh, config.output.dir, config.output.stride};
  RunOptions ro;
  ro.keep_states = false;
  ro.blowup_threshold = opt.threshold;
  ro.on_step = [&](std::size_t step, const State& s, const MonitorRecord&) { snap(step, s); };
  const Trajectory traj = run_simulation(config, ro);
  write_text(join(config.output.dir, "timeseries.csv"), timeseries_csv(traj.records));
  meta.stop_cause = traj.stop_cause;
  if (traj.blowup_time) meta.results.emplace_back("blowup_time", *traj.blowup_time);
  if (!traj.records.empty()) meta.results.emplace_back("t_final", traj.records.back().t);
  return traj.stop_cause == "non_finite_source" ? kExitNumerical : kExitOk;
}

int cmd_galerkin(const RunConfig& config, const Options&, MetaInfo& meta) {
  const SpectralBasis basis(config.domain, config.galerkin.modes_x, config.galerkin.modes_y,
                            config.galerkin.quad_n);
  const double dt = config.galerkin.dt > 0.0 ? config.galerkin.dt : config.step.dt;
  const GalerkinRun run = run_galerkin(config, basis, dt);
  write_text(join(config.output.dir, "timeseries.csv"), timeseries_csv(run.trajectory.records));
  const auto& states = run.trajectory.states;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const bool snap = config.output.stride > 0 && s % static_cast<std::size_t>(config.output.stride) == 0;
    if (snap || s + 1 == states.size()) {
      write_text(join(config.output.dir, fields_filename(s)), fields_csv(basis.grid(), states[s]));
    }
  }
  meta.results.emplace_back("modes", static_cast<double>(basis.size()));
  meta.results.emplace_back("quad_n", basis.quad_n());
  return kExitOk;
}

int cmd_msweep(const RunConfig& config, const Options& opt, MetaInfo& meta) {
  std::vector<double> levels = opt.levels.empty() ? config.truncation.levels : parse_levels(opt.levels);
  TruncationConfig{levels}.validate();
  const SweepReport rep = m_sweep(config, levels);
  write_text(join(config.output.dir, "sweep_report.csv"), sweep_csv(rep));
  bool all_ok = true;
  for (const SweepLevel& l : rep.levels) all_ok = all_ok && l.ok;
  if (!all_ok) meta.stop_cause = "level_failed";
  return all_ok ? kExitOk : kExitNumerical;
}

int cmd_verify(const RunConfig& config, const Options&, MetaInfo& meta) {
  const ConvergenceReport rep = verify_mms(config);
  write_text(join(config.output.dir, "convergence_report.csv"), convergence_csv(rep));
  meta.results.emplace_back("levels", static_cast<double>(rep.nx.size()));
  return kExitOk;
}

int cmd_tail(const RunConfig& config, const Options& opt, MetaInfo& meta) {
  RunOptions ro;
  ro.blowup_threshold = opt.threshold;
  const Trajectory traj = run_simulation(config, ro);
  meta.stop_cause = traj.stop_cause;
  double umax = 0.0;
  for (const State& s : traj.states) {
    for (double v : s.p) umax = std::max(umax, v);
    for (double v : s.n) umax = std::max(umax, v);
  }
  const int count = 64;
  std::vector<double> deltas;
  for (int i = 0; i < count; ++i) deltas.push_back(1.25 * umax * i / (count - 1));
  const Mesh mesh(config.domain);
  const TailReport rep = level_set_tail(mesh, traj, deltas);
  write_text(join(config.output.dir, "tail_report.csv"), tail_csv(rep));
  write_text(join(config.output.dir, "timeseries.csv"), timeseries_csv(traj.records));
  meta.results.emplace_back("a1", rep.a1);
  meta.results.emplace_back("a2", rep.a2);
  meta.results.emplace_back("fit_residual", rep.fit_residual);
  meta.results.emplace_back("trajectory_max", rep.trajectory_max);
  meta.results.emplace_back("monotone", rep.monotone ? 1.0 : 0.0);
  return traj.stop_cause == "non_finite_source" ? kExitNumerical : kExitOk;
}

int cmd_dependence(const RunConfig& config, const Options& opt, MetaInfo& meta) {
  if (!opt.delta) throw ValidationError("dependence requires --delta");
  const DependenceReport rep = continuous_dependence(config, *opt.delta);
  write_text(join(config.output.dir, "dependence_report.csv"), dependence_csv(rep));
  meta.results.emplace_back("growth_rate", rep.growth_rate);
  meta.results.emplace_back("log_D0", rep.log_D0);
  return kExitOk;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Drift-diffusion discharge simulator"};
  app.require_subcommand(1, 1);
  Options opt;
  const char* names[][2] = {{"run", "Finite-difference simulation"},
                            {"galerkin", "Spectral Galerkin simulation (rectangles)"},
                            {"msweep", "Truncation sweep over M levels"},
                            {"verify", "Manufactured-solution convergence study"},
                            {"tail", "Level-set tail measure of a run"},
                            {"dependence", "Continuous dependence on initial data"}};
  for (const auto& nd : names) {
    CLI::App* sub = app.add_subcommand(nd[0], nd[1]);
    sub->add_option("--config", opt.config_path, "Configuration file")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
    sub->add_option("--threshold", opt.threshold, "Blow-up threshold on max L2 norm");
    if (std::string(nd[0]) == "msweep") sub->add_option("--levels", opt.levels, "Comma-separated M levels");
    if (std::string(nd[0]) == "dependence") sub->add_option("--delta", opt.delta, "Perturbation amplitude");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  for (CLI::App* sub : app.get_subcommands()) opt.subcommand = sub->get_name();

  RunConfig config;
  try {
    config = load_config(opt.config_path);
    if (opt.out) config.output.dir = *opt.out;
    if (opt.threshold) config.monitors.blowup_threshold = *opt.threshold;
    config.validate();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  MetaInfo meta;
  meta.subcommand = opt.subcommand;
  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (opt.subcommand == "run") code = cmd_run(config, opt, meta);
    if (opt.subcommand == "galerkin") code = cmd_galerkin(config, opt, meta);
    if (opt.subcommand == "msweep") code = cmd_msweep(config, opt, meta);
    if (opt.subcommand == "verify") code = cmd_verify(config, opt, meta);
    if (opt.subcommand == "tail") code = cmd_tail(config, opt, meta);
    if (opt.subcommand == "dependence") code = cmd_dependence(config, opt, meta);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    meta.stop_cause = "validation_error";
    meta.error = e.what();
    code = kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    meta.stop_cause = "numerical_failure";
    meta.error = e.what();
    code = kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    meta.stop_cause = "failure";
    meta.error = e.what();
    code = kExitNumerical;
  }
  meta.exit_code = code;
  meta.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_text(join(config.output.dir, "meta.json"), meta_json(config, meta));
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return code;
}

}  // namespace discharge
