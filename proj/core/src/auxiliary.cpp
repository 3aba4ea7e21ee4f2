#include "discharge/auxiliary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "discharge/error.hpp"

namespace discharge {

double clamp_G(double M, double z) {
  if (!(M > 0.0)) throw ValidationError("clamp_G: M must be > 0");
  if (z > M) return M;
  if (z < -M) return -M;
  return z;
}

double aux_sink_factor_p(double M, double p, double n) {
  return std::min(M, -M * n / (1.0 + M * p));
}

double aux_sink_factor_n(double M, double p) {
  return std::min(M, -M * p / (1.0 + M * p));
}

TruncatedSources truncated_sources(const Field& p, const Field& n, const Field& emag,
                                   const GradientField& grad_p, const GradientField& grad_n,
                                   const VelocityField& velocity, double M,
                                   const PhysParams& params) {
  if (!(M > 0.0)) throw ValidationError("truncated_sources: M must be > 0");
  const std::size_t nn = p.size();
  TruncatedSources out{Field(nn), Field(nn), true};
  const bool has_v = !velocity.vx.empty();
  for (std::size_t k = 0; k < nn; ++k) {
    const double E = emag[k];
    double f1 = 0.0, f2 = 0.0;
    if (E > 0.0) {
      const double growth = ionization_growth(E, params) * n[k];
      const double coef = params.mu_minus * E;
      f1 = coef * (growth + params.eta0 * aux_sink_factor_p(M, p[k], n[k]) * p[k]);
      f2 = coef * (growth + params.eta0 * aux_sink_factor_n(M, p[k]) * n[k]);
    }
    if (has_v) {
      f1 -= grad_p.gx[k] * velocity.vx[k] + grad_p.gy[k] * velocity.vy[k];
      f2 -= grad_n.gx[k] * velocity.vx[k] + grad_n.gy[k] * velocity.vy[k];
    }
    out.F1[k] = f1;
    out.F2[k] = f2;
    if (!std::isfinite(f1) || !std::isfinite(f2)) out.finite = false;
  }
  return out;
}

Trajectory run_auxiliary(const RunConfig& config, double M, const RunOptions& options) {
  RunConfig aux = config;
  aux.step.scheme = Scheme::AuxiliaryM;
  aux.step.M = M;
  return run_simulation(aux, options);
}

std::pair<double, double> spacetime_difference(const Mesh& mesh, const Trajectory& a,
                                               const Trajectory& b) {
  const std::size_t count = std::min(a.states.size(), b.states.size());
  if (count == 0) return {0.0, 0.0};
  double sp = 0.0, sn = 0.0;
  auto sq = [&](const State& x, const State& y, bool p) {
    const Field& u = p ? x.p : x.n;
    const Field& v = p ? y.p : y.n;
    Field d(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d[k] = u[k] - v[k];
    const double l2 = l2_norm(mesh, d);
    return l2 * l2;
  };
  for (std::size_t s = 1; s < count; ++s) {
    const double dt = a.states[s].t - a.states[s - 1].t;
    sp += 0.5 * dt * (sq(a.states[s - 1], b.states[s - 1], true) + sq(a.states[s], b.states[s], true));
    sn += 0.5 * dt * (sq(a.states[s - 1], b.states[s - 1], false) + sq(a.states[s], b.states[s], false));
  }
  return {std::sqrt(sp), std::sqrt(sn)};
}

namespace {

unsigned sweep_threads(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISCHARGE_SIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, jobs));
}

}  // namespace

SweepReport m_sweep(const RunConfig& config, const std::vector<double>& levels) {
  if (levels.size() < 3) throw ValidationError("m_sweep: at least 3 levels are required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0)) throw ValidationError("truncation.levels must be > 0");
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw ValidationError("truncation.levels must be strictly increasing");
    }
  }

  const std::size_t L = levels.size();
  std::vector<Trajectory> runs(L);
  SweepReport report;
  report.levels.resize(L);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < L; i = next++) {
      SweepLevel& lvl = report.levels[i];
      lvl.M = levels[i];
      try {
        runs[i] = run_auxiliary(config, levels[i]);
        lvl.ok = runs[i].stop_cause == "completed";
        if (!lvl.ok) lvl.error = runs[i].stop_cause;
        lvl.clamp_active = std::any_of(runs[i].records.begin(), runs[i].records.end(),
                                       [](const MonitorRecord& r) { return r.clamp_active; });
      } catch (const std::exception& e) {
        lvl.ok = false;
        lvl.error = e.what();
      }
    }
  };
  const unsigned nthreads = sweep_threads(L);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  const Mesh mesh(config.domain);
  for (std::size_t i = 0; i + 1 < L; ++i) {
    if (report.levels[i].ok && report.levels[i + 1].ok) {
      const auto [dp, dn] = spacetime_difference(mesh, runs[i], runs[i + 1]);
      report.diff_p.push_back(dp);
      report.diff_n.push_back(dn);
    } else {
      report.diff_p.push_back(kNaN);
      report.diff_n.push_back(kNaN);
    }
  }
  for (std::size_t i = 0; i + 1 < report.diff_p.size(); ++i) {
    const double doublings = std::log2(levels[i + 2] / levels[i + 1]);
    auto ratio = [&](const std::vector<double>& d) {
      if (!(d[i + 1] > 0.0)) return kNaN;
      return std::pow(d[i] / d[i + 1], 1.0 / doublings);
    };
    report.ratio_p.push_back(ratio(report.diff_p));
    report.ratio_n.push_back(ratio(report.diff_n));
  }
  return report;
}

}  // namespace discharge
