#include "discharge/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "discharge/error.hpp"
#include "discharge/simulation.hpp"

namespace discharge {

PositivityReport positivity_report(const State& state, double tol) {
  PositivityReport r;
  r.min_p = std::numeric_limits<double>::infinity();
  r.min_n = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < state.p.size(); ++k) {
    if (state.p[k] < r.min_p) {
      r.min_p = state.p[k];
      r.argmin_p = k;
    }
    if (state.n[k] < r.min_n) {
      r.min_n = state.n[k];
      r.argmin_n = k;
    }
  }
  r.pass = r.min_p >= -tol && r.min_n >= -tol;
  return r;
}

double total_charge(const Mesh& mesh, const State& state) {
  const auto wts = mesh.node_weights();
  double q = 0.0;
  for (std::size_t k = 0; k < wts.size(); ++k) q += wts[k] * (state.p[k] - state.n[k]);
  return q;
}

double charge_continuity_residual(const State& prev, const State& next, const Mesh& mesh,
                                  const PhysParams& params, const VelocityField& velocity,
                                  double dt, DensityBoundary bc) {
  const std::size_t nn = mesh.num_nodes();
  if (prev.p.size() != nn || next.p.size() != nn || prev.phi.size() != nn) {
    throw ValidationError("charge_continuity_residual: states do not match the mesh");
  }
  const double dq = (total_charge(mesh, next) - total_charge(mesh, prev)) / dt;
  double outflow = 0.0;
  if (bc == DensityBoundary::Dirichlet) {
    const FluxNetwork fp = build_flux_network(mesh, params, velocity, prev.phi, Species::Positive);
    const FluxNetwork fn = build_flux_network(mesh, params, velocity, prev.phi, Species::Negative);
    for (std::size_t e = 0; e < fp.size(); ++e) {
      const bool da = mesh.is_dirichlet(fp.a[e]);
      const bool db = mesh.is_dirichlet(fp.b[e]);
      if (da == db) continue;
      const double charge_flux = fp.flux(e, next.p) - fn.flux(e, next.n);
      outflow += db ? charge_flux : -charge_flux;
    }
  }
  return std::abs(dq + outflow);
}

double compute_energy_Y(const Mesh& mesh, const Trajectory& traj, double t) {
  if (traj.states.empty()) return 0.0;
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  double integral = 0.0;
  double g_prev = 0.0;
  const State* last = nullptr;
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const State& st = traj.states[s];
    if (st.t > t + slack) break;
    const Norms np = field_norms(mesh, st.p);
    const Norms nn = field_norms(mesh, st.n);
    const double g = np.H1_seminorm * np.H1_seminorm + nn.H1_seminorm * nn.H1_seminorm;
    if (last != nullptr) integral += 0.5 * (st.t - last->t) * (g_prev + g);
    g_prev = g;
    last = &st;
  }
  if (last == nullptr) return 0.0;
  const double lp = l2_norm(mesh, last->p);
  const double ln = l2_norm(mesh, last->n);
  return lp * lp + ln * ln + integral;
}

double bihari_window(const MonitorConstants& c, double t) {
  const double k = c.H4 + c.H5 * t;
  return 1.0 + k - k * std::exp(c.H6 * t);
}

double bihari_bound(const MonitorConstants& c, double t) {
  const double h = bihari_window(c, t);
  if (!(h > 0.0)) {
    throw ValidationError("bihari_bound: t = " + std::to_string(t) +
                          " is beyond the guaranteed window (h(t) <= 0)");
  }
  const double k = c.H4 + c.H5 * t;
  return k * std::exp(c.H6 * t) / h;
}

double estimate_T1(const MonitorConstants& c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c.H6 == 0.0 || (c.H4 == 0.0 && c.H5 == 0.0)) return inf;
  double lo = 0.0;
  double hi = 1.0;
  while (bihari_window(c, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) return inf;
  }
  // h is non-increasing; bisect to relative precision 1e-12 or exhaustion.
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bihari_window(c, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

MonitorConstants fit_bihari_constants(std::span<const double> t, std::span<const double> Y) {
  if (t.size() != Y.size() || t.empty()) {
    throw ValidationError("fit_bihari_constants: need matching non-empty samples");
  }
  MonitorConstants c;
  c.H4 = std::max(Y[0], std::numeric_limits<double>::min());
  c.H5 = 0.0;
  c.H6 = 0.0;
  const double k = c.H4;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || Y[i] <= k) continue;
    // bound(t) >= Y  <=>  e^{H6 t} >= Y (1 + k) / (k (1 + Y)).
    const double need = std::log(Y[i] * (1.0 + k) / (k * (1.0 + Y[i]))) / t[i];
    c.H6 = std::max(c.H6, need * (1.0 + 1e-9));
  }
  return c;
}

TailReport level_set_tail(const Mesh& mesh, const Trajectory& traj,
                          const std::vector<double>& deltas) {
  if (traj.states.empty()) throw ValidationError("level_set_tail: empty trajectory");
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] > deltas[i - 1])) {
      throw ValidationError("level_set_tail: delta grid must be strictly increasing");
    }
  }
  const auto wts = mesh.node_weights();
  TailReport rep;
  rep.delta = deltas;
  rep.w.assign(deltas.size(), 0.0);
  for (const State& s : traj.states) {
    for (std::size_t k = 0; k < s.p.size(); ++k) {
      rep.trajectory_max = std::max({rep.trajectory_max, s.p[k], s.n[k]});
    }
  }
  for (std::size_t s = 1; s < traj.states.size(); ++s) {
    const State& st = traj.states[s];
    const double dt = st.t - traj.states[s - 1].t;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      double area = 0.0;
      for (std::size_t k = 0; k < st.p.size(); ++k) {
        if (st.p[k] > deltas[i]) area += wts[k];
        if (st.n[k] > deltas[i]) area += wts[k];
      }
      rep.w[i] += dt * area;
    }
  }
  for (std::size_t i = 1; i < rep.w.size(); ++i) {
    if (rep.w[i] > rep.w[i - 1]) rep.monotone = false;
  }

  // Weighted least squares of log w against delta, weights = local spacing.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rep.w.size(); ++i) {
    if (rep.w[i] > 0.0) idx.push_back(i);
  }
  if (idx.empty()) return rep;
  if (idx.size() == 1) {
    rep.a1 = rep.w[idx[0]];
    return rep;
  }
  auto spacing = [&](std::size_t q) {
    const std::size_t i = idx[q];
    const double left = q > 0 ? deltas[i] - deltas[idx[q - 1]] : 0.0;
    const double right = q + 1 < idx.size() ? deltas[idx[q + 1]] - deltas[i] : 0.0;
    return 0.5 * (left + right);
  };
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const double wq = spacing(q);
    const double x = deltas[idx[q]];
    const double y = std::log(rep.w[idx[q]]);
    sw += wq;
    sx += wq * x;
    sy += wq * y;
    sxx += wq * x * x;
    sxy += wq * x * y;
  }
  const double denom = sw * sxx - sx * sx;
  const double slope = denom != 0.0 ? (sw * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / sw;
  rep.a2 = -slope;
  double ss = 0.0, shift = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const double res = std::log(rep.w[idx[q]]) - (intercept + slope * deltas[idx[q]]);
    ss += res * res;
    shift = std::max(shift, res);
  }
  rep.fit_residual = std::sqrt(ss / static_cast<double>(idx.size()));
  rep.envelope_shift = shift;
  rep.a1 = std::exp(intercept + shift);
  return rep;
}

std::optional<double> blowup_detect(std::span<const MonitorRecord> records, double threshold) {
  if (records.empty()) return std::nullopt;
  if (!(threshold > std::max(records.front().L2_p, records.front().L2_n))) {
    throw ValidationError("blowup_detect: threshold must exceed the initial L2 norms");
  }
  for (const MonitorRecord& r : records) {
    if (std::max(r.L2_p, r.L2_n) > threshold) return r.t;
  }
  return std::nullopt;
}

DependenceReport continuous_dependence(const RunConfig& config, double delta) {
  const Trajectory base = run_simulation(config);
  if (base.stop_cause != "completed") {
    throw NumericalError("continuous_dependence: base run stopped early (" + base.stop_cause + ")");
  }
  RunConfig perturbed = config;
  perturbed.initial.amplitude += delta;
  const Trajectory other = run_simulation(perturbed);
  const Mesh mesh(config.domain);

  DependenceReport rep;
  const std::size_t count = std::min(base.states.size(), other.states.size());
  Field dp(mesh.num_nodes()), dn(mesh.num_nodes());
  for (std::size_t s = 0; s < count; ++s) {
    const State& a = base.states[s];
    const State& b = other.states[s];
    for (std::size_t k = 0; k < dp.size(); ++k) {
      dp[k] = a.p[k] - b.p[k];
      dn[k] = a.n[k] - b.n[k];
    }
    rep.t.push_back(a.t);
    rep.D.push_back(l2_norm(mesh, dp) + l2_norm(mesh, dn));
  }

  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t s = 0; s < rep.t.size(); ++s) {
    if (!(rep.D[s] > 0.0)) continue;
    const double x = rep.t[s];
    const double y = std::log(rep.D[s]);
    sw += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (sw >= 2) {
    const double denom = sw * sxx - sx * sx;
    rep.growth_rate = (sw * sxy - sx * sy) / denom;
    rep.log_D0 = (sy - rep.growth_rate * sx) / sw;
  }
  return rep;
}

}  // namespace discharge
