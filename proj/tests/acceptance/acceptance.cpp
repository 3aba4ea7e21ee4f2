// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "discharge/auxiliary.hpp"
#include "discharge/galerkin.hpp"
#include "discharge/mms.hpp"
#include "discharge/monitors.hpp"
#include "discharge/simulation.hpp"
#include "discharge/transport.hpp"

using namespace discharge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Touch-down discharge shared by several criteria.
RunConfig desk(int nx, int ny, double theta) {
  RunConfig c;
  c.domain.r = 1.0;
  c.domain.profile = TouchDown{0.5, 0.5, 4.0 / 3.0};
  c.domain.nx = nx;
  c.domain.ny = ny;
  c.params.eps_plus = c.params.eps_minus = 0.2;
  c.params.V = 2.0;
  c.params.alpha1 = 2.0;
  c.params.alpha2 = 1.0;
  c.params.eta0 = 1.0;
  c.params.theta_p = c.params.theta_n = theta;
  c.initial.amplitude = 0.5;
  c.velocity.kind = VelocitySpec::Kind::StreamFunction;
  c.velocity.v0 = 0.5;
  c.step.dt = 1e-3;
  c.step.t_end = 0.1;
  return c;
}

Outcome poisson_order() {
  auto ratios = [](const DomainSpec& d) {
    RunConfig c;
    c.domain = d;
    c.verify.kind = MmsKind::Poisson;
    c.verify.levels = 3;
    return verify_mms(c).ratio_phi;
  };
  DomainSpec rect;
  rect.r = 1.0;
  rect.profile = Rectangle{1.0};
  rect.nx = rect.ny = 8;
  DomainSpec td;
  td.r = 1.0;
  td.profile = TouchDown{0.1, 1.0, 4.0 / 3.0};
  td.nx = 16;
  td.ny = 8;
  std::vector<double> all;
  for (const DomainSpec& d : {rect, td}) {
    for (double r : ratios(d)) {
      if (std::isfinite(r)) all.push_back(r);
    }
  }
  Outcome o;
  o.pass = all.size() == 4 && std::all_of(all.begin(), all.end(), [](double r) {
             return within(r, 3.5, 4.5);
           });
  o.detail = "L2 ratios rect";
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 2) o.detail += " | touch-down";
    o.detail += fmt(" %.3f", all[i]);
  }
  o.detail += " (need [3.5, 4.5])";
  return o;
}

Outcome sg_exactness() {
  // Steady ion transport between parallel electrodes with uniform field on
  // the production flux network; the exact profile is exponential.
  const double h = 1.0, V = 3.0, eps = 0.25, mu = 0.8, uB = 0.5, uA = 2.0;
  DomainSpec s;
  s.r = 1.0;
  s.profile = Rectangle{h};
  s.nx = 4;
  s.ny = 32;
  const Mesh m(s);
  PhysParams prm;
  prm.eps_plus = eps;
  prm.mu_plus = mu;
  Field phi(m.num_nodes());
  for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = V * m.y(k) / h;
  const FluxNetwork net =
      build_flux_network(m, prm, build_velocity(m, VelocitySpec{}), phi, Species::Positive);
  const auto n = static_cast<Eigen::Index>(m.num_nodes());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    if (!m.is_dirichlet(k)) continue;
    const auto r = static_cast<Eigen::Index>(k);
    A(r, r) = 1.0;
    b[r] = m.tag(k) == BoundaryTag::ElectrodeB ? uB : uA;
  }
  for (std::size_t e = 0; e < net.size(); ++e) {
    const auto a = static_cast<Eigen::Index>(net.a[e]);
    const auto c = static_cast<Eigen::Index>(net.b[e]);
    if (!m.is_dirichlet(net.a[e])) {
      A(a, a) += net.ca[e];
      A(a, c) -= net.cb[e];
    }
    if (!m.is_dirichlet(net.b[e])) {
      A(c, a) -= net.ca[e];
      A(c, c) += net.cb[e];
    }
  }
  const Eigen::VectorXd u = A.fullPivLu().solve(b);
  const double k = -mu * V / (h * eps);
  const double B = (uA - uB) / std::expm1(k * h);
  double err = 0.0;
  for (std::size_t q = 0; q < m.num_nodes(); ++q) {
    const double exact = uB - B + B * std::exp(k * m.y(q));
    err = std::max(err, std::abs(u[static_cast<Eigen::Index>(q)] - exact));
  }
  return {err <= 1e-10, fmt("max nodal error %.3e at Peclet-per-cell 0.3 (need <= 1e-10)", err)};
}

Outcome positivity() {
  Outcome o{true, ""};
  for (int f : {1, 2}) {
    RunConfig c = desk(32 * f, 16 * f, 0.01);
    c.params.eps_plus = c.params.eps_minus = 0.01;
    c.params.V = 5.0;
    c.step.t_end = 0.2;
    c.step.scheme = Scheme::AuxiliaryM;
    RunOptions ro;
    ro.keep_states = false;
    const Trajectory t = run_simulation(c, ro);
    double lo = std::numeric_limits<double>::infinity();
    for (const MonitorRecord& r : t.records) lo = std::min({lo, r.min_p, r.min_n});
    const bool ok = t.stop_cause == "completed" && lo >= -1e-12;
    o.pass = o.pass && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%dx%d min %.4e (min link weight %.2e)", f == 1 ? "" : ", ",
                  32 * f, 16 * f, lo, Mesh(c.domain).min_link_weight());
    o.detail += buf;
  }
  o.detail += " (need >= -1e-12)";
  return o;
}

Outcome charge_continuity() {
  std::vector<double> worst;
  for (int l = 0; l < 3; ++l) {
    const int f = 1 << l;
    RunConfig c = desk(32 * f, 16 * f, 0.01);
    c.step.scheme = Scheme::OriginalF;
    c.step.dt = 4e-3 / (f * f);
    c.step.t_end = 0.048;
    RunOptions ro;
    ro.keep_states = false;
    const Trajectory t = run_simulation(c, ro);
    double mx = 0.0;
    for (const MonitorRecord& r : t.records) {
      if (std::isfinite(r.charge_residual)) mx = std::max(mx, r.charge_residual);
    }
    worst.push_back(mx);
  }
  const double r1 = worst[0] / worst[1], r2 = worst[1] / worst[2];

  RunConfig n = desk(16, 8, 0.3);
  n.params.theta_n = 0.1;
  n.step.source_enabled = false;
  n.step.density_bc = DensityBoundary::ZeroFlux;
  n.step.t_end = 0.05;
  RunOptions ro;
  ro.keep_states = false;
  double closed = 0.0;
  for (const MonitorRecord& r : run_simulation(n, ro).records) {
    if (std::isfinite(r.charge_residual)) closed = std::max(closed, r.charge_residual);
  }
  Outcome o;
  o.pass = within(r1, 3.0, 5.0) && within(r2, 3.0, 5.0) && closed <= 1e-12;
  o.detail = fmt2("refinement ratios %.3f %.3f", r1, r2) +
             fmt(" (need [3, 5]); all-Neumann residual %.3e (need <= 1e-12)", closed);
  return o;
}

Outcome m_limit() {
  RunConfig c = desk(32, 16, 0.1);
  const SweepReport rep = m_sweep(c, {1e3, 2e3, 4e3, 8e3});
  bool ok = true;
  std::string d = "per-doubling ratios p/n";
  for (std::size_t i = 0; i < rep.ratio_p.size(); ++i) {
    ok = ok && within(rep.ratio_p[i], 1.5, 2.5) && within(rep.ratio_n[i], 1.5, 2.5);
    d += fmt2(" %.3f/%.3f", rep.ratio_p[i], rep.ratio_n[i]);
  }
  d += " (need [1.5, 2.5])";

  c.step.source_treatment = SourceTreatment::Explicit;
  RunConfig orig = c;
  orig.step.scheme = Scheme::OriginalF;
  const Trajectory a = run_auxiliary(c, 1e6);
  const Trajectory b = run_simulation(orig);
  const Mesh m(c.domain);
  const State& sa = a.states.back();
  const State& sb = b.states.back();
  Field dp(m.num_nodes()), dn(m.num_nodes());
  for (std::size_t k = 0; k < dp.size(); ++k) {
    dp[k] = sa.p[k] - sb.p[k];
    dn[k] = sa.n[k] - sb.n[k];
  }
  const double rp = l2_norm(m, dp) / l2_norm(m, sb.p);
  const double rn = l2_norm(m, dn) / l2_norm(m, sb.n);
  ok = ok && rp <= 1e-4 && rn <= 1e-4;
  d += fmt2("; M=1e6 vs original rel L2 p %.2e n %.2e (need <= 1e-4)", rp, rn);
  return {ok, d};
}

Outcome galerkin_cross() {
  RunConfig c;
  c.domain.r = 1.0;
  c.domain.profile = Rectangle{1.0};
  c.domain.nx = 128;
  c.domain.ny = 64;
  c.params.eps_plus = c.params.eps_minus = 0.2;
  c.params.V = 2.0;
  c.params.alpha1 = 2.0;
  c.params.alpha2 = 1.0;
  c.params.eta0 = 1.0;
  c.params.theta_p = c.params.theta_n = 0.2;
  c.initial.amplitude = 0.5;
  c.velocity.kind = VelocitySpec::Kind::StreamFunction;
  c.velocity.v0 = 0.5;
  c.step.scheme = Scheme::OriginalF;
  c.step.dt = 2.5e-4;
  c.step.t_end = 0.1;
  RunOptions ro;
  const Trajectory fd = run_simulation(c, ro);
  const State& s = fd.states.back();
  const Mesh m(c.domain);
  std::vector<double> rel;
  for (int K : {8, 16}) {
    const SpectralBasis basis(c.domain, K, K);
    const GalerkinRun g = run_galerkin(c, basis, 1e-3);
    const CoeffState& cf = g.coeffs.back();
    Field dp(s.p.size());
    for (std::size_t k = 0; k < dp.size(); ++k) {
      dp[k] = c.params.theta_p + basis.evaluate(cf.a, m.x(k), m.y(k)) - s.p[k];
    }
    rel.push_back(l2_norm(m, dp) / l2_norm(m, s.p));
  }

  // Diffusion only: every coefficient decays at its own eigenvalue.
  RunConfig d = c;
  d.params.mu_plus = d.params.mu_minus = 1e-300;
  d.velocity.kind = VelocitySpec::Kind::Zero;
  d.step.source_enabled = false;
  d.step.t_end = 1.0;
  const SpectralBasis basis(d.domain, 8, 8);
  const GalerkinRun run = run_galerkin(d, basis, 1e-3);
  const CoeffState& a0 = run.coeffs.front();
  const CoeffState& a1 = run.coeffs.back();
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    scale = std::max(scale, std::abs(a0.a[i]));
    const double exact = a0.a[i] * std::exp(-d.params.eps_plus * (basis.mode(i).lambda - 1.0) * a1.t);
    err = std::max(err, std::abs(a1.a[i] - exact));
  }
  const double per_time = err / scale / a1.t;

  Outcome o;
  o.pass = rel[0] <= 0.05 && rel[1] < rel[0] && per_time <= 1e-6;
  o.detail = fmt2("rel L2 of p vs FD: 8x8 %.3e, 16x16 %.3e (need <= 5e-2, decreasing)", rel[0],
                  rel[1]) +
             fmt("; diffusion decay error %.2e per unit time (need <= 1e-6)", per_time);
  return o;
}

Outcome bihari() {
  const MonitorConstants c{1.0, 0.0, 1.0};
  const double t1 = estimate_T1(c);
  const double e1 = std::abs(t1 - std::log(2.0));
  const double b0 = bihari_bound(c, 0.0);
  const MonitorConstants c2{0.37, 0.25, 1.5};
  const double b0b = bihari_bound(c2, 0.0);
  const double near = bihari_bound(c, t1 - 1e-8);
  const double t1b = estimate_T1(c2);
  const double nearb = bihari_bound(c2, t1b - 1e-8);
  Outcome o;
  o.pass = e1 <= 1e-10 && b0 == 1.0 && b0b == 0.37 && near > 1e6 && nearb > 1e6;
  o.detail = fmt("|T1 - ln 2| = %.2e", e1) + fmt2(", bound(0) = %.17g and %.17g", b0, b0b) +
             fmt2(", bound near T1 %.3e and %.3e (need > 1e6)", near, nearb);
  return o;
}

Outcome dependence() {
  bool identical = true;
  {
    const RunConfig c = desk(32, 16, 0.01);
    const Trajectory a = run_simulation(c);
    const Trajectory b = run_simulation(c);
    identical = a.states.size() == b.states.size();
    for (std::size_t s = 0; identical && s < a.states.size(); ++s) {
      identical = a.states[s].p == b.states[s].p && a.states[s].n == b.states[s].n &&
                  a.states[s].phi == b.states[s].phi;
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::vector<double> rates;
  for (int f : {1, 2}) {
    RunConfig c = desk(32 * f, 16 * f, 0.01);
    c.step.t_end = 0.2;
    const DependenceReport a = continuous_dependence(c, 1e-3);
    if (f == 1) {
      const DependenceReport b = continuous_dependence(c, 5e-4);
      for (std::size_t i = 0; i < a.D.size() && i < b.D.size(); ++i) {
        const double q = a.D[i] / b.D[i];
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
    }
    rates.push_back(a.growth_rate);
  }
  const double drift = std::abs(rates[1] - rates[0]) / std::abs(rates[0]);
  Outcome o;
  o.pass = identical && lo >= 1.8 && hi <= 2.2 && std::isfinite(rates[0]) &&
           std::isfinite(rates[1]) && drift <= 0.2;
  o.detail = std::string(identical ? "bitwise identical reruns" : "reruns differ") +
             fmt2("; D(delta)/D(delta/2) in [%.4f, %.4f] (need 2 +- 0.2)", lo, hi) +
             fmt2("; growth rate %.3f vs %.3f", rates[0], rates[1]) +
             fmt(" (change %.1f%%, need <= 20%%)", 100.0 * drift);
  return o;
}

Outcome tails() {
  RunConfig c = desk(32, 16, 0.01);
  c.step.t_end = 0.2;
  const Trajectory t = run_simulation(c);
  const Mesh m(c.domain);
  double umax = 0.0;
  for (const State& s : t.states) {
    for (std::size_t k = 0; k < s.p.size(); ++k) umax = std::max({umax, s.p[k], s.n[k]});
  }
  std::vector<double> deltas;
  for (int i = 0; i < 64; ++i) deltas.push_back(1.25 * umax * i / 63.0);
  const TailReport r = level_set_tail(m, t, deltas);
  bool zero_beyond = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] >= r.trajectory_max && r.w[i] != 0.0) zero_beyond = false;
  }
  bool enveloped = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (r.w[i] > r.a1 * std::exp(-r.a2 * deltas[i]) * (1 + 1e-12)) enveloped = false;
  }
  Outcome o;
  o.pass = r.monotone && zero_beyond && r.a2 >= 0.0 && enveloped &&
           r.envelope_shift <= r.fit_residual;
  o.detail = std::string(r.monotone ? "monotone" : "NOT monotone") +
             (zero_beyond ? ", zero beyond max" : ", nonzero beyond max") +
             fmt("; a2 = %.3f", r.a2) +
             fmt2("; envelope shift %.3f within fit residual %.3f", r.envelope_shift,
                  r.fit_residual);
  return o;
}

Outcome blowup() {
  RunConfig c = desk(32, 16, 0.01);
  c.params.alpha1 = 50.0;
  c.params.alpha2 = 0.5;
  c.params.eta0 = 0.01;
  c.step.t_end = 2.0;
  c.monitors.blowup_threshold = 10.0;
  RunOptions ro;
  ro.keep_states = false;
  const Trajectory a = run_simulation(c, ro);
  const Trajectory b = run_simulation(c, ro);
  bool same = a.records.size() == b.records.size() && a.blowup_time == b.blowup_time;
  for (std::size_t i = 0; same && i < a.records.size(); ++i) {
    same = a.records[i].L2_p == b.records[i].L2_p && a.records[i].L2_n == b.records[i].L2_n;
  }
  const auto detected = blowup_detect(a.records, 10.0);
  Outcome o;
  o.pass = a.blowup_time.has_value() && detected == a.blowup_time && same;
  o.detail = a.blowup_time ? fmt("detected at t = %.17g", *a.blowup_time) : "no detection";
  o.detail += same ? ", bitwise reproducible" : ", reruns differ";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Poisson MMS order", poisson_order},
      {"SG exactness", sg_exactness},
      {"Positivity", positivity},
      {"Charge continuity", charge_continuity},
      {"M-limit", m_limit},
      {"Galerkin cross-validation", galerkin_cross},
      {"Bihari/T1 machinery", bihari},
      {"Continuous dependence", dependence},
      {"Level-set tails", tails},
      {"Blow-up monitor", blowup},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-26s %s  %s [%.1fs]\n", i + 1, criteria[i].first,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
