#include "discharge/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "discharge/auxiliary.hpp"
#include "discharge/error.hpp"
#include "discharge/transport.hpp"

namespace discharge {

namespace {

DomainSpec grid_spec(const DomainSpec& rect, int quad_n) {
  DomainSpec g = rect;
  g.nx = quad_n;
  g.ny = quad_n;
  return g;
}

int checked_quad(const DomainSpec& rect, int K, int Mo, int quad_n) {
  if (!rect.is_rectangle()) throw ValidationError("galerkin: only Rectangle domains are supported");
  if (K < 1) throw ValidationError("galerkin.modes_x must be >= 1");
  if (Mo < 1) throw ValidationError("galerkin.modes_y must be >= 1");
  if (quad_n < 0) throw ValidationError("galerkin.quad_n must be >= 0");
  if (quad_n == 0) quad_n = 4 * std::max(K, Mo);
  if (quad_n <= std::max(K, Mo)) throw ValidationError("galerkin.quad_n must exceed the mode counts");
  return quad_n;
}

}  // namespace

SpectralBasis::SpectralBasis(const DomainSpec& rect, int K, int Mo, int quad_n)
    : r_(rect.r),
      h_(rect.is_rectangle() ? std::get<Rectangle>(rect.profile).h : 0.0),
      quad_n_(checked_quad(rect, K, Mo, quad_n)),
      grid_(grid_spec(rect, quad_n_)) {
  using std::numbers::pi;
  for (int k = 0; k < K; ++k) {
    for (int m = 1; m <= Mo; ++m) {
      Mode md;
      md.k = k;
      md.m = m;
      const double ax = k * pi / (2.0 * r_);
      const double ay = m * pi / h_;
      md.lambda = 1.0 + ax * ax + ay * ay;
      md.norm = k == 0 ? 1.0 / std::sqrt(r_ * h_) : std::sqrt(2.0 / (r_ * h_));
      modes_.push_back(md);
    }
  }
  std::stable_sort(modes_.begin(), modes_.end(), [](const Mode& a, const Mode& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.k != b.k) return a.k < b.k;
    return a.m < b.m;
  });
  const std::size_t nn = grid_.num_nodes();
  w_.assign(modes_.size(), Field(nn));
  wx_.assign(modes_.size(), Field(nn));
  wy_.assign(modes_.size(), Field(nn));
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    for (std::size_t q = 0; q < nn; ++q) {
      w_[i][q] = value(i, grid_.x(q), grid_.y(q));
      const auto [gx, gy] = gradient(i, grid_.x(q), grid_.y(q));
      wx_[i][q] = gx;
      wy_[i][q] = gy;
    }
  }
}

double SpectralBasis::value(std::size_t i, double x, double y) const {
  using std::numbers::pi;
  const Mode& md = modes_[i];
  return md.norm * std::cos(md.k * pi * (x + r_) / (2.0 * r_)) * std::sin(md.m * pi * y / h_);
}

std::pair<double, double> SpectralBasis::gradient(std::size_t i, double x, double y) const {
  using std::numbers::pi;
  const Mode& md = modes_[i];
  const double ax = md.k * pi / (2.0 * r_);
  const double ay = md.m * pi / h_;
  const double sx = ax * (x + r_);
  return {-md.norm * ax * std::sin(sx) * std::sin(ay * y),
          md.norm * ay * std::cos(sx) * std::cos(ay * y)};
}

double SpectralBasis::inner(const Field& f, const Field& g) const {
  const auto wts = grid_.node_weights();
  double s = 0.0;
  for (std::size_t q = 0; q < f.size(); ++q) s += wts[q] * f[q] * g[q];
  return s;
}

namespace {

Field combine(const std::vector<Field>& modes, const std::vector<double>& c, std::size_t nn) {
  Field out(nn, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    for (std::size_t q = 0; q < nn; ++q) out[q] += c[i] * modes[i][q];
  }
  return out;
}

}  // namespace

Field SpectralBasis::synthesize(const std::vector<double>& c) const {
  return combine(w_, c, grid_.num_nodes());
}
Field SpectralBasis::synthesize_dx(const std::vector<double>& c) const {
  return combine(wx_, c, grid_.num_nodes());
}
Field SpectralBasis::synthesize_dy(const std::vector<double>& c) const {
  return combine(wy_, c, grid_.num_nodes());
}

double SpectralBasis::evaluate(const std::vector<double>& c, double x, double y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * value(i, x, y);
  return s;
}

SpectralBasis build_basis(const DomainSpec& rect, int K, int Mo, int quad_n) {
  return SpectralBasis(rect, K, Mo, quad_n);
}

std::vector<double> project_field(const SpectralBasis& basis, const Field& field) {
  if (field.size() != basis.grid().num_nodes()) {
    throw ValidationError("project_field: field is not sampled on the quadrature grid");
  }
  std::vector<double> c(basis.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = basis.inner(field, basis.sample(i));
  return c;
}

std::vector<double> spectral_poisson_coeffs(const SpectralBasis& basis, const Field& rhs) {
  std::vector<double> c = project_field(basis, rhs);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] /= basis.mode(i).lambda - 1.0;
  return c;
}

Field spectral_poisson(const SpectralBasis& basis, const Field& rhs, double V) {
  Field phi = basis.synthesize(spectral_poisson_coeffs(basis, rhs));
  const Mesh& g = basis.grid();
  for (std::size_t q = 0; q < phi.size(); ++q) phi[q] += V * g.y(q) / basis.h();
  return phi;
}

namespace {

struct GridFields {
  Field p, n, px, py, nx, ny;
  Field phi, phix, phiy, emag;
};

Field charge(const Field& p, const Field& n, const PhysParams& params, const StepConfig& step) {
  Field rho(p.size());
  for (std::size_t q = 0; q < p.size(); ++q) {
    const double z = p[q] - n[q];
    rho[q] = (step.scheme == Scheme::AuxiliaryM ? clamp_G(step.M, z) : z) / params.eps0;
  }
  return rho;
}

GridFields grid_fields(const CoeffState& c, const SpectralBasis& basis, const PhysParams& params,
                       const StepConfig& step) {
  GridFields f;
  f.p = basis.synthesize(c.a);
  f.n = basis.synthesize(c.b);
  for (double& v : f.p) v += params.theta_p;
  for (double& v : f.n) v += params.theta_n;
  f.px = basis.synthesize_dx(c.a);
  f.py = basis.synthesize_dy(c.a);
  f.nx = basis.synthesize_dx(c.b);
  f.ny = basis.synthesize_dy(c.b);
  const std::vector<double> cphi = spectral_poisson_coeffs(basis, charge(f.p, f.n, params, step));
  f.phi = basis.synthesize(cphi);
  f.phix = basis.synthesize_dx(cphi);
  f.phiy = basis.synthesize_dy(cphi);
  const Mesh& g = basis.grid();
  f.emag.resize(f.p.size());
  for (std::size_t q = 0; q < f.p.size(); ++q) {
    f.phi[q] += params.V * g.y(q) / basis.h();
    f.phiy[q] += params.V / basis.h();
    f.emag[q] = std::hypot(f.phix[q], f.phiy[q]);
  }
  return f;
}

}  // namespace

CoeffRate galerkin_rhs(const CoeffState& c, const SpectralBasis& basis, const PhysParams& params,
                       const VelocitySpec& velocity, const StepConfig& step) {
  const GridFields f = grid_fields(c, basis, params, step);
  const Mesh& g = basis.grid();
  const std::size_t nn = g.num_nodes();

  // Pointwise source and advection terms, then flux vectors paired with grad w.
  Field s1(nn), s2(nn), jpx(nn), jpy(nn), jnx(nn), jny(nn);
  for (std::size_t q = 0; q < nn; ++q) {
    const auto [vx, vy] = velocity_at(g.spec(), velocity, g.x(q), g.y(q));
    double f1 = 0.0, f2 = 0.0;
    const double E = f.emag[q];
    if (step.source_enabled && E > 0.0) {
      const double growth = params.mu_minus * E * ionization_growth(E, params) * f.n[q];
      const double sink = params.mu_minus * E * params.eta0;
      if (step.scheme == Scheme::OriginalF) {
        f1 = growth - sink * f.n[q];
        f2 = f1;
      } else {
        f1 = growth + sink * aux_sink_factor_p(step.M, f.p[q], f.n[q]) * f.p[q];
        f2 = growth + sink * aux_sink_factor_n(step.M, f.p[q]) * f.n[q];
      }
    }
    s1[q] = f1 - (vx * f.px[q] + vy * f.py[q]);
    s2[q] = f2 - (vx * f.nx[q] + vy * f.ny[q]);
    // Weak drift: -<mu+ p grad phi, grad w> for p, +<mu- n grad phi, grad w> for n.
    jpx[q] = params.mu_plus * f.p[q] * f.phix[q];
    jpy[q] = params.mu_plus * f.p[q] * f.phiy[q];
    jnx[q] = params.mu_minus * f.n[q] * f.phix[q];
    jny[q] = params.mu_minus * f.n[q] * f.phiy[q];
  }

  CoeffRate out;
  out.da.resize(basis.size());
  out.db.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double lm1 = basis.mode(i).lambda - 1.0;
    const Field& w = basis.sample(i);
    const Field& wx = basis.sample_dx(i);
    const Field& wy = basis.sample_dy(i);
    const double drift_p = basis.inner(jpx, wx) + basis.inner(jpy, wy);
    const double drift_n = basis.inner(jnx, wx) + basis.inner(jny, wy);
    out.da[i] = -params.eps_plus * lm1 * c.a[i] - drift_p + basis.inner(s1, w);
    out.db[i] = -params.eps_minus * lm1 * c.b[i] + drift_n + basis.inner(s2, w);
    if (!std::isfinite(out.da[i]) || !std::isfinite(out.db[i])) out.finite = false;
  }
  return out;
}

State reconstruct(const CoeffState& c, const SpectralBasis& basis, const PhysParams& params,
                  const StepConfig& step) {
  GridFields f = grid_fields(c, basis, params, step);
  State s;
  s.t = c.t;
  s.p = std::move(f.p);
  s.n = std::move(f.n);
  s.phi = std::move(f.phi);
  return s;
}

namespace {

CoeffState axpy(const CoeffState& base, const CoeffRate& k, double h) {
  CoeffState out = base;
  for (std::size_t i = 0; i < out.a.size(); ++i) {
    out.a[i] += h * k.da[i];
    out.b[i] += h * k.db[i];
  }
  return out;
}

}  // namespace

GalerkinRun run_galerkin(const RunConfig& config, const SpectralBasis& basis, double dt) {
  config.params.validate();
  config.velocity.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("galerkin.dt must be > 0");
  const Mesh& g = basis.grid();
  const std::size_t nn = g.num_nodes();

  Field bump(nn);
  for (std::size_t q = 0; q < nn; ++q) {
    bump[q] = config.initial.amplitude * default_bump_shape(g.xi(g.i_of(q)), g.eta(g.j_of(q)), g.spec().r);
  }
  CoeffState c;
  c.a = project_field(basis, bump);
  c.b = c.a;

  const auto steps = static_cast<std::size_t>(std::llround(config.step.t_end / dt));
  GalerkinRun run;
  run.trajectory.states.reserve(steps + 1);
  double y_integral = 0.0;
  auto record = [&](const State& s) {
    if (!run.trajectory.states.empty()) {
      const State& prev = run.trajectory.states.back();
      const double h = s.t - prev.t;
      const auto g0 = field_norms(g, prev.p), g1 = field_norms(g, s.p);
      const auto n0 = field_norms(g, prev.n), n1 = field_norms(g, s.n);
      y_integral += 0.5 * h *
                    (g0.H1_seminorm * g0.H1_seminorm + n0.H1_seminorm * n0.H1_seminorm +
                     g1.H1_seminorm * g1.H1_seminorm + n1.H1_seminorm * n1.H1_seminorm);
    }
    run.trajectory.records.push_back(make_record(g, s, y_integral, config.monitors.constants));
    run.trajectory.states.push_back(s);
  };

  run.coeffs.push_back(c);
  record(reconstruct(c, basis, config.params, config.step));
  for (std::size_t s = 0; s < steps; ++s) {
    const CoeffRate k1 = galerkin_rhs(c, basis, config.params, config.velocity, config.step);
    const CoeffRate k2 =
        galerkin_rhs(axpy(c, k1, 0.5 * dt), basis, config.params, config.velocity, config.step);
    const CoeffRate k3 =
        galerkin_rhs(axpy(c, k2, 0.5 * dt), basis, config.params, config.velocity, config.step);
    const CoeffRate k4 =
        galerkin_rhs(axpy(c, k3, dt), basis, config.params, config.velocity, config.step);
    bool finite = k1.finite && k2.finite && k3.finite && k4.finite;
    for (std::size_t i = 0; i < c.a.size(); ++i) {
      c.a[i] += dt / 6.0 * (k1.da[i] + 2.0 * k2.da[i] + 2.0 * k3.da[i] + k4.da[i]);
      c.b[i] += dt / 6.0 * (k1.db[i] + 2.0 * k2.db[i] + 2.0 * k3.db[i] + k4.db[i]);
      finite = finite && std::isfinite(c.a[i]) && std::isfinite(c.b[i]);
    }
    c.t = static_cast<double>(s + 1) * dt;
    if (!finite) {
      throw NumericalError("galerkin: non-finite coefficients at t = " + std::to_string(c.t));
    }
    run.coeffs.push_back(c);
    record(reconstruct(c, basis, config.params, config.step));
  }
  return run;
}

GalerkinRun run_galerkin(const RunConfig& config) {
  const SpectralBasis basis(config.domain, config.galerkin.modes_x, config.galerkin.modes_y,
                            config.galerkin.quad_n);
  const double dt = config.galerkin.dt > 0.0 ? config.galerkin.dt : config.step.dt;
  return run_galerkin(config, basis, dt);
}

}  // namespace discharge
