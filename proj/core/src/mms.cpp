#include "discharge/mms.hpp"

#include <cmath>
#include <numbers>

#include "discharge/error.hpp"
#include "discharge/poisson.hpp"

namespace discharge {

ManufacturedField::Eval ManufacturedField::eval(double x, double y, double t, double r) const {
  using std::numbers::pi;
  const double s = (x + r) / (2.0 * r);
  const double kx = pi / (2.0 * r);
  const double e = amp * std::exp(-decay * t);
  const double c = 1.0 + beta * std::cos(pi * s);
  const double cx = -beta * kx * std::sin(pi * s);
  const double cxx = -beta * kx * kx * std::cos(pi * s);
  const double sy = std::sin(k * y + omega);
  const double cy = std::cos(k * y + omega);
  Eval v;
  v.u = base + slope_y * y + e * c * sy;
  v.ux = e * cx * sy;
  v.uy = slope_y + e * c * k * cy;
  v.lap = e * (cxx * sy - c * k * k * sy);
  v.ut = -decay * e * c * sy;
  return v;
}

ManufacturedSet default_manufactured_set() {
  ManufacturedSet set;
  set.p = {1.0, 0.0, 0.4, 0.5, 2.0, 0.3, 1.0};
  set.n = {0.8, 0.0, 0.3, -0.4, 1.5, 0.7, 0.5};
  set.phi = {0.0, 1.0, 0.5, 0.6, 1.8, 0.2, 0.0};
  return set;
}

std::shared_ptr<Manufactured> make_manufactured(const ManufacturedSet& set, const DomainSpec& domain,
                                                const PhysParams& params,
                                                const VelocitySpec& velocity, bool drift,
                                                bool source) {
  auto m = std::make_shared<Manufactured>();
  const double r = domain.r;
  m->p = [set, r](double x, double y, double t) { return set.p.eval(x, y, t, r).u; };
  m->n = [set, r](double x, double y, double t) { return set.n.eval(x, y, t, r).u; };
  m->phi = [set, r](double x, double y, double t) { return set.phi.eval(x, y, t, r).u; };
  m->force_phi = [set, r, params](double x, double y, double t) {
    const auto p = set.p.eval(x, y, t, r);
    const auto n = set.n.eval(x, y, t, r);
    const auto phi = set.phi.eval(x, y, t, r);
    return -phi.lap - (p.u - n.u) / params.eps0;
  };
  const double mu_p = drift ? params.mu_plus : 0.0;
  const double mu_n = drift ? params.mu_minus : 0.0;
  m->force_p = [=](double x, double y, double t) {
    const auto p = set.p.eval(x, y, t, r);
    const auto n = set.n.eval(x, y, t, r);
    const auto phi = set.phi.eval(x, y, t, r);
    const auto [vx, vy] = velocity_at(domain, velocity, x, y);
    const double E = std::hypot(phi.ux, phi.uy);
    double f = p.ut - params.eps_plus * p.lap -
               mu_p * (p.ux * phi.ux + p.uy * phi.uy + p.u * phi.lap) + vx * p.ux + vy * p.uy;
    if (source) f -= ionization_source(n.u, E, params);
    return f;
  };
  m->force_n = [=](double x, double y, double t) {
    const auto n = set.n.eval(x, y, t, r);
    const auto phi = set.phi.eval(x, y, t, r);
    const auto [vx, vy] = velocity_at(domain, velocity, x, y);
    const double E = std::hypot(phi.ux, phi.uy);
    double f = n.ut - params.eps_minus * n.lap +
               mu_n * (n.ux * phi.ux + n.uy * phi.uy + n.u * phi.lap) + vx * n.ux + vy * n.uy;
    if (source) f -= ionization_source(n.u, E, params);
    return f;
  };
  return m;
}

namespace {

double nodal_error(const Mesh& mesh, const Field& u,
                   const std::function<double(double, double, double)>& exact, double t) {
  Field d(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) d[k] = u[k] - exact(mesh.x(k), mesh.y(k), t);
  return l2_norm(mesh, d);
}

void fill_ratios(const std::vector<double>& e, std::vector<double>& ratio,
                 std::vector<double>& order) {
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double q = e[i] / e[i + 1];
    ratio.push_back(q);
    order.push_back(std::log2(q));
  }
}

}  // namespace

ConvergenceReport verify_mms(const RunConfig& config) {
  config.domain.validate();
  if (config.verify.levels < 2) throw ValidationError("verify.levels must be >= 2");

  ConvergenceReport rep;
  rep.kind = config.verify.kind;
  const ManufacturedSet set = default_manufactured_set();
  const bool drift = rep.kind == MmsKind::Coupled;
  PhysParams params = config.params;
  if (!drift) {
    params.mu_plus = 0.0;
    params.mu_minus = 0.0;
  }
  const auto mms = make_manufactured(set, config.domain, params, config.velocity, drift, drift);

  for (int level = 0; level < config.verify.levels; ++level) {
    DomainSpec dom = config.domain;
    dom.nx = config.domain.nx << level;
    dom.ny = config.domain.ny << level;
    const Mesh mesh(dom);
    rep.nx.push_back(dom.nx);
    rep.ny.push_back(dom.ny);

    if (rep.kind == MmsKind::Poisson) {
      const EllipticOperator op(mesh);
      Field rho(mesh.num_nodes()), phiD(mesh.num_nodes(), 0.0);
      for (std::size_t k = 0; k < rho.size(); ++k) {
        rho[k] = -set.phi.eval(mesh.x(k), mesh.y(k), 0.0, dom.r).lap;
        if (mesh.is_dirichlet(k)) phiD[k] = mms->phi(mesh.x(k), mesh.y(k), 0.0);
      }
      const Field phi = solve_poisson(op, rho, phiD, 1e-12).phi;
      rep.dt.push_back(0.0);
      rep.err_phi.push_back(nodal_error(mesh, phi, mms->phi, 0.0));
      continue;
    }

    StepConfig step = config.step;
    step.scheme = Scheme::OriginalF;
    step.source_enabled = drift;
    step.density_bc = DensityBoundary::Dirichlet;
    step.poisson_tol = 1e-12;
    const double scale = std::ldexp(1.0, -2 * level);
    step.dt = config.step.dt * scale;
    step.t_end = config.step.dt * static_cast<double>(config.step.num_steps());
    rep.dt.push_back(step.dt);

    const VelocityField vel = build_velocity(mesh, config.velocity);
    Stepper stepper(mesh, params, vel, step, mms);
    State s;
    s.p.resize(mesh.num_nodes());
    s.n.resize(mesh.num_nodes());
    for (std::size_t k = 0; k < s.p.size(); ++k) {
      s.p[k] = mms->p(mesh.x(k), mesh.y(k), 0.0);
      s.n[k] = mms->n(mesh.x(k), mesh.y(k), 0.0);
    }
    s.phi = stepper.solve_potential(s.p, s.n, 0.0).phi;
    const std::size_t steps = step.num_steps();
    for (std::size_t i = 0; i < steps; ++i) s = stepper.advance(s);
    rep.err_p.push_back(nodal_error(mesh, s.p, mms->p, s.t));
    rep.err_n.push_back(nodal_error(mesh, s.n, mms->n, s.t));
    rep.err_phi.push_back(nodal_error(mesh, s.phi, mms->phi, s.t));
  }
  fill_ratios(rep.err_p, rep.ratio_p, rep.order_p);
  fill_ratios(rep.err_n, rep.ratio_n, rep.order_n);
  fill_ratios(rep.err_phi, rep.ratio_phi, rep.order_phi);
  return rep;
}

}  // namespace discharge
