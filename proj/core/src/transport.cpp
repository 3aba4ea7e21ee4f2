#include "discharge/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "discharge/auxiliary.hpp"
#include "discharge/error.hpp"

namespace discharge {

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("step.dt must be > 0");
  if (!(t_end >= dt)) throw ValidationError("step.t_end must be >= step.dt");
  if (scheme == Scheme::AuxiliaryM && !(M > 0.0)) {
    throw ValidationError("truncation.M must be > 0");
  }
  if (!(poisson_tol > 0.0 && poisson_tol <= 1e-4)) {
    throw ValidationError("step.tol must lie in (0, 1e-4]");
  }
}

std::size_t StepConfig::num_steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

double bernoulli(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0;
  }
  return x / std::expm1(x);
}

double sg_face_flux(double uL, double uR, double d, double eps, double h) {
  const double x = d / eps;
  return (eps / h) * (bernoulli(-x) * uL - bernoulli(x) * uR);
}

double ionization_growth(double E, const PhysParams& params) {
  if (!(E > 0.0)) return 0.0;
  return params.alpha1 * std::exp(-params.alpha2 / E);
}

double ionization_source(double n, double E, const PhysParams& params) {
  if (!(E > 0.0)) return 0.0;
  return params.mu_minus * n * E * (ionization_growth(E, params) - params.eta0);
}

Field ionization_source(const Field& n, const Field& emag, const PhysParams& params) {
  Field out(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) out[k] = ionization_source(n[k], emag[k], params);
  return out;
}

FluxNetwork build_flux_network(const Mesh& mesh, const PhysParams& params,
                               const VelocityField& velocity, const Field& phi,
                               Species species) {
  const auto links = mesh.links();
  const auto faces = mesh.faces();
  FluxNetwork net;
  const std::size_t total = links.size() + faces.size();
  net.a.reserve(total);
  net.b.reserve(total);
  net.ca.reserve(total);
  net.cb.reserve(total);

  const bool positive = species == Species::Positive;
  const double eps = positive ? params.eps_plus : params.eps_minus;
  const double mu = positive ? params.mu_plus : params.mu_minus;
  for (const Link& l : links) {
    // Ions drift down the potential, electrons up it.
    const double dphi = phi[l.a] - phi[l.b];
    const double d = positive ? mu * dphi : -mu * dphi;
    const double x = d / eps;
    net.a.push_back(l.a);
    net.b.push_back(l.b);
    net.ca.push_back(l.weight * eps * bernoulli(-x));
    net.cb.push_back(l.weight * eps * bernoulli(x));
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double q = velocity.face_flux.empty() ? 0.0 : velocity.face_flux[f];
    net.a.push_back(faces[f].a);
    net.b.push_back(faces[f].b);
    net.ca.push_back(std::max(q, 0.0));
    net.cb.push_back(std::max(-q, 0.0));
  }
  return net;
}

namespace {

bool all_finite(const Field& f) {
  return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

// Attach a sink s * u either implicitly (s <= 0, semi-implicit) or as an
// explicit rate with the lagged value.
void add_sink(SourceSplit& out, std::size_t k, double s, double u_old, SourceTreatment treat) {
  if (treat == SourceTreatment::SemiImplicitSink && s <= 0.0) {
    out.coeff[k] += s;
  } else {
    out.rate[k] += s * u_old;
  }
}

}  // namespace

SourceTerms build_sources(const Mesh& mesh, const PhysParams& params, const StepConfig& cfg,
                          const Field& p, const Field& n, const Field& emag) {
  const std::size_t nn = mesh.num_nodes();
  SourceTerms s;
  s.p = {Field(nn, 0.0), Field(nn, 0.0), true};
  s.n = {Field(nn, 0.0), Field(nn, 0.0), true};
  for (std::size_t k = 0; k < nn; ++k) {
    if (cfg.scheme == Scheme::AuxiliaryM && std::abs(p[k] - n[k]) > cfg.M) s.clamp_active = true;
  }
  if (!cfg.source_enabled) return s;

  const double mu = params.mu_minus;
  for (std::size_t k = 0; k < nn; ++k) {
    const double E = emag[k];
    if (!(E > 0.0)) continue;
    const double growth = mu * E * ionization_growth(E, params) * n[k];
    const double sink_rate = mu * E * params.eta0;
    if (cfg.scheme == Scheme::OriginalF) {
      // The p-equation source depends on n only: explicit.
      s.p.rate[k] = growth - sink_rate * n[k];
      s.n.rate[k] = growth;
      add_sink(s.n, k, -sink_rate, n[k], cfg.source_treatment);
    } else {
      s.p.rate[k] = growth;
      s.n.rate[k] = growth;
      add_sink(s.p, k, sink_rate * aux_sink_factor_p(cfg.M, p[k], n[k]), p[k],
               cfg.source_treatment);
      add_sink(s.n, k, sink_rate * aux_sink_factor_n(cfg.M, p[k]), n[k],
               cfg.source_treatment);
    }
  }
  s.p.finite = all_finite(s.p.rate) && all_finite(s.p.coeff);
  s.n.finite = all_finite(s.n.rate) && all_finite(s.n.coeff);
  return s;
}

struct Stepper::LinearSolver {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
};

Stepper::Stepper(const Mesh& mesh, const PhysParams& params, const VelocityField& velocity,
                 const StepConfig& cfg, std::shared_ptr<const Manufactured> mms)
    : mesh_(&mesh),
      params_(params),
      velocity_(velocity),
      cfg_(cfg),
      mms_(std::move(mms)),
      op_(mesh),
      phiD_(dirichlet_potential(mesh, params)),
      solver_(std::make_unique<LinearSolver>()) {
  cfg_.validate();
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

Field Stepper::charge_density(const Field& p, const Field& n, double t,
                              bool* clamp_active) const {
  const std::size_t nn = p.size();
  Field rho(nn);
  bool clamped = false;
  for (std::size_t k = 0; k < nn; ++k) {
    double q = p[k] - n[k];
    if (cfg_.scheme == Scheme::AuxiliaryM) {
      if (std::abs(q) > cfg_.M) clamped = true;
      q = clamp_G(cfg_.M, q);
    }
    rho[k] = q / params_.eps0;
    if (mms_) rho[k] += mms_->force_phi(mesh_->x(k), mesh_->y(k), t);
  }
  if (clamp_active != nullptr) *clamp_active = clamped;
  return rho;
}

Field Stepper::potential_dirichlet(double t) const {
  if (!mms_) return phiD_;
  Field out(mesh_->num_nodes(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (mesh_->is_dirichlet(k)) out[k] = mms_->phi(mesh_->x(k), mesh_->y(k), t);
  }
  return out;
}

PoissonResult Stepper::solve_potential(const Field& p, const Field& n, double t,
                                       const Field* guess) const {
  return solve_poisson(op_, charge_density(p, n, t), potential_dirichlet(t), cfg_.poisson_tol,
                       guess);
}

Field Stepper::solve_species(const Field& u, const FluxNetwork& net, const SourceSplit& src,
                             double t_new, Species species) {
  const Mesh& mesh = *mesh_;
  const std::size_t nn = mesh.num_nodes();
  const auto weights = mesh.node_weights();
  const double dt = cfg_.dt;
  const bool pinned_bc = cfg_.density_bc == DensityBoundary::Dirichlet;
  auto pinned = [&](std::size_t k) { return pinned_bc && mesh.is_dirichlet(k); };
  const bool positive = species == Species::Positive;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nn + 4 * net.size());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(nn));
  for (std::size_t k = 0; k < nn; ++k) {
    const auto row = static_cast<int>(k);
    if (pinned(k)) {
      trips.emplace_back(row, row, 1.0);
      double value = positive ? params_.theta_p : params_.theta_n;
      if (mms_) value = (positive ? mms_->p : mms_->n)(mesh.x(k), mesh.y(k), t_new);
      rhs[row] = value;
      continue;
    }
    trips.emplace_back(row, row, weights[k] / dt - weights[k] * src.coeff[k]);
    double r = weights[k] * (u[k] / dt + src.rate[k]);
    if (mms_) r += weights[k] * (positive ? mms_->force_p : mms_->force_n)(mesh.x(k), mesh.y(k), t_new);
    rhs[row] = r;
  }
  for (std::size_t e = 0; e < net.size(); ++e) {
    const auto a = static_cast<int>(net.a[e]);
    const auto b = static_cast<int>(net.b[e]);
    if (!pinned(net.a[e])) {
      trips.emplace_back(a, a, net.ca[e]);
      trips.emplace_back(a, b, -net.cb[e]);
    }
    if (!pinned(net.b[e])) {
      trips.emplace_back(b, a, -net.ca[e]);
      trips.emplace_back(b, b, net.cb[e]);
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(nn), static_cast<Eigen::Index>(nn));
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  auto& lu = solver_->lu;
  if (!solver_->analyzed) {
    lu.analyzePattern(A);
    solver_->analyzed = true;
  }
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("transport: sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericalError("transport: linear solve produced non-finite values");
  }
  return Field(x.data(), x.data() + x.size());
}

State Stepper::advance(const State& state, StepInfo* info) {
  const Mesh& mesh = *mesh_;
  const double t_new = state.t + cfg_.dt;

  // (1) Poisson on the current densities; warm start from the carried phi.
  bool clamp_poisson = false;
  charge_density(state.p, state.n, state.t, &clamp_poisson);
  const PoissonResult pr = solve_potential(state.p, state.n, state.t,
                                           state.phi.empty() ? nullptr : &state.phi);
  GradientField grad = gradient_field(mesh, pr.phi);

  double max_e = 0.0;
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) max_e = std::max(max_e, grad.mag[k]);
  if (cfg_.source_enabled) {
    const double stiffness =
        cfg_.dt * params_.mu_minus * max_e * std::max(params_.alpha1, params_.eta0);
    if (stiffness > 1.0) {
      throw NumericalError("transport: dt * mu_- * max|E| * max(alpha1, eta0) = " +
                               std::to_string(stiffness) + " exceeds 1 at t = " +
                               std::to_string(state.t),
                           stiffness);
    }
  }

  // (2) Sources and flux networks with phi frozen.
  const SourceTerms src = build_sources(mesh, params_, cfg_, state.p, state.n, grad.mag);
  if (info != nullptr) {
    info->clamp_active = clamp_poisson || src.clamp_active;
    info->source_finite = src.p.finite && src.n.finite;
    info->max_field = max_e;
    info->poisson_iterations = pr.iterations;
  }
  if (!(src.p.finite && src.n.finite)) {
    throw NumericalError("transport: non-finite ionization source at t = " +
                         std::to_string(state.t));
  }
  const FluxNetwork net_p = build_flux_network(mesh, params_, velocity_, pr.phi, Species::Positive);
  const FluxNetwork net_n = build_flux_network(mesh, params_, velocity_, pr.phi, Species::Negative);

  // (3) Implicit Euler for each species.
  State next;
  next.t = t_new;
  next.p = solve_species(state.p, net_p, src.p, t_new, Species::Positive);
  next.n = solve_species(state.n, net_n, src.n, t_new, Species::Negative);
  next.phi = solve_potential(next.p, next.n, t_new, &pr.phi).phi;

  if (info != nullptr) {
    info->phi_used = pr.phi;
    info->grad_phi = std::move(grad);
  }
  return next;
}

State advance_step(const State& state, const Mesh& mesh, const PhysParams& params,
                   const VelocityField& velocity, const StepConfig& cfg) {
  Stepper stepper(mesh, params, velocity, cfg);
  return stepper.advance(state);
}

}  // namespace discharge
