#include "discharge/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "discharge/error.hpp"
#include "discharge/poisson.hpp"

namespace discharge {

namespace {

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("params.") + key + " must be > 0");
  }
}

}  // namespace

void PhysParams::validate() const {
  require_positive(eps0, "eps0");
  require_positive(eps_plus, "eps_plus");
  require_positive(eps_minus, "eps_minus");
  require_positive(mu_plus, "mu_plus");
  require_positive(mu_minus, "mu_minus");
  require_positive(alpha1, "alpha1");
  require_positive(alpha2, "alpha2");
  require_positive(eta0, "eta0");
  require_positive(theta_p, "theta_p");
  require_positive(theta_n, "theta_n");
  if (!std::isfinite(V)) throw ValidationError("params.V must be finite");
  if (!(R_a <= R_b)) throw ValidationError("params.R_a must be <= params.R_b");
  for (const auto& [v, key] : {std::pair{theta_p, "theta_p"}, std::pair{theta_n, "theta_n"}}) {
    if (v < R_a || v > R_b) {
      throw ValidationError(std::string("params.") + key + " must lie in [R_a, R_b]");
    }
  }
}

void VelocitySpec::validate() const {
  if (kind == Kind::StreamFunction) {
    if (!std::isfinite(v0)) throw ValidationError("velocity.v0 must be finite");
    if (kx < 1) throw ValidationError("velocity.kx must be >= 1");
    if (ky < 1) throw ValidationError("velocity.ky must be >= 1");
  }
}

double stream_function(const DomainSpec& domain, const VelocitySpec& spec, double x, double y) {
  if (spec.kind == VelocitySpec::Kind::Zero) return 0.0;
  using std::numbers::pi;
  const double s = (x + domain.r) / (2.0 * domain.r);
  const double eta = y / gap_profile(x, domain);
  return spec.v0 * std::sin(spec.kx * pi * s) * std::sin(spec.ky * pi * eta);
}

std::pair<double, double> velocity_at(const DomainSpec& domain, const VelocitySpec& spec,
                                      double x, double y) {
  if (spec.kind == VelocitySpec::Kind::Zero) return {0.0, 0.0};
  using std::numbers::pi;
  const double w = gap_profile(x, domain);
  const double dw = gap_slope(x, domain);
  const double s = (x + domain.r) / (2.0 * domain.r);
  const double eta = y / w;
  const double kx = spec.kx * pi, ky = spec.ky * pi;
  const double psi_s = spec.v0 * kx * std::cos(kx * s) * std::sin(ky * eta);
  const double psi_eta = spec.v0 * ky * std::sin(kx * s) * std::cos(ky * eta);
  const double psi_y = psi_eta / w;
  const double psi_x = psi_s / (2.0 * domain.r) - psi_eta * eta * dw / w;
  return {psi_y, -psi_x};
}

VelocityField build_velocity(const Mesh& mesh, const VelocitySpec& spec) {
  spec.validate();
  const std::size_t n = mesh.num_nodes();
  VelocityField v{Field(n, 0.0), Field(n, 0.0), std::vector<double>(mesh.faces().size(), 0.0)};
  if (spec.kind == VelocitySpec::Kind::Zero) return v;
  const DomainSpec& dom = mesh.spec();
  for (std::size_t k = 0; k < n; ++k) {
    const auto [vx, vy] = velocity_at(dom, spec, mesh.x(k), mesh.y(k));
    v.vx[k] = vx;
    v.vy[k] = vy;
  }
  const auto faces = mesh.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const DualFace& face = faces[f];
    v.face_flux[f] = stream_function(dom, spec, face.hi_x, face.hi_y) -
                     stream_function(dom, spec, face.lo_x, face.lo_y);
  }
  return v;
}

Field discrete_divergence(const Mesh& mesh, const VelocityField& v) {
  Field div(mesh.num_nodes(), 0.0);
  const auto faces = mesh.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    div[faces[f].a] += v.face_flux[f];
    div[faces[f].b] -= v.face_flux[f];
  }
  return div;
}

double default_bump_shape(double xi, double eta, double r) {
  using std::numbers::pi;
  const double sy = std::sin(pi * eta);
  const double cx = std::cos(pi * xi / (2.0 * r));
  return sy * sy * cx * cx;
}

Field dirichlet_potential(const Mesh& mesh, const PhysParams& params) {
  Field phiD(mesh.num_nodes(), 0.0);
  for (std::size_t k = 0; k < phiD.size(); ++k) {
    if (mesh.tag(k) == BoundaryTag::ElectrodeA) phiD[k] = params.V;
  }
  return phiD;
}

Field harmonic_lift(const Mesh& mesh, const PhysParams& params, double tol) {
  const Field zero(mesh.num_nodes(), 0.0);
  return solve_poisson(mesh, zero, dirichlet_potential(mesh, params), tol);
}

State init_state(const Mesh& mesh, const PhysParams& params, const Bump& bump, double tol) {
  const std::size_t n = mesh.num_nodes();
  State s;
  s.p.resize(n);
  s.n.resize(n);
  const double r = mesh.spec().r;
  for (int j = 0; j <= mesh.ny(); ++j) {
    for (int i = 0; i <= mesh.nx(); ++i) {
      const std::size_t k = mesh.index(i, j);
      double b = 0.0;
      if (!mesh.is_dirichlet(k) && bump.amplitude != 0.0) {
        const double xi = mesh.x(k);
        const double eta = mesh.eta(j);
        b = bump.shape ? bump.shape(xi, eta) : default_bump_shape(xi, eta, r);
      }
      s.p[k] = params.theta_p + bump.amplitude * b;
      s.n[k] = params.theta_n + bump.amplitude * b;
      if (s.p[k] < 0.0 || s.n[k] < 0.0) {
        throw ValidationError("init_state: bump amplitude " + std::to_string(bump.amplitude) +
                              " makes the initial density negative at node " +
                              std::to_string(k));
      }
    }
  }
  Field rho(n);
  for (std::size_t k = 0; k < n; ++k) rho[k] = (s.p[k] - s.n[k]) / params.eps0;
  s.phi = solve_poisson(mesh, rho, dirichlet_potential(mesh, params), tol);
  return s;
}

}  // namespace discharge
