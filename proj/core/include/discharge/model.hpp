/// @file model.hpp
/// @brief Physical parameters, the evolving state, initial data and the
/// prescribed incompressible gas velocity.
#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "discharge/geometry.hpp"

namespace discharge {

struct PhysParams {
  double eps0 = 1.0;       ///< permittivity
  double eps_plus = 1.0;   ///< ion diffusion coefficient
  double eps_minus = 1.0;  ///< electron diffusion coefficient
  double mu_plus = 1.0;    ///< ion mobility
  double mu_minus = 1.0;   ///< electron mobility
  double alpha1 = 1.0;     ///< ionization prefactor
  double alpha2 = 1.0;     ///< ionization field scale
  double eta0 = 1.0;       ///< attachment constant
  double V = 1.0;          ///< potential of electrode A
  double theta_p = 1.0;    ///< ion density on both electrodes
  double theta_n = 1.0;    ///< electron density on both electrodes
  double R_a = 0.0;        ///< admissible lower bound for theta_p, theta_n
  double R_b = std::numeric_limits<double>::infinity();

  void validate() const;
};

/// Field triple (p, n, phi) at time t; node-valued on one mesh.
struct State {
  double t = 0.0;
  Field p;
  Field n;
  Field phi;
};

struct VelocitySpec {
  enum class Kind { Zero, StreamFunction };
  Kind kind = Kind::Zero;
  double v0 = 0.0;
  int kx = 1;  ///< half-wave count across |x| <= r
  int ky = 1;  ///< half-wave count across the gap

  void validate() const;
};

/// Stream function psi(x, y) = v0 sin(kx pi (x + r) / 2r) sin(ky pi y / w(x)).
/// It vanishes on the whole boundary, so v = (psi_y, -psi_x) is tangential.
double stream_function(const DomainSpec& domain, const VelocitySpec& spec, double x, double y);
/// Analytic curl of the stream function at (x, y).
std::pair<double, double> velocity_at(const DomainSpec& domain, const VelocitySpec& spec,
                                      double x, double y);

struct VelocityField {
  Field vx;
  Field vy;
  /// Volumetric flux through each Mesh::faces() entry, from a to b.
  std::vector<double> face_flux;
};

VelocityField build_velocity(const Mesh& mesh, const VelocitySpec& spec);

/// Net volumetric outflow of each node's control volume (integrated form of
/// div v). Vanishes to rounding for fields built from a stream function.
Field discrete_divergence(const Mesh& mesh, const VelocityField& v);

struct Bump {
  double amplitude = 0.0;
  /// Shape in logical coordinates (xi, eta); empty means the default
  /// sin^2(pi eta) cos^2(pi xi / 2r).
  std::function<double(double xi, double eta)> shape;
};

double default_bump_shape(double xi, double eta, double r);

/// phi_D on the electrodes: V on A, 0 on B; zero elsewhere.
Field dirichlet_potential(const Mesh& mesh, const PhysParams& params);
/// Harmonic extension of phi_D into the domain (Laplace solve).
Field harmonic_lift(const Mesh& mesh, const PhysParams& params, double tol = 1e-10);

/// Compatible initial data p0 = theta_p + a B, n0 = theta_n + a B, with phi
/// from one Poisson solve on (p0 - n0) / eps0.
State init_state(const Mesh& mesh, const PhysParams& params, const Bump& bump,
                 double tol = 1e-10);

}  // namespace discharge
