/// @file galerkin.hpp
/// @brief Spectral Galerkin cross-check on rectangles: eigenmodes of
/// -Laplace + 1 with Neumann sides and Dirichlet electrodes, spectral
/// Poisson solve and RK4 integration of the coefficient ODEs.
#pragma once

#include <cstddef>
#include <vector>

#include "discharge/geometry.hpp"
#include "discharge/model.hpp"
#include "discharge/run_config.hpp"
#include "discharge/simulation.hpp"

namespace discharge {

struct Mode {
  int k = 0;  ///< cosine index in x, k >= 0
  int m = 1;  ///< sine index in y, m >= 1
  double lambda = 0.0;
  double norm = 0.0;
};

/// Normalized modes N cos(k pi (x + r) / 2r) sin(m pi y / h) on the
/// rectangle, ordered by eigenvalue with ties broken by (k, m). The
/// quadrature grid is the uniform (quad_n + 1)^2 node set of a Rectangle
/// mesh, where the trapezoid rule is exact for the mode products.
class SpectralBasis {
 public:
  SpectralBasis(const DomainSpec& rect, int K, int Mo, int quad_n = 0);

  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_[i]; }
  double r() const { return r_; }
  double h() const { return h_; }
  int quad_n() const { return quad_n_; }
  /// Quadrature grid as a mesh; its node weights are the trapezoid weights.
  const Mesh& grid() const { return grid_; }

  double value(std::size_t i, double x, double y) const;
  std::pair<double, double> gradient(std::size_t i, double x, double y) const;

  /// Mode i and its derivatives sampled on the grid nodes.
  const Field& sample(std::size_t i) const { return w_[i]; }
  const Field& sample_dx(std::size_t i) const { return wx_[i]; }
  const Field& sample_dy(std::size_t i) const { return wy_[i]; }

  /// Quadrature inner product sum m_k f_k g_k over the grid.
  double inner(const Field& f, const Field& g) const;
  /// sum_i c_i w_i (plus d/dx, d/dy) on the grid.
  Field synthesize(const std::vector<double>& c) const;
  Field synthesize_dx(const std::vector<double>& c) const;
  Field synthesize_dy(const std::vector<double>& c) const;
  /// sum_i c_i w_i at an arbitrary point.
  double evaluate(const std::vector<double>& c, double x, double y) const;

 private:
  double r_ = 0.0;
  double h_ = 0.0;
  int quad_n_ = 0;
  std::vector<Mode> modes_;
  Mesh grid_;
  std::vector<Field> w_, wx_, wy_;
};

SpectralBasis build_basis(const DomainSpec& rect, int K, int Mo, int quad_n = 0);

/// <field, w_i> for every mode; field sampled on the basis grid.
std::vector<double> project_field(const SpectralBasis& basis, const Field& field);

/// Potential on the grid: V y / h plus sum_i <rhs, w_i> / (lambda_i - 1) w_i.
Field spectral_poisson(const SpectralBasis& basis, const Field& rhs, double V);
/// Mode coefficients of the non-lift part of spectral_poisson.
std::vector<double> spectral_poisson_coeffs(const SpectralBasis& basis, const Field& rhs);

/// a: coefficients of p - theta_p, b: coefficients of n - theta_n.
struct CoeffState {
  double t = 0.0;
  std::vector<double> a;
  std::vector<double> b;
};

struct CoeffRate {
  std::vector<double> da;
  std::vector<double> db;
  bool finite = true;
};

/// Right-hand side of the coefficient ODEs: diffusion through the
/// eigenvalues, drift, advection and the source by quadrature on the grid.
/// `step.scheme`, `step.M` and `step.source_enabled` select the source and
/// the Poisson charge.
CoeffRate galerkin_rhs(const CoeffState& c, const SpectralBasis& basis, const PhysParams& params,
                       const VelocitySpec& velocity, const StepConfig& step);

/// Fields of a coefficient state on the basis grid.
State reconstruct(const CoeffState& c, const SpectralBasis& basis, const PhysParams& params,
                  const StepConfig& step);

struct GalerkinRun {
  std::vector<CoeffState> coeffs;
  /// States on basis.grid() with monitor records.
  Trajectory trajectory;
};

/// Projects the configured initial bump, then integrates with classical
/// RK4 at fixed dt up to step.t_end. Throws NumericalError on non-finite
/// coefficients.
GalerkinRun run_galerkin(const RunConfig& config, const SpectralBasis& basis, double dt);
GalerkinRun run_galerkin(const RunConfig& config);

}  // namespace discharge
