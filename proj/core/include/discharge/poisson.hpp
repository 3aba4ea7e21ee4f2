/// @file poisson.hpp
/// @brief -Laplace(phi) = rho on the mapped mesh with phi = phi_D on the
/// electrodes and zero normal derivative on the far side.
///
/// The operator is the Euler-Lagrange operator of the discrete Dirichlet
/// energy sum(w_ab (u_a - u_b)^2) over Mesh::links(), so it is symmetric by
/// construction; the Neumann condition on the sides is natural.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "discharge/geometry.hpp"

namespace discharge {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class EllipticOperator {
 public:
  explicit EllipticOperator(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::size_t num_unknowns() const { return unknowns_.size(); }
  std::span<const std::size_t> unknown_nodes() const { return unknowns_; }
  /// Position of node k among the unknowns, or -1 for Dirichlet nodes.
  std::ptrdiff_t unknown_index(std::size_t k) const { return slot_[k]; }

  /// Operator restricted to the non-Dirichlet nodes (SPD).
  const SparseMatrix& matrix() const { return matrix_; }

  /// Full-node application (A u)_a = sum_b w_ab (u_a - u_b), every row.
  Field apply(const Field& u) const;

  /// Right-hand side M rho + (Dirichlet coupling of phiD) over the unknowns.
  Eigen::VectorXd rhs(const Field& rho, const Field& phiD) const;
  /// Scatter the unknown vector into a full node field; Dirichlet nodes take
  /// phiD.
  Field expand(const Eigen::VectorXd& x, const Field& phiD) const;
  Eigen::VectorXd restrict_to_unknowns(const Field& u) const;

 private:
  const Mesh* mesh_;
  std::vector<std::size_t> unknowns_;
  std::vector<std::ptrdiff_t> slot_;
  SparseMatrix matrix_;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient. Stops when
/// ||b - A x|| <= tol ||b||. x holds the initial guess on entry.
CgResult pcg_solve(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                   double tol, int max_iterations);

struct PoissonResult {
  Field phi;
  int iterations = 0;
  double relative_residual = 0.0;
};

inline constexpr double kDefaultPoissonTol = 1e-10;

/// Throws NumericalError (carrying the final residual) on non-convergence
/// within 50 nx ny iterations. Without a guess the solver starts from the
/// linear-in-eta blend of the two electrode values in each column.
PoissonResult solve_poisson(const EllipticOperator& op, const Field& rho, const Field& phiD,
                            double tol = kDefaultPoissonTol, const Field* guess = nullptr);
Field solve_poisson(const Mesh& mesh, const Field& rho, const Field& phiD,
                    double tol = kDefaultPoissonTol);

struct GradientField {
  Field gx;
  Field gy;
  Field mag;
};

/// Central differences in the interior, second-order one-sided stencils on
/// the boundary rows/columns, chain rule through the terrain-following map.
GradientField gradient_field(const Mesh& mesh, const Field& u);

struct Norms {
  double L2 = 0.0;
  double Linf = 0.0;
  double L3 = 0.0;
  double L6 = 0.0;
  double H1_seminorm = 0.0;
};

/// Mass-lumped nodal quadrature with Mesh::node_weights().
Norms field_norms(const Mesh& mesh, const Field& u, const GradientField* grad = nullptr);

/// sqrt(sum m_k u_k^2)
double l2_norm(const Mesh& mesh, std::span<const double> u);

}  // namespace discharge
