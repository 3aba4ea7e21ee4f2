#include "discharge/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "discharge/error.hpp"

namespace discharge {

EllipticOperator::EllipticOperator(const Mesh& mesh) : mesh_(&mesh) {
  const std::size_t n = mesh.num_nodes();
  slot_.assign(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    if (!mesh.is_dirichlet(k)) {
      slot_[k] = static_cast<std::ptrdiff_t>(unknowns_.size());
      unknowns_.push_back(k);
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.links().size() * 4);
  for (const Link& l : mesh.links()) {
    const std::ptrdiff_t sa = slot_[l.a];
    const std::ptrdiff_t sb = slot_[l.b];
    if (sa >= 0) trips.emplace_back(sa, sa, l.weight);
    if (sb >= 0) trips.emplace_back(sb, sb, l.weight);
    if (sa >= 0 && sb >= 0) {
      trips.emplace_back(sa, sb, -l.weight);
      trips.emplace_back(sb, sa, -l.weight);
    }
  }
  const auto m = static_cast<Eigen::Index>(unknowns_.size());
  matrix_.resize(m, m);
  matrix_.setFromTriplets(trips.begin(), trips.end());
  matrix_.makeCompressed();
}

Field EllipticOperator::apply(const Field& u) const {
  Field out(u.size(), 0.0);
  for (const Link& l : mesh_->links()) {
    const double f = l.weight * (u[l.a] - u[l.b]);
    out[l.a] += f;
    out[l.b] -= f;
  }
  return out;
}

Eigen::VectorXd EllipticOperator::rhs(const Field& rho, const Field& phiD) const {
  const auto weights = mesh_->node_weights();
  Eigen::VectorXd b(static_cast<Eigen::Index>(unknowns_.size()));
  for (std::size_t s = 0; s < unknowns_.size(); ++s) {
    const std::size_t k = unknowns_[s];
    b[static_cast<Eigen::Index>(s)] = weights[k] * rho[k];
  }
  for (const Link& l : mesh_->links()) {
    const std::ptrdiff_t sa = slot_[l.a];
    const std::ptrdiff_t sb = slot_[l.b];
    if (sa >= 0 && sb < 0) b[sa] += l.weight * phiD[l.b];
    if (sb >= 0 && sa < 0) b[sb] += l.weight * phiD[l.a];
  }
  return b;
}

Field EllipticOperator::expand(const Eigen::VectorXd& x, const Field& phiD) const {
  Field out(mesh_->num_nodes());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = slot_[k] >= 0 ? x[slot_[k]] : phiD[k];
  }
  return out;
}

Eigen::VectorXd EllipticOperator::restrict_to_unknowns(const Field& u) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(unknowns_.size()));
  for (std::size_t s = 0; s < unknowns_.size(); ++s) {
    x[static_cast<Eigen::Index>(s)] = u[unknowns_[s]];
  }
  return x;
}

CgResult pcg_solve(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                   double tol, int max_iterations) {
  CgResult result;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }
  const Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();

  Eigen::VectorXd r = b - A * x;
  double rnorm = r.norm();
  if (rnorm <= tol * bnorm) {
    result.relative_residual = rnorm / bnorm;
    result.converged = true;
    return result;
  }
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(b.size());
  double rz = r.dot(z);

  for (int it = 1; it <= max_iterations; ++it) {
    q.noalias() = A * p;
    const double alpha = rz / p.dot(q);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    rnorm = r.norm();
    result.iterations = it;
    if (rnorm <= tol * bnorm) {
      // Confirm against the true residual; recurrence drift is possible on
      // long runs.
      rnorm = (b - A * x).norm();
      if (rnorm <= tol * bnorm) {
        result.relative_residual = rnorm / bnorm;
        result.converged = true;
        return result;
      }
      r = b - A * x;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  result.relative_residual = rnorm / bnorm;
  return result;
}

PoissonResult solve_poisson(const EllipticOperator& op, const Field& rho, const Field& phiD,
                            double tol, const Field* guess) {
  if (!(tol > 0.0 && tol <= 1e-4)) {
    throw ValidationError("solve_poisson: tol must lie in (0, 1e-4]");
  }
  const Mesh& mesh = op.mesh();
  for (double v : rho) {
    if (!std::isfinite(v)) throw NumericalError("solve_poisson: non-finite charge density");
  }

  Eigen::VectorXd x;
  if (guess != nullptr) {
    x = op.restrict_to_unknowns(*guess);
  } else {
    Field blend(mesh.num_nodes());
    for (int j = 0; j <= mesh.ny(); ++j) {
      for (int i = 0; i <= mesh.nx(); ++i) {
        const double bottom = phiD[mesh.index(i, 0)];
        const double top = phiD[mesh.index(i, mesh.ny())];
        blend[mesh.index(i, j)] = bottom + mesh.eta(j) * (top - bottom);
      }
    }
    x = op.restrict_to_unknowns(blend);
  }

  const Eigen::VectorXd b = op.rhs(rho, phiD);
  const int cap = 50 * mesh.nx() * mesh.ny();
  const CgResult cg = pcg_solve(op.matrix(), b, x, tol, cap);
  if (!cg.converged) {
    throw NumericalError("poisson: CG did not converge in " + std::to_string(cap) +
                             " iterations (relative residual " +
                             std::to_string(cg.relative_residual) + ")",
                         cg.relative_residual);
  }
  return {op.expand(x, phiD), cg.iterations, cg.relative_residual};
}

Field solve_poisson(const Mesh& mesh, const Field& rho, const Field& phiD, double tol) {
  const EllipticOperator op(mesh);
  return solve_poisson(op, rho, phiD, tol).phi;
}

namespace {

// First derivative along one logical direction at position q of n+1 samples.
template <typename Sample>
double logical_derivative(Sample u, int q, int n, double h) {
  if (q == 0) return (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
  if (q == n) return (3.0 * u(n) - 4.0 * u(n - 1) + u(n - 2)) / (2.0 * h);
  return (u(q + 1) - u(q - 1)) / (2.0 * h);
}

}  // namespace

GradientField gradient_field(const Mesh& mesh, const Field& u) {
  const std::size_t n = mesh.num_nodes();
  GradientField g{Field(n), Field(n), Field(n)};
  const int nx = mesh.nx();
  const int ny = mesh.ny();
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const std::size_t k = mesh.index(i, j);
      const double u_xi = logical_derivative(
          [&](int q) { return u[mesh.index(q, j)]; }, i, nx, mesh.dxi());
      const double u_eta = logical_derivative(
          [&](int q) { return u[mesh.index(i, q)]; }, j, ny, mesh.deta());
      const double w = mesh.width(i);
      g.gx[k] = u_xi - mesh.dy_dxi(k) / w * u_eta;
      g.gy[k] = u_eta / w;
      g.mag[k] = std::hypot(g.gx[k], g.gy[k]);
    }
  }
  return g;
}

double l2_norm(const Mesh& mesh, std::span<const double> u) {
  const auto wts = mesh.node_weights();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += wts[k] * u[k] * u[k];
  return std::sqrt(s);
}

Norms field_norms(const Mesh& mesh, const Field& u, const GradientField* grad) {
  GradientField local;
  if (grad == nullptr) {
    local = gradient_field(mesh, u);
    grad = &local;
  }
  const auto wts = mesh.node_weights();
  Norms out;
  double s2 = 0.0, s3 = 0.0, s6 = 0.0, sg = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = std::abs(u[k]);
    const double a2 = a * a;
    s2 += wts[k] * a2;
    s3 += wts[k] * a2 * a;
    s6 += wts[k] * a2 * a2 * a2;
    sg += wts[k] * (grad->gx[k] * grad->gx[k] + grad->gy[k] * grad->gy[k]);
    out.Linf = std::max(out.Linf, a);
  }
  out.L2 = std::sqrt(s2);
  out.L3 = std::cbrt(s3);
  out.L6 = std::pow(s6, 1.0 / 6.0);
  out.H1_seminorm = std::sqrt(sg);
  return out;
}

}  // namespace discharge
