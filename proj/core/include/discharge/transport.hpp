/// @file transport.hpp
/// @brief Implicit Scharfetter-Gummel drift-diffusion for p and n with
/// upwind gas advection, the ionization source and Gummel-lagged coupling
/// to the Poisson solve.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "discharge/geometry.hpp"
#include "discharge/model.hpp"
#include "discharge/poisson.hpp"

namespace discharge {

enum class Scheme { OriginalF, AuxiliaryM };
enum class SourceTreatment { Explicit, SemiImplicitSink };
/// Dirichlet pins p, n on the electrodes; ZeroFlux turns every boundary
/// into a no-flux boundary for the densities (conservation audits only).
enum class DensityBoundary { Dirichlet, ZeroFlux };

struct StepConfig {
  double dt = 1e-3;
  double t_end = 1e-2;
  Scheme scheme = Scheme::AuxiliaryM;
  double M = 1e6;
  SourceTreatment source_treatment = SourceTreatment::SemiImplicitSink;
  double poisson_tol = kDefaultPoissonTol;
  bool source_enabled = true;
  DensityBoundary density_bc = DensityBoundary::Dirichlet;

  void validate() const;
  std::size_t num_steps() const;
};

/// B(x) = x / (e^x - 1), B(0) = 1.
double bernoulli(double x);

/// Scharfetter-Gummel flux from L to R across a face of spacing h:
/// (eps/h) (B(-d/eps) uL - B(d/eps) uR).
double sg_face_flux(double uL, double uR, double d, double eps, double h);

/// alpha1 exp(-alpha2 / E), with the E -> 0 limit 0 taken at E <= 0.
double ionization_growth(double E, const PhysParams& params);
/// F = mu_- n E (alpha1 exp(-alpha2/E) - eta0); F = 0 where E = 0.
double ionization_source(double n, double E, const PhysParams& params);
Field ionization_source(const Field& n, const Field& emag, const PhysParams& params);

enum class Species { Positive, Negative };

/// Linear two-point fluxes of one species: flux(a -> b) = ca u_a - cb u_b.
/// Entries [0, links) are drift-diffusion links, the rest advective faces.
struct FluxNetwork {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
  std::vector<double> ca;
  std::vector<double> cb;

  std::size_t size() const { return a.size(); }
  double flux(std::size_t e, const Field& u) const { return ca[e] * u[a[e]] - cb[e] * u[b[e]]; }
};

/// Particle-flux network for one species with the potential frozen.
FluxNetwork build_flux_network(const Mesh& mesh, const PhysParams& params,
                               const VelocityField& velocity, const Field& phi,
                               Species species);

/// Per-node source split: du/dt = ... + rate + coeff * u_new, coeff <= 0.
struct SourceSplit {
  Field rate;
  Field coeff;
  bool finite = true;
};

struct SourceTerms {
  SourceSplit p;
  SourceSplit n;
  bool clamp_active = false;
};

SourceTerms build_sources(const Mesh& mesh, const PhysParams& params, const StepConfig& cfg,
                          const Field& p, const Field& n, const Field& emag);

/// Exact fields and forcing of a manufactured solution; when present the
/// stepper takes Dirichlet data from the exact fields and adds the forcing
/// to each equation.
struct Manufactured {
  std::function<double(double x, double y, double t)> p, n, phi;
  std::function<double(double x, double y, double t)> force_p, force_n, force_phi;
};

struct StepInfo {
  Field phi_used;
  GradientField grad_phi;
  bool clamp_active = false;
  bool source_finite = true;
  double max_field = 0.0;
  int poisson_iterations = 0;
};

class Stepper {
 public:
  Stepper(const Mesh& mesh, const PhysParams& params, const VelocityField& velocity,
          const StepConfig& cfg, std::shared_ptr<const Manufactured> mms = nullptr);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  const Mesh& mesh() const { return *mesh_; }
  const StepConfig& config() const { return cfg_; }
  const EllipticOperator& elliptic() const { return op_; }

  /// Poisson right-hand side (p - n)/eps0, or G(M, p - n)/eps0 for the
  /// auxiliary scheme, plus any manufactured forcing at time t.
  Field charge_density(const Field& p, const Field& n, double t, bool* clamp_active = nullptr) const;
  Field potential_dirichlet(double t) const;
  PoissonResult solve_potential(const Field& p, const Field& n, double t,
                                const Field* guess = nullptr) const;

  /// One Gummel cycle from t to t + dt. Throws NumericalError on linear
  /// solve failure, dt bound violation or non-finite sources.
  State advance(const State& state, StepInfo* info = nullptr);

 private:
  struct LinearSolver;
  Field solve_species(const Field& u, const FluxNetwork& net, const SourceSplit& src,
                      double t_new, Species species);

  const Mesh* mesh_;
  PhysParams params_;
  VelocityField velocity_;
  StepConfig cfg_;
  std::shared_ptr<const Manufactured> mms_;
  EllipticOperator op_;
  Field phiD_;
  std::unique_ptr<LinearSolver> solver_;
};

State advance_step(const State& state, const Mesh& mesh, const PhysParams& params,
                   const VelocityField& velocity, const StepConfig& cfg);

}  // namespace discharge
