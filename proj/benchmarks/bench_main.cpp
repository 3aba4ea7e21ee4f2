#include <benchmark/benchmark.h>

#include "discharge/galerkin.hpp"
#include "discharge/model.hpp"
#include "discharge/poisson.hpp"
#include "discharge/transport.hpp"

using namespace discharge;

namespace {

DomainSpec touchdown(int nx, int ny) {
  DomainSpec s;
  s.profile = TouchDown{0.5, 0.5, 4.0 / 3.0};
  s.nx = nx;
  s.ny = ny;
  return s;
}

PhysParams desk_params() {
  PhysParams p;
  p.eps_plus = p.eps_minus = 0.2;
  p.V = 2.0;
  p.alpha1 = 2.0;
  p.theta_p = p.theta_n = 0.01;
  return p;
}

void BM_PoissonSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Mesh m(touchdown(2 * n, n));
  const EllipticOperator op(m);
  const PhysParams prm = desk_params();
  const Field rho(m.num_nodes(), 1.0);
  const Field phiD = dirichlet_potential(m, prm);
  for (auto _ : st) benchmark::DoNotOptimize(solve_poisson(op, rho, phiD).phi.data());
}
BENCHMARK(BM_PoissonSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AdvanceStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Mesh m(touchdown(2 * n, n));
  const PhysParams prm = desk_params();
  VelocitySpec vs;
  vs.kind = VelocitySpec::Kind::StreamFunction;
  vs.v0 = 0.5;
  const VelocityField v = build_velocity(m, vs);
  StepConfig cfg;
  Stepper stepper(m, prm, v, cfg);
  State s = init_state(m, prm, Bump{0.5, {}});
  for (auto _ : st) {
    State next = stepper.advance(s);
    benchmark::DoNotOptimize(next.p.data());
  }
}
BENCHMARK(BM_AdvanceStep)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GalerkinRhs(benchmark::State& st) {
  const int K = static_cast<int>(st.range(0));
  DomainSpec rect;
  rect.profile = Rectangle{1.0};
  const SpectralBasis basis(rect, K, K);
  const PhysParams prm = desk_params();
  VelocitySpec vs;
  vs.kind = VelocitySpec::Kind::StreamFunction;
  vs.v0 = 0.5;
  CoeffState c{0.0, std::vector<double>(basis.size(), 0.01), std::vector<double>(basis.size(), 0.02)};
  for (auto _ : st) {
    CoeffRate r = galerkin_rhs(c, basis, prm, vs, StepConfig{});
    benchmark::DoNotOptimize(r.da.data());
  }
}
BENCHMARK(BM_GalerkinRhs)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
