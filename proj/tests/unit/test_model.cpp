#include "doctest.h"

#include <cmath>
#include <numbers>

#include "discharge/error.hpp"
#include "discharge/model.hpp"

using namespace discharge;
using std::numbers::pi;

namespace {

DomainSpec rect(double r, double h, int nx, int ny) {
  DomainSpec s;
  s.r = r;
  s.profile = Rectangle{h};
  s.nx = nx;
  s.ny = ny;
  return s;
}

DomainSpec touchdown(int nx, int ny) {
  DomainSpec s;
  s.profile = TouchDown{0.1, 1.0, 4.0 / 3.0};
  s.nx = nx;
  s.ny = ny;
  return s;
}

VelocitySpec stream(double v0, int kx = 1, int ky = 1) {
  VelocitySpec v;
  v.kind = VelocitySpec::Kind::StreamFunction;
  v.v0 = v0;
  v.kx = kx;
  v.ky = ky;
  return v;
}

}  // namespace

TEST_CASE("parameter validation names the offending key") {
  PhysParams p;
  CHECK_NOTHROW(p.validate());
  p.eta0 = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), "params.eta0 must be > 0", ValidationError);
  p = PhysParams{};
  p.R_a = 2.0;
  p.R_b = 3.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.theta_p = p.theta_n = 2.5;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("flat initial data when the bump amplitude is zero") {
  const Mesh m(touchdown(8, 4));
  PhysParams params;
  params.theta_p = 0.7;
  params.theta_n = 0.3;
  params.eps0 = 2.0;
  const State s = init_state(m, params, Bump{0.0, {}});
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    CHECK(s.p[k] == 0.7);
    CHECK(s.n[k] == 0.3);
  }
}

TEST_CASE("the bump peaks at the domain centre") {
  const Mesh m(rect(1.0, 1.0, 4, 4));
  PhysParams params;
  const State s = init_state(m, params, Bump{0.5, {}});
  // sin^2(pi/2) cos^2(0) = 1
  CHECK(s.p[m.index(2, 2)] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(s.n[m.index(2, 2)] == doctest::Approx(1.5).epsilon(1e-15));
  // The electrodes keep the boundary densities.
  CHECK(s.p[m.index(2, 0)] == 1.0);
  CHECK(s.p[m.index(2, 4)] == 1.0);
  // Equal bumps carry no charge, so phi is the linear lift.
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    CHECK(s.phi[k] == doctest::Approx(m.y(k)).epsilon(1e-9));
  }
}

TEST_CASE("negative initial densities are rejected") {
  const Mesh m(rect(1.0, 1.0, 4, 4));
  PhysParams params;
  CHECK_THROWS_AS(init_state(m, params, Bump{-2.0, {}}), ValidationError);
}

TEST_CASE("custom bump shapes are honoured") {
  const Mesh m(rect(1.0, 1.0, 4, 4));
  PhysParams params;
  Bump b{0.25, [](double, double eta) { return eta; }};
  const State s = init_state(m, params, b);
  CHECK(s.p[m.index(1, 1)] == doctest::Approx(1.0 + 0.25 * 0.25));
}

TEST_CASE("zero velocity is divergence free") {
  const Mesh m(touchdown(8, 4));
  const VelocityField v = build_velocity(m, VelocitySpec{});
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    CHECK(v.vx[k] == 0.0);
    CHECK(v.vy[k] == 0.0);
  }
  for (double d : discrete_divergence(m, v)) CHECK(d == 0.0);
}

TEST_CASE("stream-function velocity is discretely divergence free") {
  for (const DomainSpec& s : {rect(0.5, 1.0, 8, 8), touchdown(16, 8)}) {
    const Mesh m(s);
    const VelocityField v = build_velocity(m, stream(1.0, 2, 1));
    double worst = 0.0;
    for (double d : discrete_divergence(m, v)) worst = std::max(worst, std::abs(d));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("stream-function velocity matches the analytic curl on the unit square") {
  // r = 1/2, h = 1: psi = sin(pi (x + 1/2)) sin(pi y).
  const DomainSpec s = rect(0.5, 1.0, 8, 8);
  const VelocitySpec vs = stream(1.0);
  for (double x : {-0.3, 0.0, 0.2}) {
    for (double y : {0.1, 0.5, 0.8}) {
      const auto [vx, vy] = velocity_at(s, vs, x, y);
      CHECK(vx == doctest::Approx(pi * std::sin(pi * (x + 0.5)) * std::cos(pi * y)));
      CHECK(vy == doctest::Approx(-pi * std::cos(pi * (x + 0.5)) * std::sin(pi * y)));
    }
  }
}

TEST_CASE("velocity is tangential on the touch-down boundary") {
  const DomainSpec s = touchdown(16, 8);
  const Mesh m(s);
  const VelocitySpec vs = stream(0.8, 1, 2);
  const VelocityField v = build_velocity(m, vs);
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    const int i = m.i_of(k), j = m.j_of(k);
    if (j == 0) CHECK(std::abs(v.vy[k]) <= 1e-12);
    if (i == 0 || i == m.nx()) CHECK(std::abs(v.vx[k]) <= 1e-12);
    if (j == m.ny() && i > 0 && i < m.nx()) {
      // Normal to y = w(x) is (-w', 1).
      const double w1 = m.width_slope(i);
      CHECK(std::abs(-w1 * v.vx[k] + v.vy[k]) <= 1e-12);
    }
  }
}

TEST_CASE("stream function vanishes on the boundary") {
  const DomainSpec s = touchdown(8, 4);
  const VelocitySpec vs = stream(1.3, 3, 2);
  for (double x : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
    CHECK(std::abs(stream_function(s, vs, x, 0.0)) <= 1e-15);
    CHECK(std::abs(stream_function(s, vs, x, gap_profile(x, s))) <= 1e-14);
  }
  CHECK(std::abs(stream_function(s, vs, -1.0, 0.5)) <= 1e-15);
  CHECK(std::abs(stream_function(s, vs, 1.0, 0.5)) <= 1e-14);
}

TEST_CASE("dirichlet potential and harmonic lift") {
  const Mesh m(rect(1.0, 2.0, 6, 6));
  PhysParams params;
  params.V = 3.0;
  const Field phiD = dirichlet_potential(m, params);
  const Field lift = harmonic_lift(m, params, 1e-13);
  for (std::size_t k = 0; k < m.num_nodes(); ++k) {
    if (m.tag(k) == BoundaryTag::ElectrodeA) CHECK(phiD[k] == 3.0);
    if (m.tag(k) == BoundaryTag::ElectrodeB) CHECK(phiD[k] == 0.0);
    CHECK(lift[k] == doctest::Approx(3.0 * m.y(k) / 2.0).epsilon(1e-11));
  }
}
