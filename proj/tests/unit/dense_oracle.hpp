// Brute-force reference for one implicit step on the 3x3-node unit
// rectangle (r = 1, h = 1). Assembled from first principles with dense
// matrices; shares no assembly code with the library.
#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace oracle {

constexpr int kN = 3;
constexpr int kNodes = kN * kN;
constexpr double kDx = 1.0;
constexpr double kDy = 0.5;

struct Params {
  double eps0, eps_p, eps_n, mu_p, mu_n, alpha1, alpha2, eta0, V, theta_p, theta_n;
  double v0;       // stream amplitude, kx = ky = 1
  double dt;
  bool aux;        // truncated sources instead of the original ones
  double M;
};

using Vec = Eigen::Matrix<double, kNodes, 1>;
using Mat = Eigen::Matrix<double, kNodes, kNodes>;

inline int node(int i, int j) { return j * kN + i; }
inline double xpos(int i) { return -1.0 + i * kDx; }
inline double ypos(int j) { return j * kDy; }
inline bool electrode(int k) { return k / kN == 0 || k / kN == kN - 1; }

inline double volume(int k) {
  const int i = k % kN, j = k / kN;
  const double fx = (i == 0 || i == kN - 1) ? 0.5 : 1.0;
  const double fy = (j == 0 || j == kN - 1) ? 0.5 : 1.0;
  return fx * kDx * fy * kDy;
}

inline double psi(const Params& p, double x, double y) {
  using std::numbers::pi;
  return p.v0 * std::sin(pi * (x + 1.0) / 2.0) * std::sin(pi * y);
}

struct Edge {
  int a, b;
  double w;   // diffusive coupling (dual length / spacing)
  double q;   // volumetric flux a -> b through the dual face
};

inline std::array<Edge, 12> edges(const Params& p) {
  std::array<Edge, 12> out{};
  int e = 0;
  for (int j = 0; j < kN; ++j) {
    const double gj = (j == 0 || j == kN - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < kN; ++i) {
      const double xf = xpos(i) + 0.5 * kDx;
      const double lo = std::max(ypos(j) - 0.5 * kDy, 0.0);
      const double hi = std::min(ypos(j) + 0.5 * kDy, 1.0);
      out[e++] = {node(i, j), node(i + 1, j), gj * kDy / kDx, psi(p, xf, hi) - psi(p, xf, lo)};
    }
  }
  for (int j = 0; j + 1 < kN; ++j) {
    for (int i = 0; i < kN; ++i) {
      const double gi = (i == 0 || i == kN - 1) ? 0.5 : 1.0;
      const double yf = ypos(j) + 0.5 * kDy;
      const double left = std::max(xpos(i) - 0.5 * kDx, -1.0);
      const double right = std::min(xpos(i) + 0.5 * kDx, 1.0);
      out[e++] = {node(i, j), node(i, j + 1), gi * kDx / kDy,
                  psi(p, left, yf) - psi(p, right, yf)};
    }
  }
  return out;
}

inline double bern(double x) { return x == 0.0 ? 1.0 : x / std::expm1(x); }

// Dense Poisson with phi = 0 on the bottom row and V on the top row.
inline Vec poisson(const Params& p, const Vec& pp, const Vec& nn) {
  Mat A = Mat::Zero();
  Vec b = Vec::Zero();
  for (int k = 0; k < kNodes; ++k) {
    if (electrode(k)) {
      A(k, k) = 1.0;
      b[k] = (k / kN == kN - 1) ? p.V : 0.0;
    } else {
      b[k] = volume(k) * (pp[k] - nn[k]) / p.eps0;
    }
  }
  for (const Edge& e : edges(p)) {
    for (auto [r, o] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      if (electrode(r)) continue;
      A(r, r) += e.w;
      A(r, o) -= e.w;
    }
  }
  return A.fullPivLu().solve(b);
}

// |grad phi| with central differences inside, 3-point one-sided at the ends.
inline Vec field_magnitude(const Vec& phi) {
  auto d = [](double u0, double u1, double u2, int pos, double h) {
    if (pos == 0) return (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h);
    if (pos == 2) return (u0 - 4.0 * u1 + 3.0 * u2) / (2.0 * h);
    return (u2 - u0) / (2.0 * h);
  };
  Vec E;
  for (int j = 0; j < kN; ++j) {
    for (int i = 0; i < kN; ++i) {
      const double gx = d(phi[node(0, j)], phi[node(1, j)], phi[node(2, j)], i, kDx);
      const double gy = d(phi[node(i, 0)], phi[node(i, 1)], phi[node(i, 2)], j, kDy);
      E[node(i, j)] = std::hypot(gx, gy);
    }
  }
  return E;
}

// Particle flux a -> b of one species for the given potential.
inline std::pair<double, double> flux_coeffs(const Params& p, const Edge& e, const Vec& phi,
                                             bool positive) {
  const double eps = positive ? p.eps_p : p.eps_n;
  const double mu = positive ? p.mu_p : p.mu_n;
  const double d = (positive ? mu : -mu) * (phi[e.a] - phi[e.b]);
  return {e.w * eps * bern(-d / eps), e.w * eps * bern(d / eps)};
}

struct StepResult {
  Vec p, n, phi_used, phi_next;
};

inline StepResult step(const Params& prm, const Vec& p0, const Vec& n0) {
  StepResult out;
  out.phi_used = poisson(prm, p0, n0);
  const Vec E = field_magnitude(out.phi_used);

  Vec rate_p = Vec::Zero(), rate_n = Vec::Zero(), coef_p = Vec::Zero(), coef_n = Vec::Zero();
  for (int k = 0; k < kNodes; ++k) {
    if (!(E[k] > 0.0)) continue;
    const double growth = prm.mu_n * E[k] * prm.alpha1 * std::exp(-prm.alpha2 / E[k]) * n0[k];
    const double sink = prm.mu_n * E[k] * prm.eta0;
    if (!prm.aux) {
      rate_p[k] = growth - sink * n0[k];
      rate_n[k] = growth;
      coef_n[k] = -sink;
    } else {
      rate_p[k] = growth;
      rate_n[k] = growth;
      const double fp = std::min(prm.M, -prm.M * n0[k] / (1.0 + prm.M * p0[k]));
      const double fn = std::min(prm.M, -prm.M * p0[k] / (1.0 + prm.M * p0[k]));
      if (fp <= 0.0) coef_p[k] = sink * fp; else rate_p[k] += sink * fp * p0[k];
      if (fn <= 0.0) coef_n[k] = sink * fn; else rate_n[k] += sink * fn * n0[k];
    }
  }

  auto solve = [&](const Vec& u0, const Vec& rate, const Vec& coef, bool positive) {
    Mat A = Mat::Zero();
    Vec b = Vec::Zero();
    for (int k = 0; k < kNodes; ++k) {
      if (electrode(k)) {
        A(k, k) = 1.0;
        b[k] = positive ? prm.theta_p : prm.theta_n;
        continue;
      }
      const double m = volume(k);
      A(k, k) = m / prm.dt - m * coef[k];
      b[k] = m * (u0[k] / prm.dt + rate[k]);
    }
    for (const Edge& e : edges(prm)) {
      auto [ca, cb] = flux_coeffs(prm, e, out.phi_used, positive);
      ca += std::max(e.q, 0.0);
      cb += std::max(-e.q, 0.0);
      if (!electrode(e.a)) {
        A(e.a, e.a) += ca;
        A(e.a, e.b) -= cb;
      }
      if (!electrode(e.b)) {
        A(e.b, e.a) -= ca;
        A(e.b, e.b) += cb;
      }
    }
    return Vec(A.fullPivLu().solve(b));
  };
  out.p = solve(p0, rate_p, coef_p, true);
  out.n = solve(n0, rate_n, coef_n, false);
  out.phi_next = poisson(prm, out.p, out.n);
  return out;
}

// |dQ/dt + outflow of (j+ - j-) particle fluxes across the electrode edges|,
// fluxes evaluated with the potential `phi` and the new densities.
inline double charge_residual(const Params& prm, const Vec& p0, const Vec& n0, const Vec& p1,
                              const Vec& n1, const Vec& phi) {
  double q0 = 0.0, q1 = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    q0 += volume(k) * (p0[k] - n0[k]);
    q1 += volume(k) * (p1[k] - n1[k]);
  }
  double outflow = 0.0;
  for (const Edge& e : edges(prm)) {
    if (electrode(e.a) == electrode(e.b)) continue;
    const auto [pa, pb] = flux_coeffs(prm, e, phi, true);
    const auto [na, nb] = flux_coeffs(prm, e, phi, false);
    const double up = std::max(e.q, 0.0), dn = std::max(-e.q, 0.0);
    const double jp = (pa + up) * p1[e.a] - (pb + dn) * p1[e.b];
    const double jn = (na + up) * n1[e.a] - (nb + dn) * n1[e.b];
    // Outflow of the interior set: positive when leaving an interior node.
    outflow += electrode(e.b) ? (jp - jn) : -(jp - jn);
  }
  return std::abs((q1 - q0) / prm.dt + outflow);
}

}  // namespace oracle
