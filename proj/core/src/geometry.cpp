#include "discharge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "discharge/error.hpp"

namespace discharge {

namespace {

struct WidthVisitor {
  double x;
  double operator()(const Rectangle& p) const { return p.h; }
  double operator()(const TouchDown& p) const {
    return p.g0 + p.c * std::pow(std::abs(x), p.exponent);
  }
};

struct SlopeVisitor {
  double x;
  double operator()(const Rectangle&) const { return 0.0; }
  double operator()(const TouchDown& p) const {
    if (x == 0.0) return 0.0;
    const double s = x > 0.0 ? 1.0 : -1.0;
    return s * p.c * p.exponent * std::pow(std::abs(x), p.exponent - 1.0);
  }
};

void check_abscissa(double x, const DomainSpec& spec) {
  if (!(std::abs(x) <= spec.r * (1.0 + 1e-12))) {
    throw ValidationError("gap_profile: |x| = " + std::to_string(std::abs(x)) +
                          " exceeds half-width r = " + std::to_string(spec.r));
  }
}

/// Mean of w over [a, b], exact for both profiles.
double width_average(double a, double b, const DomainSpec& spec) {
  if (const auto* rect = std::get_if<Rectangle>(&spec.profile)) return rect->h;
  const auto& td = std::get<TouchDown>(spec.profile);
  const double e1 = td.exponent + 1.0;
  auto F = [e1](double x) { return (x < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(x), e1) / e1; };
  return td.g0 + td.c * (F(b) - F(a)) / (b - a);
}

/// Mean of (1 + (eta w')^2) / w over [a, b]. Gauss-Legendre on each side of
/// x = 0, where w' is only Hoelder continuous.
double k_etaeta_average(double a, double b, double eta, const DomainSpec& spec) {
  static constexpr double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
  static constexpr double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
  auto integrate = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
      for (double sign : {-1.0, 1.0}) {
        const double x = mid + sign * half * gx[q];
        const double ws = eta * gap_slope(x, spec);
        s += gw[q] * (1.0 + ws * ws) / gap_profile(x, spec);
      }
    }
    return s * half;
  };
  const double total = (a < 0.0 && b > 0.0) ? integrate(a, 0.0) + integrate(0.0, b)
                                            : integrate(a, b);
  return total / (b - a);
}

}  // namespace

void DomainSpec::validate() const {
  if (!(r > 0.0)) throw ValidationError("domain.r must be > 0");
  if (nx < 2) throw ValidationError("domain.nx must be >= 2");
  if (ny < 2) throw ValidationError("domain.ny must be >= 2");
  if (const auto* rect = std::get_if<Rectangle>(&profile)) {
    if (!(rect->h > 0.0)) throw ValidationError("domain.h must be > 0");
  } else {
    const auto& td = std::get<TouchDown>(profile);
    if (!(td.g0 > 0.0)) throw ValidationError("domain.g0 must be > 0");
    if (!(td.c >= 0.0)) throw ValidationError("domain.c must be >= 0");
    // w'(0) must stay finite for the mapped metric terms.
    if (!(td.exponent >= 1.0)) throw ValidationError("domain.exponent must be >= 1");
  }
}

double gap_profile(double x, const DomainSpec& spec) {
  check_abscissa(x, spec);
  return std::visit(WidthVisitor{x}, spec.profile);
}

double gap_slope(double x, const DomainSpec& spec) {
  check_abscissa(x, spec);
  return std::visit(SlopeVisitor{x}, spec.profile);
}

Mesh::Mesh(const DomainSpec& spec) : spec_(spec) {
  spec_.validate();
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  dxi_ = 2.0 * spec_.r / nx;
  deta_ = 1.0 / ny;

  width_.resize(static_cast<std::size_t>(nx + 1));
  slope_.resize(static_cast<std::size_t>(nx + 1));
  for (int i = 0; i <= nx; ++i) {
    // Pin the end columns exactly at +-r.
    const double xi_i = (i == nx) ? spec_.r : xi(i);
    width_[static_cast<std::size_t>(i)] = gap_profile(xi_i, spec_);
    slope_[static_cast<std::size_t>(i)] = gap_slope(xi_i, spec_);
  }

  const std::size_t n = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
  x_.resize(n);
  y_.resize(n);
  tag_.resize(n);
  weight_.resize(n);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const std::size_t k = index(i, j);
      x_[k] = (i == nx) ? spec_.r : xi(i);
      y_[k] = eta(j) * width(i);
      if (j == 0) {
        tag_[k] = BoundaryTag::ElectrodeB;
      } else if (j == ny) {
        tag_[k] = BoundaryTag::ElectrodeA;
      } else if (i == 0 || i == nx) {
        tag_[k] = BoundaryTag::SideC;
      } else {
        tag_[k] = BoundaryTag::Interior;
      }
      const double gj = (j == 0 || j == ny) ? 0.5 : 1.0;
      const double lo = std::max(xi(i) - 0.5 * dxi_, -spec_.r);
      const double hi = std::min(xi(i) + 0.5 * dxi_, spec_.r);
      weight_[k] = gj * deta_ * (hi - lo) * width_average(lo, hi, spec_);
    }
  }

  // Axis links: K_xixi = w averaged over the edge, K_etaeta = (1 + (eta w')^2) / w
  // averaged over the dual interval. Point samples lose second order when
  // w'' is singular (touch-down exponent < 2).
  for (int j = 0; j <= ny; ++j) {
    const double gj = (j == 0 || j == ny) ? 0.5 : 1.0;
    for (int i = 0; i < nx; ++i) {
      const double w_avg = width_average(xi(i), xi(i) + dxi_, spec_);
      links_.push_back({index(i, j), index(i + 1, j), deta_ * gj * w_avg / dxi_, false});
    }
  }
  for (int j = 0; j < ny; ++j) {
    const double eta_mid = eta(j) + 0.5 * deta_;
    for (int i = 0; i <= nx; ++i) {
      const double lo = std::max(xi(i) - 0.5 * dxi_, -spec_.r);
      const double hi = std::min(xi(i) + 0.5 * dxi_, spec_.r);
      const double k_ee = k_etaeta_average(lo, hi, eta_mid, spec_);
      links_.push_back({index(i, j), index(i, j + 1), (hi - lo) * k_ee / deta_, false});
    }
  }
  // Cross term 2 K_xieta u_xi u_eta with K_xieta = -eta w' (cell mean, exact
  // from the corner widths). With a = u_xi dxi, b = u_eta deta the cell
  // contributes 2 k a b = |k| ((a +- b)^2 - a^2 - b^2): one diagonal of
  // weight |k| along the sign of k, and |k| / 2 taken off each cell edge.
  // Every weight stays >= 0 while the cell skew is moderate, which keeps the
  // transport matrices M-matrices.
  const std::size_t xi_links = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny + 1);
  auto xi_link = [nx](int i, int j) { return static_cast<std::size_t>(j * nx + i); };
  auto eta_link = [nx, xi_links](int i, int j) {
    return xi_links + static_cast<std::size_t>(j * (nx + 1) + i);
  };
  for (int j = 0; j < ny; ++j) {
    const double eta_mid = eta(j) + 0.5 * deta_;
    for (int i = 0; i < nx; ++i) {
      const double x1 = (i + 1 == nx) ? spec_.r : xi(i + 1);
      const double k_xe = -eta_mid * (gap_profile(x1, spec_) - gap_profile(xi(i), spec_)) / dxi_;
      if (k_xe == 0.0) continue;
      const double half = 0.5 * std::abs(k_xe);
      links_[xi_link(i, j)].weight -= half;
      links_[xi_link(i, j + 1)].weight -= half;
      links_[eta_link(i, j)].weight -= half;
      links_[eta_link(i + 1, j)].weight -= half;
      if (k_xe > 0.0) {
        links_.push_back({index(i, j), index(i + 1, j + 1), std::abs(k_xe), true});
      } else {
        links_.push_back({index(i + 1, j), index(i, j + 1), std::abs(k_xe), true});
      }
    }
  }

  // Dual faces for advective fluxes.
  auto phys = [this](double xi_v, double eta_v) {
    return std::pair{xi_v, eta_v * gap_profile(xi_v, spec_)};
  };
  for (int j = 0; j <= ny; ++j) {
    const double lo_eta = std::max(eta(j) - 0.5 * deta_, 0.0);
    const double hi_eta = std::min(eta(j) + 0.5 * deta_, 1.0);
    for (int i = 0; i < nx; ++i) {
      const double xf = xi(i) + 0.5 * dxi_;
      const auto [lx, ly] = phys(xf, lo_eta);
      const auto [hx, hy] = phys(xf, hi_eta);
      faces_.push_back({index(i, j), index(i + 1, j), lx, ly, hx, hy});
    }
  }
  for (int j = 0; j < ny; ++j) {
    const double ef = eta(j) + 0.5 * deta_;
    for (int i = 0; i <= nx; ++i) {
      const double left = std::max(xi(i) - 0.5 * dxi_, -spec_.r);
      const double right = std::min(xi(i) + 0.5 * dxi_, spec_.r);
      const auto [rx, ry] = phys(right, ef);
      const auto [lx, ly] = phys(left, ef);
      faces_.push_back({index(i, j), index(i, j + 1), rx, ry, lx, ly});
    }
  }
}

double Mesh::cell_area(int i, int j) const {
  const std::size_t k00 = index(i, j), k10 = index(i + 1, j);
  const std::size_t k11 = index(i + 1, j + 1), k01 = index(i, j + 1);
  const double xs[4] = {x_[k00], x_[k10], x_[k11], x_[k01]};
  const double ys[4] = {y_[k00], y_[k10], y_[k11], y_[k01]};
  double twice = 0.0;
  for (int q = 0; q < 4; ++q) {
    const int r = (q + 1) % 4;
    twice += xs[q] * ys[r] - xs[r] * ys[q];
  }
  return 0.5 * twice;
}

double Mesh::total_area() const {
  return std::accumulate(weight_.begin(), weight_.end(), 0.0);
}

double Mesh::min_link_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Link& l : links_) m = std::min(m, l.weight);
  return m;
}

Mesh build_mesh(const DomainSpec& spec) { return Mesh(spec); }

}  // namespace discharge
