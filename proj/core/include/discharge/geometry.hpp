/// @file geometry.hpp
/// @brief Gap domain, boundary partition and the terrain-following mesh.
///
/// The domain is Omega = {|x| <= r, 0 <= y <= w(x)}. A logical grid
/// (xi, eta) in [-r, r] x [0, 1] is mapped to (xi, eta * w(xi)). The bottom
/// row is electrode B (phi = 0), the top row electrode A (phi = V), and the
/// two vertical sides |x| = r form the homogeneous Neumann boundary C.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace discharge {

using Field = std::vector<double>;

struct Rectangle {
  double h = 1.0;
};

/// Regularized touch-down gap w(x) = g0 + c |x|^exponent.
struct TouchDown {
  double g0 = 0.1;
  double c = 1.0;
  double exponent = 4.0 / 3.0;
};

using Profile = std::variant<Rectangle, TouchDown>;

struct DomainSpec {
  double r = 1.0;
  Profile profile = Rectangle{};
  int nx = 16;
  int ny = 16;

  /// Throws ValidationError if any invariant is violated.
  void validate() const;
  bool is_rectangle() const { return std::holds_alternative<Rectangle>(profile); }
};

/// Gap width w(x). Throws for |x| > r.
double gap_profile(double x, const DomainSpec& spec);
/// Derivative w'(x); zero at x = 0 for the touch-down profile.
double gap_slope(double x, const DomainSpec& spec);

enum class BoundaryTag : std::uint8_t { Interior, ElectrodeA, ElectrodeB, SideC };

/// Pairwise coupling of the mapped Laplacian: the discrete Dirichlet energy is
/// sum(weight * (u[a] - u[b])^2). Diagonal links carry the metric cross term
/// (one per skewed cell); all weights are >= 0 unless a cell is skewed more
/// than its aspect ratio allows, see Mesh::min_link_weight().
struct Link {
  std::size_t a;
  std::size_t b;
  double weight;
  bool diagonal;
};

/// Dual-mesh face between two axis neighbours. The face runs from `lo` to
/// `hi` (physical coordinates); its right-hand normal points from a to b.
struct DualFace {
  std::size_t a;
  std::size_t b;
  double lo_x, lo_y;
  double hi_x, hi_y;
};

class Mesh {
 public:
  explicit Mesh(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  std::size_t num_nodes() const { return x_.size(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec_.nx + 1) +
           static_cast<std::size_t>(i);
  }
  int i_of(std::size_t k) const { return static_cast<int>(k % (spec_.nx + 1)); }
  int j_of(std::size_t k) const { return static_cast<int>(k / (spec_.nx + 1)); }

  double dxi() const { return dxi_; }
  double deta() const { return deta_; }
  double xi(int i) const { return -spec_.r + i * dxi_; }
  double eta(int j) const { return j * deta_; }

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  double x(std::size_t k) const { return x_[k]; }
  double y(std::size_t k) const { return y_[k]; }

  /// Metric terms at column i: w(xi_i), w'(xi_i); dy/dxi at node k is
  /// eta * w'(xi).
  double width(int i) const { return width_[static_cast<std::size_t>(i)]; }
  double width_slope(int i) const { return slope_[static_cast<std::size_t>(i)]; }
  double dy_dxi(std::size_t k) const { return eta(j_of(k)) * width_slope(i_of(k)); }

  BoundaryTag tag(std::size_t k) const { return tag_[k]; }
  bool is_dirichlet(std::size_t k) const {
    return tag_[k] == BoundaryTag::ElectrodeA || tag_[k] == BoundaryTag::ElectrodeB;
  }

  /// Area of quadrilateral cell (i, j), 0 <= i < nx, 0 <= j < ny.
  double cell_area(int i, int j) const;
  /// Mass-lumped control-volume area of each node (quarter of adjacent cells
  /// in logical space, times the mean Jacobian w over the dual interval).
  std::span<const double> node_weights() const { return weight_; }
  double total_area() const;

  std::span<const Link> links() const { return links_; }
  double min_link_weight() const;
  std::span<const DualFace> faces() const { return faces_; }

 private:
  DomainSpec spec_;
  double dxi_ = 0.0;
  double deta_ = 0.0;
  std::vector<double> x_, y_, width_, slope_, weight_;
  std::vector<BoundaryTag> tag_;
  std::vector<Link> links_;
  std::vector<DualFace> faces_;
};

Mesh build_mesh(const DomainSpec& spec);

}  // namespace discharge
