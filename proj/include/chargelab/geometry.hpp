#pragma once

// Symmetric convex bodies, convex cones, and the quantities built from them:
// gauges |x|_K, polar norms |x|_{K°}, volumes of K∩C and the integral of the
// gauge over hK∩C.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chargelab {

using Vec = std::vector<double>;

inline constexpr int kMaxDimension = 6;

double dot(std::span<const double> a, std::span<const double> b);

struct Facet {
  Vec normal;     // unit outward normal
  double offset;  // distance from the origin to the facet plane, > 0
};

// Quadrature weight attached to a point with respect to one constraint of a set:
// 1 strictly inside, 1/2 on the boundary (within tol), 0 outside. Boundaries have
// measure zero, so this only redistributes mass between cells whose centers sit
// exactly on a window edge.
inline double edge_weight(double slack, double tol) {
  if (slack > tol) return 1.0;
  if (slack >= -tol) return 0.5;
  return 0.0;
}

class ConvexBody {
 public:
  enum class Kind { polytope, pball };

  // (-1,1)^d
  static ConvexBody box(int dim);
  // axis-aligned box with the given half widths
  static ConvexBody box(std::span<const double> half_widths);
  // conv{±e_i}
  static ConvexBody cross_polytope(int dim);
  static ConvexBody pball(int dim, double p);
  // Regular polygon with `sides` (even) vertices on the circle of radius `circumradius`.
  static ConvexBody regular_polygon(int sides, double circumradius = 1.0);
  // Completes the facet list by convex hull. Points that are not extreme are dropped.
  static ConvexBody from_vertices(std::vector<Vec> vertices);
  // Completes the vertex list by vertex enumeration.
  static ConvexBody from_facets(std::vector<Facet> facets);

  int dimension() const { return dim_; }
  Kind kind() const { return kind_; }
  bool is_polytope() const { return kind_ == Kind::polytope; }
  double p() const { return p_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }

  // Set when every facet normal is ±e_i; the half width along each axis.
  const std::optional<Vec>& axis_box_half_widths() const { return box_half_widths_; }
  bool is_axis_box() const { return box_half_widths_.has_value(); }

  double gauge(std::span<const double> x) const;
  double polar_norm(std::span<const double> x) const;

  // Gradient of the gauge at x (x != θ). For polytopes this is n/δ of the facet
  // attaining the maximum (the first one on ties).
  void gauge_gradient(std::span<const double> x, std::span<double> out) const;

  // sup_{y in K} |y_i| for each axis; K ⊂ Π[-w_i, w_i].
  Vec bounding_half_widths() const;

  // Product of edge weights of x against the constraints of the scaled body sK.
  // tol is in coordinate units.
  double quadrature_weight(std::span<const double> x, double scale, double tol) const;

  std::string describe() const;

 private:
  ConvexBody() = default;
  void check_point(std::span<const double> x) const;
  void detect_axis_box();

  int dim_ = 0;
  Kind kind_ = Kind::polytope;
  double p_ = 2.0;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  std::optional<Vec> box_half_widths_;
};

class Cone {
 public:
  // R^m_+ x R^{d-m}
  static Cone orthant(int dim, int m);
  // ∩ {x : (x, a_i) > 0}; normals are normalized on construction.
  static Cone halfspaces(int dim, std::vector<Vec> normals);

  int dimension() const { return dim_; }
  // m for orthant products, nullopt otherwise.
  std::optional<int> orthant_m() const { return orthant_m_; }
  const std::vector<Vec>& normals() const { return normals_; }

  bool contains(std::span<const double> x) const;
  // Closure membership, with tolerance.
  bool contains_closure(std::span<const double> x, double tol = 0.0) const;
  double quadrature_weight(std::span<const double> x, double tol) const;

  std::string describe() const;

 private:
  Cone() = default;
  int dim_ = 0;
  std::optional<int> orthant_m_;
  std::vector<Vec> normals_;
};

struct VolumeMethod {
  enum class Kind { exact, grid, monte_carlo };
  Kind kind = Kind::exact;
  int n = 256;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static VolumeMethod exact() { return {}; }
  static VolumeMethod grid(int n) { return {Kind::grid, n, 0, 0}; }
  static VolumeMethod monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::monte_carlo, 0, samples, seed};
  }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // Monte-Carlo only
};

// True when the exact method is available for the pair.
bool has_exact_volume(const ConvexBody& body, const Cone& cone);

// μ(K∩C). The scaling μ(hK∩C) = h^d μ(K∩C) is applied analytically by callers.
Estimate volume_body_cone(const ConvexBody& body, const Cone& cone, const VolumeMethod& method);

// Exact when available, otherwise a fine grid estimate.
double volume_body_cone(const ConvexBody& body, const Cone& cone);

// ∫_{hK∩C} |u|_K dμ(u), numerically.
Estimate layer_cake_integral(const ConvexBody& body, const Cone& cone, double h,
                             const VolumeMethod& method);

// d h^{d+1}/(d+1) μ(K∩C)
double layer_cake_closed_form(int dim, double h, double volume);

}  // namespace chargelab
