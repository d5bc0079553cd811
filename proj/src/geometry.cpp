#include "chargelab/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chargelab/rng.hpp"

namespace chargelab {
namespace {

constexpr double kGeomTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;

void check_dimension(int dim) {
  if (dim < 1 || dim > kMaxDimension) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDimension) +
                                "], got " + std::to_string(dim));
  }
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(std::span<const int>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool contains_vector(const std::vector<Vec>& set, std::span<const double> v, double tol) {
  for (const auto& w : set) {
    double diff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) diff = std::max(diff, std::abs(w[i] - v[i]));
    if (diff <= tol) return true;
  }
  return false;
}

Vec negated(std::span<const double> v) {
  Vec out(v.begin(), v.end());
  for (auto& x : out) x = -x;
  return out;
}

double scale_of(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& p : pts)
    for (double x : p) s = std::max(s, std::abs(x));
  return std::max(s, 1.0);
}

// Vertices of ∩{(x,n_j) ≤ δ_j} by brute-force enumeration of d-subsets of facets.
std::vector<Vec> enumerate_vertices(int dim, const std::vector<Facet>& facets) {
  std::vector<Vec> out;
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd b(dim);
  for_each_combination(static_cast<int>(facets.size()), dim, [&](std::span<const int> idx) {
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) a(r, c) = facets[idx[r]].normal[c];
      b(r) = facets[idx[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < dim) return;
    Eigen::VectorXd x = lu.solve(b);
    Vec v(x.data(), x.data() + dim);
    for (const auto& f : facets) {
      if (dot(v, f.normal) > f.offset * (1.0 + kGeomTol) + kGeomTol) return;
    }
    if (!contains_vector(out, v, kGeomTol * scale_of({v}))) out.push_back(std::move(v));
  });
  return out;
}

// Facets of conv(vertices) for a body with θ in the interior: every facet plane
// satisfies (x, n) = 1 for some n, found from d-subsets of vertices.
std::vector<Facet> enumerate_facets(int dim, const std::vector<Vec>& vertices) {
  std::vector<Facet> out;
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);
  for_each_combination(static_cast<int>(vertices.size()), dim, [&](std::span<const int> idx) {
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) a(r, c) = vertices[idx[r]][c];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < dim) return;
    Eigen::VectorXd nvec = lu.solve(ones);
    Vec n(nvec.data(), nvec.data() + dim);
    for (const auto& v : vertices) {
      if (dot(v, n) > 1.0 + kGeomTol) return;
    }
    const double len = norm2(n);
    for (auto& x : n) x /= len;
    Facet f{std::move(n), 1.0 / len};
    for (const auto& g : out) {
      double diff = 0.0;
      for (int i = 0; i < dim; ++i) diff = std::max(diff, std::abs(g.normal[i] - f.normal[i]));
      if (diff <= kGeomTol) return;
    }
    out.push_back(std::move(f));
  });
  return out;
}

void check_symmetric_vertices(const std::vector<Vec>& vertices) {
  const double tol = kSymmetryTol * scale_of(vertices);
  for (const auto& v : vertices) {
    if (!contains_vector(vertices, negated(v), tol)) {
      throw std::invalid_argument("body is not centrally symmetric: a vertex has no opposite");
    }
  }
}

void check_symmetric_facets(const std::vector<Facet>& facets) {
  for (const auto& f : facets) {
    bool found = false;
    for (const auto& g : facets) {
      double diff = std::abs(g.offset - f.offset);
      for (std::size_t i = 0; i < f.normal.size(); ++i)
        diff = std::max(diff, std::abs(g.normal[i] + f.normal[i]));
      if (diff <= kSymmetryTol * std::max(1.0, f.offset)) {
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("body is not centrally symmetric: a facet has no opposite");
  }
}

// Vertex/facet consistency: every vertex lies on at least d facets.
void check_incidence(int dim, const std::vector<Vec>& vertices, const std::vector<Facet>& facets) {
  for (const auto& v : vertices) {
    int on = 0;
    for (const auto& f : facets) {
      const double s = dot(v, f.normal);
      if (s > f.offset * (1.0 + 1e-7) + 1e-7) {
        throw std::invalid_argument("vertex violates a facet inequality");
      }
      if (std::abs(s - f.offset) <= 1e-7 * std::max(1.0, f.offset)) ++on;
    }
    if (on < dim) throw std::invalid_argument("vertex lies on fewer than d facets");
  }
}

double bbox_volume(std::span<const double> lo, std::span<const double> hi) {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

// Axis-aligned bounding box of K∩C (orthant axes clipped to [0, w_i]).
void bounding_box(const ConvexBody& body, const Cone& cone, double scale, Vec& lo, Vec& hi) {
  const int d = body.dimension();
  const Vec w = body.bounding_half_widths();
  lo.assign(d, 0.0);
  hi.assign(d, 0.0);
  const int m = cone.orthant_m().value_or(0);
  for (int i = 0; i < d; ++i) {
    lo[i] = i < m ? 0.0 : -scale * w[i];
    hi[i] = scale * w[i];
  }
}

// Midpoint-rule integral of integrand(x) * weight(x) over a uniform grid.
template <class Fn>
double grid_integrate(std::span<const double> lo, std::span<const double> hi, int n, Fn&& fn) {
  const std::size_t d = lo.size();
  Vec dx(d), x(d);
  double cell = 1.0;
  double min_dx = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    dx[i] = (hi[i] - lo[i]) / n;
    cell *= dx[i];
    min_dx = std::min(min_dx, dx[i]);
  }
  const double tol = 1e-9 * min_dx;
  std::vector<int> idx(d, 0);
  for (std::size_t i = 0; i < d; ++i) x[i] = lo[i] + 0.5 * dx[i];
  double total = 0.0;
  while (true) {
    // innermost axis is the last one
    double line = 0.0;
    for (int j = 0; j < n; ++j) {
      x[d - 1] = lo[d - 1] + (j + 0.5) * dx[d - 1];
      line += fn(std::span<const double>(x), tol);
    }
    total += line;
    if (d == 1) break;
    std::size_t a = d - 1;
    while (a > 0) {
      --a;
      if (++idx[a] < n) {
        x[a] = lo[a] + (idx[a] + 0.5) * dx[a];
        break;
      }
      idx[a] = 0;
      x[a] = lo[a] + 0.5 * dx[a];
      if (a == 0) return total * cell;
    }
  }
  return total * cell;
}

template <class Fn>
Estimate monte_carlo_integrate(std::span<const double> lo, std::span<const double> hi,
                               std::uint64_t samples, std::uint64_t seed, Fn&& fn) {
  if (samples < 2) throw std::invalid_argument("monte-carlo needs at least 2 samples");
  const std::size_t d = lo.size();
  SplitMix64 rng(seed);
  Vec x(d);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
    const double v = fn(std::span<const double>(x), 0.0);
    sum += v;
    sum_sq += v * v;
  }
  const double vol = bbox_volume(lo, hi);
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
  return {vol * mean, vol * std::sqrt(var / static_cast<double>(samples - 1))};
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody ConvexBody::box(int dim) {
  check_dimension(dim);
  return box(Vec(dim, 1.0));
}

ConvexBody ConvexBody::box(std::span<const double> half_widths) {
  const int dim = static_cast<int>(half_widths.size());
  check_dimension(dim);
  std::vector<Facet> facets;
  for (int i = 0; i < dim; ++i) {
    if (!(half_widths[i] > 0.0) || !std::isfinite(half_widths[i])) {
      throw std::invalid_argument("box half widths must be positive and finite");
    }
    Vec n(dim, 0.0);
    n[i] = 1.0;
    facets.push_back({n, half_widths[i]});
    n[i] = -1.0;
    facets.push_back({n, half_widths[i]});
  }
  return from_facets(std::move(facets));
}

ConvexBody ConvexBody::cross_polytope(int dim) {
  check_dimension(dim);
  std::vector<Vec> vertices;
  for (int i = 0; i < dim; ++i) {
    Vec v(dim, 0.0);
    v[i] = 1.0;
    vertices.push_back(v);
    v[i] = -1.0;
    vertices.push_back(v);
  }
  return from_vertices(std::move(vertices));
}

ConvexBody ConvexBody::pball(int dim, double p) {
  check_dimension(dim);
  if (!(p >= 1.0)) throw std::invalid_argument("p-ball needs p in [1, inf]");
  ConvexBody k;
  k.dim_ = dim;
  k.kind_ = Kind::pball;
  k.p_ = p;
  return k;
}

ConvexBody ConvexBody::regular_polygon(int sides, double circumradius) {
  if (sides < 4 || sides % 2 != 0) {
    throw std::invalid_argument("a symmetric regular polygon needs an even number (>= 4) of sides");
  }
  std::vector<Vec> vertices;
  const double pi = std::acos(-1.0);
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * pi * k / sides;
    vertices.push_back({circumradius * std::cos(t), circumradius * std::sin(t)});
  }
  // Exact antipodes so the symmetry check does not depend on sin/cos rounding.
  for (int k = sides / 2; k < sides; ++k) vertices[k] = negated(vertices[k - sides / 2]);
  return from_vertices(std::move(vertices));
}

ConvexBody ConvexBody::from_vertices(std::vector<Vec> vertices) {
  if (vertices.empty()) throw std::invalid_argument("polytope needs vertices");
  const int dim = static_cast<int>(vertices.front().size());
  check_dimension(dim);
  if (dim > 4) throw std::invalid_argument("convex hull completion is limited to d <= 4");
  for (const auto& v : vertices) {
    if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("vertex dimension mismatch");
    for (double x : v)
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite vertex coordinate");
  }
  auto facets = enumerate_facets(dim, vertices);
  if (facets.size() < 2 * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("vertices do not span a full-dimensional body around the origin");
  }
  // keep only extreme points
  std::vector<Vec> extreme;
  for (auto& v : vertices) {
    int on = 0;
    for (const auto& f : facets)
      if (std::abs(dot(v, f.normal) - f.offset) <= kGeomTol * std::max(1.0, f.offset)) ++on;
    if (on >= dim && !contains_vector(extreme, v, kGeomTol)) extreme.push_back(std::move(v));
  }
  check_symmetric_vertices(extreme);
  ConvexBody k;
  k.dim_ = dim;
  k.kind_ = Kind::polytope;
  k.vertices_ = std::move(extreme);
  k.facets_ = std::move(facets);
  check_symmetric_facets(k.facets_);
  check_incidence(dim, k.vertices_, k.facets_);
  k.detect_axis_box();
  return k;
}

ConvexBody ConvexBody::from_facets(std::vector<Facet> facets) {
  if (facets.empty()) throw std::invalid_argument("polytope needs facets");
  const int dim = static_cast<int>(facets.front().normal.size());
  check_dimension(dim);
  if (dim > 4 && facets.size() != 2 * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("vertex enumeration is limited to d <= 4 (boxes excepted)");
  }
  for (auto& f : facets) {
    if (static_cast<int>(f.normal.size()) != dim) throw std::invalid_argument("facet dimension mismatch");
    if (!(f.offset > 0.0) || !std::isfinite(f.offset)) {
      throw std::invalid_argument("facet offsets must be positive: θ must be interior");
    }
    const double len = norm2(f.normal);
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("degenerate facet normal");
    for (auto& x : f.normal) x /= len;
    f.offset /= len;
  }
  check_symmetric_facets(facets);
  {
    Eigen::MatrixXd nm(static_cast<Eigen::Index>(facets.size()), dim);
    for (std::size_t r = 0; r < facets.size(); ++r)
      for (int c = 0; c < dim; ++c) nm(static_cast<Eigen::Index>(r), c) = facets[r].normal[c];
    if (Eigen::FullPivLU<Eigen::MatrixXd>(nm).rank() < dim) {
      throw std::invalid_argument("facet normals do not span R^d: body is unbounded");
    }
  }
  ConvexBody k;
  k.dim_ = dim;
  k.kind_ = Kind::polytope;
  k.vertices_ = enumerate_vertices(dim, facets);
  // drop redundant facets (those touching fewer than d vertices)
  std::vector<Facet> kept;
  for (auto& f : facets) {
    int on = 0;
    for (const auto& v : k.vertices_)
      if (std::abs(dot(v, f.normal) - f.offset) <= kGeomTol * std::max(1.0, f.offset)) ++on;
    if (on >= dim) kept.push_back(std::move(f));
  }
  k.facets_ = std::move(kept);
  check_symmetric_vertices(k.vertices_);
  check_incidence(dim, k.vertices_, k.facets_);
  k.detect_axis_box();
  return k;
}

void ConvexBody::detect_axis_box() {
  box_half_widths_.reset();
  if (kind_ != Kind::polytope || facets_.size() != 2 * static_cast<std::size_t>(dim_)) return;
  Vec w(dim_, -1.0);
  for (const auto& f : facets_) {
    int axis = -1;
    for (int i = 0; i < dim_; ++i) {
      if (std::abs(std::abs(f.normal[i]) - 1.0) <= kSymmetryTol) {
        axis = i;
      } else if (std::abs(f.normal[i]) > kSymmetryTol) {
        return;
      }
    }
    if (axis < 0) return;
    w[axis] = f.offset;
  }
  for (double x : w)
    if (x <= 0.0) return;
  box_half_widths_ = std::move(w);
}

void ConvexBody::check_point(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match body dimension " + std::to_string(dim_));
  }
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
}

double ConvexBody::gauge(std::span<const double> x) const {
  check_point(x);
  if (box_half_widths_) {
    double g = 0.0;
    for (int i = 0; i < dim_; ++i) g = std::max(g, std::abs(x[i]) / (*box_half_widths_)[i]);
    return g;
  }
  if (kind_ == Kind::pball) {
    if (std::isinf(p_)) {
      double g = 0.0;
      for (double v : x) g = std::max(g, std::abs(v));
      return g;
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), p_);
    return std::pow(s, 1.0 / p_);
  }
  double g = 0.0;
  for (const auto& f : facets_) g = std::max(g, dot(x, f.normal) / f.offset);
  return g;
}

double ConvexBody::polar_norm(std::span<const double> x) const {
  check_point(x);
  if (kind_ == Kind::pball) {
    if (p_ == 1.0) {
      double g = 0.0;
      for (double v : x) g = std::max(g, std::abs(v));
      return g;
    }
    if (std::isinf(p_)) {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return s;
    }
    const double q = p_ / (p_ - 1.0);
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), q);
    return std::pow(s, 1.0 / q);
  }
  if (box_half_widths_) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::abs(x[i]) * (*box_half_widths_)[i];
    return s;
  }
  double g = 0.0;
  for (const auto& v : vertices_) g = std::max(g, std::abs(dot(x, v)));
  return g;
}

void ConvexBody::gauge_gradient(std::span<const double> x, std::span<double> out) const {
  check_point(x);
  std::fill(out.begin(), out.end(), 0.0);
  if (kind_ == Kind::polytope) {
    std::size_t best = 0;
    double g = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < facets_.size(); ++j) {
      const double s = dot(x, facets_[j].normal) / facets_[j].offset;
      if (s > g) {
        g = s;
        best = j;
      }
    }
    for (int i = 0; i < dim_; ++i) out[i] = facets_[best].normal[i] / facets_[best].offset;
    return;
  }
  if (std::isinf(p_)) {
    int best = 0;
    for (int i = 1; i < dim_; ++i)
      if (std::abs(x[i]) > std::abs(x[best])) best = i;
    out[best] = x[best] >= 0.0 ? 1.0 : -1.0;
    return;
  }
  const double g = gauge(x);
  if (g == 0.0) return;
  for (int i = 0; i < dim_; ++i) {
    const double s = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    out[i] = p_ == 1.0 ? s : s * std::pow(std::abs(x[i]) / g, p_ - 1.0);
  }
}

Vec ConvexBody::bounding_half_widths() const {
  Vec w(dim_);
  Vec e(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    e[i] = 1.0;
    w[i] = polar_norm(e);
    e[i] = 0.0;
  }
  return w;
}

double ConvexBody::quadrature_weight(std::span<const double> x, double scale, double tol) const {
  if (box_half_widths_) {
    double w = 1.0;
    for (int i = 0; i < dim_; ++i) {
      w *= edge_weight(scale * (*box_half_widths_)[i] - std::abs(x[i]), tol);
      if (w == 0.0) return 0.0;
    }
    return w;
  }
  if (kind_ == Kind::pball) {
    return edge_weight(scale - gauge(x), tol);
  }
  double w = 1.0;
  for (const auto& f : facets_) {
    w *= edge_weight(scale * f.offset - dot(x, f.normal), tol);
    if (w == 0.0) return 0.0;
  }
  return w;
}

std::string ConvexBody::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::pball) {
    os << "pball(d=" << dim_ << ", p=" << p_ << ")";
  } else if (box_half_widths_) {
    os << "box(d=" << dim_ << ")";
  } else {
    os << "polytope(d=" << dim_ << ", vertices=" << vertices_.size()
       << ", facets=" << facets_.size() << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Cone

Cone Cone::orthant(int dim, int m) {
  check_dimension(dim);
  if (m < 0 || m > dim) throw std::invalid_argument("orthant cone needs 0 <= m <= d");
  Cone c;
  c.dim_ = dim;
  c.orthant_m_ = m;
  for (int i = 0; i < m; ++i) {
    Vec n(dim, 0.0);
    n[i] = 1.0;
    c.normals_.push_back(std::move(n));
  }
  return c;
}

Cone Cone::halfspaces(int dim, std::vector<Vec> normals) {
  check_dimension(dim);
  for (auto& n : normals) {
    if (static_cast<int>(n.size()) != dim) throw std::invalid_argument("cone normal dimension mismatch");
    const double len = norm2(n);
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("degenerate cone normal");
    for (auto& x : n) x /= len;
  }
  Cone c;
  c.dim_ = dim;
  c.normals_ = std::move(normals);
  return c;
}

bool Cone::contains(std::span<const double> x) const {
  if (orthant_m_) {
    for (int i = 0; i < *orthant_m_; ++i)
      if (!(x[i] > 0.0)) return false;
    return true;
  }
  for (const auto& n : normals_)
    if (!(dot(x, n) > 0.0)) return false;
  return true;
}

bool Cone::contains_closure(std::span<const double> x, double tol) const {
  for (const auto& n : normals_)
    if (dot(x, n) < -tol) return false;
  return true;
}

double Cone::quadrature_weight(std::span<const double> x, double tol) const {
  double w = 1.0;
  if (orthant_m_) {
    for (int i = 0; i < *orthant_m_; ++i) {
      w *= edge_weight(x[i], tol);
      if (w == 0.0) return 0.0;
    }
    return w;
  }
  for (const auto& n : normals_) {
    w *= edge_weight(dot(x, n), tol);
    if (w == 0.0) return 0.0;
  }
  return w;
}

std::string Cone::describe() const {
  std::ostringstream os;
  if (orthant_m_) {
    os << "orthant(d=" << dim_ << ", m=" << *orthant_m_ << ")";
  } else {
    os << "halfspaces(d=" << dim_ << ", k=" << normals_.size() << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Volumes

bool has_exact_volume(const ConvexBody& body, const Cone& cone) {
  return body.is_axis_box() && cone.orthant_m().has_value();
}

Estimate volume_body_cone(const ConvexBody& body, const Cone& cone, const VolumeMethod& method) {
  if (body.dimension() != cone.dimension()) {
    throw std::invalid_argument("body and cone dimensions differ");
  }
  const int d = body.dimension();
  Estimate est;
  switch (method.kind) {
    case VolumeMethod::Kind::exact: {
      if (!has_exact_volume(body, cone)) {
        throw std::invalid_argument("exact volume is only available for (box, orthant) pairs");
      }
      const int m = *cone.orthant_m();
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= (i < m ? 1.0 : 2.0) * (*body.axis_box_half_widths())[i];
      est.value = v;
      break;
    }
    case VolumeMethod::Kind::grid: {
      if (method.n < 2) throw std::invalid_argument("grid volume needs n >= 2");
      Vec lo, hi;
      bounding_box(body, cone, 1.0, lo, hi);
      est.value = grid_integrate(lo, hi, method.n, [&](std::span<const double> x, double tol) {
        const double w = cone.quadrature_weight(x, tol);
        return w == 0.0 ? 0.0 : w * body.quadrature_weight(x, 1.0, tol);
      });
      break;
    }
    case VolumeMethod::Kind::monte_carlo: {
      Vec lo, hi;
      bounding_box(body, cone, 1.0, lo, hi);
      est = monte_carlo_integrate(lo, hi, method.samples, method.seed,
                                  [&](std::span<const double> x, double) {
                                    return cone.contains(x) && body.gauge(x) < 1.0 ? 1.0 : 0.0;
                                  });
      break;
    }
  }
  if (!(est.value > 0.0)) throw std::domain_error("K∩C has zero volume (degenerate cone?)");
  return est;
}

double volume_body_cone(const ConvexBody& body, const Cone& cone) {
  if (has_exact_volume(body, cone)) return volume_body_cone(body, cone, VolumeMethod::exact()).value;
  const int n = body.dimension() <= 2 ? 2048 : (body.dimension() == 3 ? 192 : 24);
  return volume_body_cone(body, cone, VolumeMethod::grid(n)).value;
}

Estimate layer_cake_integral(const ConvexBody& body, const Cone& cone, double h,
                             const VolumeMethod& method) {
  if (body.dimension() != cone.dimension()) {
    throw std::invalid_argument("body and cone dimensions differ");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  Vec lo, hi;
  bounding_box(body, cone, h, lo, hi);
  switch (method.kind) {
    case VolumeMethod::Kind::exact: {
      // the closed form is the only exact route
      return {layer_cake_closed_form(body.dimension(), h,
                                     volume_body_cone(body, cone, VolumeMethod::exact()).value),
              0.0};
    }
    case VolumeMethod::Kind::grid: {
      if (method.n < 2) throw std::invalid_argument("grid integral needs n >= 2");
      const double value = grid_integrate(lo, hi, method.n, [&](std::span<const double> x, double tol) {
        const double w = cone.quadrature_weight(x, tol);
        if (w == 0.0) return 0.0;
        const double wb = body.quadrature_weight(x, h, tol);
        return wb == 0.0 ? 0.0 : w * wb * body.gauge(x);
      });
      return {value, 0.0};
    }
    case VolumeMethod::Kind::monte_carlo:
      return monte_carlo_integrate(lo, hi, method.samples, method.seed,
                                   [&](std::span<const double> x, double) {
                                     if (!cone.contains(x)) return 0.0;
                                     const double g = body.gauge(x);
                                     return g < h ? g : 0.0;
                                   });
  }
  return {};
}

double layer_cake_closed_form(int dim, double h, double volume) {
  if (h <= 0.0) return 0.0;
  return dim * std::pow(h, dim + 1) / (dim + 1) * volume;
}

}  // namespace chargelab
