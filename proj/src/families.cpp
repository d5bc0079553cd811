#include "chargelab/families.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chargelab/optimize.hpp"
#include "chargelab/rng.hpp"

namespace chargelab {
namespace {

void check_center(const GridSpec& grid, const Vec& center) {
  if (static_cast<int>(center.size()) != grid.dimension()) {
    throw std::invalid_argument("center dimension does not match the grid");
  }
}

double sq_dist(std::span<const double> x, const Vec& c) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
  return r2;
}

double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct Bump {
  Vec center;
  double radius;
  double amplitude;

  double value(std::span<const double> x) const {
    const double s = 1.0 - sq_dist(x, center) / (radius * radius);
    return s > 0.0 ? amplitude * s * s * s : 0.0;
  }
  void add_gradient(std::span<const double> x, std::span<double> out) const {
    const double s = 1.0 - sq_dist(x, center) / (radius * radius);
    if (s <= 0.0) return;
    const double k = amplitude * 3.0 * s * s * (-2.0 / (radius * radius));
    for (std::size_t i = 0; i < center.size(); ++i) out[i] += k * (x[i] - center[i]);
  }
};

// (h - |x - c|_∞)_+ and its gradient
double cube_tent(std::span<const double> x, const Vec& c, double h) {
  double g = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) g = std::max(g, std::abs(x[i] - c[i]));
  return std::max(0.0, h - g);
}

void cube_tent_gradient(std::span<const double> x, const Vec& c, double h, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double g = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = std::abs(x[i] - c[i]);
    if (v > g) {
      g = v;
      k = i;
    }
  }
  if (g > 0.0 && g < h) out[k] = -sign_of(x[k] - c[k]);
}

}  // namespace

GridField gaussian_density(const GridSpec& grid, Vec center, double width, double amplitude) {
  check_center(grid, center);
  if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  auto value = [center, width, amplitude](std::span<const double> x) {
    return amplitude * std::exp(-sq_dist(x, center) / (width * width));
  };
  auto gradient = [center, width, amplitude](std::span<const double> x, std::span<double> out) {
    const double v = amplitude * std::exp(-sq_dist(x, center) / (width * width));
    for (std::size_t i = 0; i < center.size(); ++i) out[i] = -2.0 * (x[i] - center[i]) / (width * width) * v;
  };
  return GridField::sample(grid, value, gradient);
}

GridField poly_bump_density(const GridSpec& grid, Vec center, double radius, double amplitude) {
  check_center(grid, center);
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  const Bump b{std::move(center), radius, amplitude};
  return GridField::sample(
      grid, [b](std::span<const double> x) { return b.value(x); },
      [b](std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        b.add_gradient(x, out);
      });
}

GridField sin_density(const GridSpec& grid) {
  constexpr double pi = std::numbers::pi;
  auto inside = [](std::span<const double> x) {
    for (double v : x)
      if (v < 0.0 || v > 2.0) return false;
    return true;
  };
  auto value = [inside](std::span<const double> x) {
    if (!inside(x)) return 0.0;
    double p = 1.0;
    for (double v : x) p *= std::sin(pi * v);
    return p;
  };
  auto gradient = [inside](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (!inside(x)) return;
    for (std::size_t j = 0; j < x.size(); ++j) {
      double p = pi * std::cos(pi * x[j]);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (i != j) p *= std::sin(pi * x[i]);
      out[j] = p;
    }
  };
  return GridField::sample(grid, value, gradient);
}

GridField random_smooth_density(const GridSpec& grid, std::uint64_t seed, int bumps) {
  if (bumps < 1) throw std::invalid_argument("need at least one bump");
  const int d = grid.dimension();
  SplitMix64 rng(seed);
  double extent = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) extent = std::min(extent, grid.hi(i) - grid.lo(i));
  std::vector<Bump> parts;
  for (int k = 0; k < bumps; ++k) {
    Bump b;
    b.radius = rng.uniform(0.15, 0.35) * extent;
    b.amplitude = rng.uniform(0.25, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    b.center.resize(d);
    for (int i = 0; i < d; ++i) {
      const double margin = b.radius + 2.0 * grid.spacing(i);
      b.center[i] = rng.uniform(grid.lo(i) + margin, std::max(grid.lo(i) + margin, grid.hi(i) - margin));
    }
    parts.push_back(std::move(b));
  }
  auto value = [parts](std::span<const double> x) {
    double v = 0.0;
    for (const auto& b : parts) v += b.value(x);
    return v;
  };
  auto gradient = [parts](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& b : parts) b.add_gradient(x, out);
  };
  return GridField::sample(grid, value, gradient);
}

GridField filtered_noise_density(const GridSpec& grid, std::uint64_t seed, double support_radius, int radius,
                                 int passes) {
  if (!(support_radius > 0.0)) throw std::invalid_argument("support radius must be positive");
  if (radius < 0 || passes < 0) throw std::invalid_argument("filter parameters must be nonnegative");
  const int d = grid.dimension();
  SplitMix64 rng(seed);
  std::vector<double> v(grid.size());
  for (auto& x : v) x = rng.normal();

  std::vector<long> idx(d);
  std::vector<double> tmp(v.size());
  for (int pass = 0; pass < passes; ++pass) {
    for (int axis = 0; axis < d; ++axis) {
      const long n = grid.cells(axis);
      const long s = static_cast<long>(grid.stride(axis));
      for (std::size_t flat = 0; flat < v.size(); ++flat) {
        grid.unflatten(flat, idx);
        double acc = 0.0;
        for (long o = -radius; o <= radius; ++o) {
          const long j = idx[axis] + o;
          if (j >= 0 && j < n) acc += v[static_cast<std::size_t>(static_cast<long>(flat) + o * s)];
        }
        tmp[flat] = acc / static_cast<double>(2 * radius + 1);
      }
      v.swap(tmp);
    }
  }
  const Bump window{Vec(d, 0.0), support_radius, 1.0};
  Vec x(d);
  double peak = 0.0;
  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    grid.center(flat, x);
    v[flat] *= window.value(x);
    peak = std::max(peak, std::abs(v[flat]));
  }
  if (peak > 0.0)
    for (auto& e : v) e /= peak;
  return GridField(grid, std::move(v));
}

GridField load_density_csv(const GridSpec& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density file " + path);
  std::vector<double> v(grid.size(), 0.0);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    long long index;
    double value;
    if (!(row >> index >> value)) {
      if (line_no == 1) continue;  // header
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 'index,value'");
    }
    if (index < 0 || static_cast<std::size_t>(index) >= v.size()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": cell index out of range");
    }
    v[static_cast<std::size_t>(index)] = value;
  }
  return GridField(grid, std::move(v));
}

// ---------------------------------------------------------------------------

double cube_gauge_mass(std::span<const double> b, double h) {
  const std::size_t d = b.size();
  Vec s(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (b[i] <= 0.0) return 0.0;
    s[i] = std::min(b[i], h);
  }
  std::sort(s.begin(), s.end());
  // On [s_(k), s_(k+1)] the integrand is s_(1)…s_(k)·t^{d-k}.
  double prefix = 1.0;
  double prev = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k <= d; ++k) {
    const double next = k < d ? s[k] : h;
    const double p = static_cast<double>(d - k) + 1.0;
    total += prefix * (std::pow(next, p) - std::pow(prev, p)) / p;
    if (k < d) prefix *= s[k];
    prev = next;
  }
  return total;
}

double cube_antiderivative(std::span<const double> x, double h) {
  double sign = 1.0;
  Vec b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sign *= sign_of(x[i]);
    b[i] = std::abs(x[i]);
  }
  return sign == 0.0 ? 0.0 : sign * cube_gauge_mass(b, h);
}

double split_point(double h, int d) {
  if (!(h > 0.0) || d < 1) throw std::invalid_argument("split point needs h > 0 and d >= 1");
  Vec b(static_cast<std::size_t>(d), h);
  const double whole = cube_gauge_mass(b, h);
  auto imbalance = [&](double a) {
    b[0] = a;
    const double below = cube_gauge_mass(b, h);
    return below - (whole - below);
  };
  return bisect(imbalance, 0.0, h, 0.0, 1e-15 * h, 200);
}

MixedFunction extremal_mixed_m0(double h, int d) {
  if (!(h > 0.0) || d < 1 || d > kMaxDimension) throw std::invalid_argument("bad extremal parameters");
  const Vec c(static_cast<std::size_t>(d), 0.0);
  MixedFunction f;
  f.name = "extremal-m0";
  f.d = d;
  f.value = [h](std::span<const double> x) { return cube_antiderivative(x, h); };
  f.mixed = [c, h](std::span<const double> x) { return cube_tent(x, c, h); };
  f.mixed_gradient = [c, h](std::span<const double> x, std::span<double> out) { cube_tent_gradient(x, c, h, out); };
  return f;
}

MixedFunction extremal_mixed_m1(double h, int d) {
  if (!(h > 0.0) || d < 1 || d > kMaxDimension) throw std::invalid_argument("bad extremal parameters");
  const double a = split_point(h, d);
  const Vec c(static_cast<std::size_t>(d), 0.0);
  MixedFunction f;
  f.name = "extremal-m1";
  f.d = d;
  f.value = [h, a](std::span<const double> x) {
    Vec y(x.begin(), x.end());
    y[0] = a;
    return cube_antiderivative(x, h) - cube_antiderivative(y, h);
  };
  f.mixed = [c, h](std::span<const double> x) { return x[0] >= 0.0 ? cube_tent(x, c, h) : 0.0; };
  f.mixed_gradient = [c, h](std::span<const double> x, std::span<double> out) {
    if (x[0] >= 0.0) {
      cube_tent_gradient(x, c, h, out);
    } else {
      std::fill(out.begin(), out.end(), 0.0);
    }
  };
  return f;
}

MixedFunction shifted_cube_family(double h, Vec c, Vec a) {
  const std::size_t d = c.size();
  if (!(h > 0.0) || d < 1 || a.size() != d) throw std::invalid_argument("bad shifted family parameters");
  MixedFunction f;
  f.name = "shifted-cube";
  f.d = static_cast<int>(d);
  f.value = [h, c, a](std::span<const double> x) {
    // oriented product of ∫_{a_i}^{x_i}, expanded over the corners
    const std::size_t d = c.size();
    Vec z(d);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      double sign = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const bool upper = (mask >> i) & 1u;
        z[i] = (upper ? x[i] : a[i]) - c[i];
        if (!upper) sign = -sign;
      }
      total += sign * cube_antiderivative(z, h);
    }
    return total;
  };
  f.mixed = [c, h](std::span<const double> x) { return cube_tent(x, c, h); };
  f.mixed_gradient = [c, h](std::span<const double> x, std::span<double> out) { cube_tent_gradient(x, c, h, out); };
  return f;
}

MixedFunction random_trig_polynomial(int d, std::uint64_t seed, int terms, int max_freq) {
  if (d < 1 || d > kMaxDimension || terms < 1 || max_freq < 1) {
    throw std::invalid_argument("bad trigonometric polynomial parameters");
  }
  constexpr double pi = std::numbers::pi;
  struct Term {
    double coef;
    Vec omega, phase;
  };
  SplitMix64 rng(seed);
  std::vector<Term> t(static_cast<std::size_t>(terms));
  for (auto& term : t) {
    term.coef = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < d; ++i) {
      term.omega.push_back(pi * static_cast<double>(1 + static_cast<int>(rng.uniform() * max_freq)));
      term.phase.push_back(rng.uniform(0.0, 2.0 * pi));
    }
  }
  MixedFunction f;
  f.name = "trig";
  f.d = d;
  f.value = [t](std::span<const double> x) {
    double total = 0.0;
    for (const auto& term : t) {
      double p = term.coef;
      for (std::size_t i = 0; i < x.size(); ++i) p *= std::sin(term.omega[i] * x[i] + term.phase[i]);
      total += p;
    }
    return total;
  };
  f.mixed = [t](std::span<const double> x) {
    double total = 0.0;
    for (const auto& term : t) {
      double p = term.coef;
      for (std::size_t i = 0; i < x.size(); ++i) p *= term.omega[i] * std::cos(term.omega[i] * x[i] + term.phase[i]);
      total += p;
    }
    return total;
  };
  f.mixed_gradient = [t](std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& term : t) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        double p = term.coef;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double arg = term.omega[i] * x[i] + term.phase[i];
          p *= i == j ? -term.omega[i] * term.omega[i] * std::sin(arg) : term.omega[i] * std::cos(arg);
        }
        out[j] += p;
      }
    }
  };
  return f;
}

MixedFunction gaussian_product(Vec center, double width, double amplitude) {
  if (center.empty() || !(width > 0.0)) throw std::invalid_argument("bad gaussian product parameters");
  const double w2 = width * width;
  MixedFunction f;
  f.name = "gaussian-product";
  f.d = static_cast<int>(center.size());
  f.value = [center, w2, amplitude](std::span<const double> x) {
    return amplitude * std::exp(-sq_dist(x, center) / w2);
  };
  f.mixed = [center, w2, amplitude](std::span<const double> x) {
    double p = amplitude * std::exp(-sq_dist(x, center) / w2);
    for (std::size_t i = 0; i < center.size(); ++i) p *= -2.0 * (x[i] - center[i]) / w2;
    return p;
  };
  f.mixed_gradient = [center, w2, amplitude](std::span<const double> x, std::span<double> out) {
    const double e = amplitude * std::exp(-sq_dist(x, center) / w2);
    for (std::size_t j = 0; j < center.size(); ++j) {
      double p = e;
      for (std::size_t i = 0; i < center.size(); ++i) {
        const double q = -2.0 * (x[i] - center[i]) / w2;
        p *= i == j ? q * q - 2.0 / w2 : q;
      }
      out[j] = p;
    }
  };
  return f;
}

MixedFunction coordinate_product(int d) {
  if (d < 1 || d > kMaxDimension) throw std::invalid_argument("bad dimension");
  MixedFunction f;
  f.name = "coordinate-product";
  f.d = d;
  f.value = [](std::span<const double> x) {
    double p = 1.0;
    for (double v : x) p *= v;
    return p;
  };
  f.mixed = [](std::span<const double>) { return 1.0; };
  f.mixed_gradient = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  return f;
}

GridField sample_value(const MixedFunction& f, const GridSpec& grid) {
  if (grid.dimension() != f.d) throw std::invalid_argument("grid dimension does not match the function");
  return GridField::sample(grid, f.value);
}

GridField sample_mixed(const MixedFunction& f, const GridSpec& grid) {
  if (grid.dimension() != f.d) throw std::invalid_argument("grid dimension does not match the function");
  return GridField::sample(grid, f.mixed, f.mixed_gradient);
}

}  // namespace chargelab
