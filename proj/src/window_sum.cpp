#include "chargelab/window_sum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chargelab {
namespace {

constexpr double kIndexSnap = 1e-9;

void add_term(AxisTerms& t, long index, double coef) {
  for (int i = 0; i < t.count; ++i) {
    if (t.terms[i].index == index) {
      t.terms[i].coef += coef;
      return;
    }
  }
  t.terms[t.count++] = {index, coef};
}

}  // namespace

AxisTerms axis_terms(const GridSpec& grid, int axis, double lo, double hi) {
  AxisTerms out;
  const long n = grid.cells(axis);
  const double dx = grid.spacing(axis);
  const double tol = kIndexSnap * dx;
  out.clipped = lo < grid.lo(axis) - tol || hi > grid.hi(axis) + tol;
  if (!(hi - lo > tol)) return out;

  // center j sits at index coordinate t = j
  const double t_lo = (lo - grid.lo(axis)) / dx - 0.5;
  const double t_hi = (hi - grid.lo(axis)) / dx - 0.5;
  long first_full, end_full;
  long half_lo = -1, half_hi = -1;
  const double r_lo = std::round(t_lo);
  if (std::abs(t_lo - r_lo) <= kIndexSnap) {
    half_lo = static_cast<long>(r_lo);
    first_full = half_lo + 1;
  } else {
    first_full = static_cast<long>(std::ceil(t_lo));
  }
  const double r_hi = std::round(t_hi);
  if (std::abs(t_hi - r_hi) <= kIndexSnap) {
    half_hi = static_cast<long>(r_hi);
    end_full = half_hi;
  } else {
    end_full = static_cast<long>(std::floor(t_hi)) + 1;
  }
  first_full = std::clamp(first_full, 0L, n);
  end_full = std::clamp(end_full, 0L, n);
  if (end_full > first_full) {
    add_term(out, end_full, 1.0);
    add_term(out, first_full, -1.0);
  }
  for (long j : {half_lo, half_hi}) {
    if (j >= 0 && j < n) {
      add_term(out, j + 1, 0.5);
      add_term(out, j, -0.5);
    }
  }
  // drop cancelled terms
  int k = 0;
  for (int i = 0; i < out.count; ++i)
    if (out.terms[i].coef != 0.0) out.terms[k++] = out.terms[i];
  out.count = k;
  return out;
}

PrefixSumTable::PrefixSumTable(const GridSpec& grid, std::span<const double> values)
    : dim_(grid.dimension()), strides_(grid.dimension()) {
  if (values.size() != grid.size()) throw std::invalid_argument("prefix table: size mismatch");
  std::size_t total = 1;
  for (int i = dim_; i-- > 0;) {
    strides_[i] = total;
    total *= static_cast<std::size_t>(grid.cells(i) + 1);
  }
  table_.assign(total, 0.0);
  // scatter samples to position k = j + 1
  std::vector<long> idx(dim_, 0);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t pos = 0;
    for (int i = 0; i < dim_; ++i) pos += static_cast<std::size_t>(idx[i] + 1) * strides_[i];
    table_[pos] = values[flat];
    for (int a = dim_ - 1; a >= 0; --a) {
      if (++idx[a] < grid.cells(a)) break;
      idx[a] = 0;
    }
  }
  // cumulative sums along each axis
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = strides_[a];
    const std::size_t len = static_cast<std::size_t>(grid.cells(a) + 1);
    for (std::size_t pos = 0; pos < total; ++pos) {
      const std::size_t k = (pos / s) % len;
      if (k > 0) table_[pos] += table_[pos - s];
    }
  }
}

double PrefixSumTable::at(std::span<const long> k) const {
  std::size_t pos = 0;
  for (int i = 0; i < dim_; ++i) pos += static_cast<std::size_t>(k[i]) * strides_[i];
  return table_[pos];
}

double PrefixSumTable::weighted_sum(std::span<const AxisTerms> axes) const {
  for (const auto& a : axes)
    if (a.count == 0) return 0.0;
  std::array<int, kMaxDimension> c{};
  double total = 0.0;
  while (true) {
    std::size_t pos = 0;
    double coef = 1.0;
    for (int i = 0; i < dim_; ++i) {
      const auto& t = axes[i].terms[c[i]];
      pos += static_cast<std::size_t>(t.index) * strides_[i];
      coef *= t.coef;
    }
    total += coef * table_[pos];
    int a = dim_ - 1;
    while (a >= 0 && ++c[a] == axes[a].count) c[a--] = 0;
    if (a < 0) break;
  }
  return total;
}

double PrefixSumTable::box_sum(std::span<const long> first, std::span<const long> last) const {
  std::vector<AxisTerms> axes(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (last[i] <= first[i]) return 0.0;
    axes[i].terms[0] = {last[i], 1.0};
    axes[i].terms[1] = {first[i], -1.0};
    axes[i].count = 2;
  }
  return weighted_sum(axes);
}

std::vector<double> separable_window_sums(const GridSpec& grid, std::span<const double> values,
                                          const std::vector<std::vector<AxisTerms>>& terms_per_axis) {
  const int d = grid.dimension();
  std::vector<double> work(values.begin(), values.end());
  std::vector<double> prefix;
  for (int a = 0; a < d; ++a) {
    const std::size_t n = static_cast<std::size_t>(grid.cells(a));
    const std::size_t s = grid.stride(a);
    const auto& terms = terms_per_axis[a];
    prefix.assign(n + 1, 0.0);
    // a line along axis a starts at every flat index whose axis-a coordinate is 0
    const std::size_t block = s * n;
    for (std::size_t outer = 0; outer < work.size(); outer += block) {
      for (std::size_t inner = 0; inner < s; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + work[base + j * s];
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (const auto& t : terms[j].view()) acc += t.coef * prefix[static_cast<std::size_t>(t.index)];
          work[base + j * s] = acc;
        }
      }
    }
  }
  return work;
}

}  // namespace chargelab
