#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace zlab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Periodic box [0,L)^d sampled with n points per axis, n a power of two.
// Wavenumbers per axis are (2*pi/L)*k with integer k in [-n/2, n/2).
struct Grid {
  int d = 1;
  int n = 4;
  double L = 2.0 * kPi;

  Grid() = default;
  Grid(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    if (d < 1 || d > 4) throw std::invalid_argument("Grid: d must be in 1..4");
    if (n < 4 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Grid: n must be a power of two >= 4");
    if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be positive");
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) {
      if (total > (std::size_t{1} << 28) / static_cast<std::size_t>(n))
        throw std::invalid_argument("Grid: n^d exceeds memory budget");
      total *= static_cast<std::size_t>(n);
    }
  }

  bool operator==(const Grid& o) const {
    return d == o.d && n == o.n && L == o.L;
  }

  std::size_t size() const {
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
    return total;
  }

  double dx() const { return L / n; }
  double dk() const { return 2.0 * kPi / L; }

  // Signed frequency integer for storage index i on one axis.
  int freq_int(int i) const { return i < n / 2 ? i : i - n; }
  double xi_axis(int i) const { return dk() * freq_int(i); }

  // Largest |xi| representable on the grid (corner of the frequency box).
  double xi_max() const { return dk() * (n / 2) * std::sqrt(double(d)); }
  // Largest |xi| along a single axis.
  double xi_max_axis() const { return dk() * (n / 2); }

  // Decode flat row-major index into per-axis indices (axis 0 slowest).
  std::array<int, 4> unravel(std::size_t idx) const {
    std::array<int, 4> ix{0, 0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      ix[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
      idx /= static_cast<std::size_t>(n);
    }
    return ix;
  }

  std::size_t ravel(const std::array<int, 4>& ix) const {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a)
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(ix[a]);
    return idx;
  }

  std::array<double, 4> xi(std::size_t idx) const {
    auto ix = unravel(idx);
    std::array<double, 4> out{0, 0, 0, 0};
    for (int a = 0; a < d; ++a) out[a] = xi_axis(ix[a]);
    return out;
  }

  double xi_abs2(std::size_t idx) const {
    auto v = xi(idx);
    double s = 0;
    for (int a = 0; a < d; ++a) s += v[a] * v[a];
    return s;
  }

  std::array<double, 4> coord(std::size_t idx) const {
    auto ix = unravel(idx);
    std::array<double, 4> out{0, 0, 0, 0};
    for (int a = 0; a < d; ++a) out[a] = dx() * ix[a];
    return out;
  }
};

}  // namespace zlab
