#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlab/fft.hpp"
#include "zlab/grid.hpp"
#include "zlab/rng.hpp"

namespace zlab {

enum class Rep : std::uint32_t { physical = 0, spectral = 1 };

// Complex scalar function on a periodic grid, carried in physical samples
// or spectral coefficients (f = sum_k c_k e^{i xi_k x}).
struct Field {
  Grid grid;
  std::vector<cplx> data;
  Rep rep = Rep::physical;

  Field() = default;
  Field(const Grid& g, Rep r) : grid(g), data(g.size(), cplx{0.0, 0.0}), rep(r) {}

  bool finite() const {
    for (const auto& z : data)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }
};

inline void check_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("fields on different grids");
  if (a.rep != b.rep) throw std::invalid_argument("fields in different representations");
}

inline Field fft_forward(const Field& f) {
  if (f.rep != Rep::physical) throw std::invalid_argument("fft_forward: field not physical");
  if (!f.finite()) throw std::invalid_argument("fft_forward: non-finite data");
  Field out = f;
  FftNd fft(f.grid);
  fft.forward(out.data);
  out.rep = Rep::spectral;
  return out;
}

inline Field fft_inverse(const Field& f) {
  if (f.rep != Rep::spectral) throw std::invalid_argument("fft_inverse: field not spectral");
  if (!f.finite()) throw std::invalid_argument("fft_inverse: non-finite data");
  Field out = f;
  FftNd fft(f.grid);
  fft.inverse(out.data);
  out.rep = Rep::physical;
  return out;
}

inline Field to_rep(const Field& f, Rep r) {
  if (f.rep == r) return f;
  return r == Rep::spectral ? fft_forward(f) : fft_inverse(f);
}

// Pointwise Fourier multiplier; m receives (xi vector, |xi|^2).
template <typename M>
Field apply_multiplier(const Field& f, M&& m) {
  Field out = to_rep(f, Rep::spectral);
  const std::size_t total = out.grid.size();
  for (std::size_t i = 0; i < total; ++i)
    out.data[i] *= m(out.grid.xi(i), out.grid.xi_abs2(i));
  if (f.rep == Rep::physical) out = fft_inverse(out);
  return out;
}

inline Field laplacian(const Field& f) {
  return apply_multiplier(f, [](const std::array<double, 4>&, double xi2) {
    return cplx{-xi2, 0.0};
  });
}

inline Field gradient_component(const Field& f, int axis) {
  return apply_multiplier(f, [axis](const std::array<double, 4>& xi, double) {
    return cplx{0.0, xi[axis]};
  });
}

// |nabla|^s; the zero mode is annihilated for s > 0 and passed through at s = 0.
inline Field abs_grad_pow(const Field& f, double s) {
  return apply_multiplier(f, [s](const std::array<double, 4>&, double xi2) {
    if (s == 0.0) return cplx{1.0, 0.0};
    if (xi2 == 0.0) return cplx{0.0, 0.0};
    return cplx{std::pow(xi2, 0.5 * s), 0.0};
  });
}

// <nabla>^s = (1+|xi|^2)^{s/2}.
inline Field bessel_pow(const Field& f, double s) {
  return apply_multiplier(f, [s](const std::array<double, 4>&, double xi2) {
    return cplx{std::pow(1.0 + xi2, 0.5 * s), 0.0};
  });
}

// e^{it Delta}: spectral factor e^{-it|xi|^2}.
inline Field schrodinger_propagate(const Field& f, double t) {
  return apply_multiplier(f, [t](const std::array<double, 4>&, double xi2) {
    return std::polar(1.0, -t * xi2);
  });
}

// e^{it|nabla|}: spectral factor e^{it|xi|}.
inline Field wave_propagate(const Field& f, double t) {
  return apply_multiplier(f, [t](const std::array<double, 4>&, double xi2) {
    return std::polar(1.0, t * std::sqrt(xi2));
  });
}

// --- arithmetic -----------------------------------------------------------

inline Field& operator+=(Field& a, const Field& b) {
  check_same_grid(a, b);
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
  return a;
}

inline Field& operator-=(Field& a, const Field& b) {
  check_same_grid(a, b);
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
  return a;
}

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }

inline Field& operator*=(Field& a, cplx s) {
  for (auto& z : a.data) z *= s;
  return a;
}

inline Field operator*(Field a, cplx s) { return a *= s; }
inline Field operator*(cplx s, Field a) { return a *= s; }

// Pointwise product of physical-space samples.
inline Field pointwise_product(const Field& a, const Field& b) {
  check_same_grid(a, b);
  if (a.rep != Rep::physical)
    throw std::invalid_argument("pointwise_product: physical rep required");
  Field out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

inline Field abs_squared(const Field& a) {
  if (a.rep != Rep::physical)
    throw std::invalid_argument("abs_squared: physical rep required");
  Field out = a;
  for (auto& z : out.data) z = cplx{std::norm(z), 0.0};
  return out;
}

// --- dealiasing -----------------------------------------------------------

// 2/3-rule: zero spectral modes with |k| > n/3 on any axis.
inline Field dealias(const Field& f) {
  Field out = to_rep(f, Rep::spectral);
  const int cut = out.grid.n / 3;
  const std::size_t total = out.grid.size();
  for (std::size_t i = 0; i < total; ++i) {
    auto ix = out.grid.unravel(i);
    for (int a = 0; a < out.grid.d; ++a) {
      const int k = out.grid.freq_int(ix[a]);
      if (k > cut || k < -cut) {
        out.data[i] = cplx{0.0, 0.0};
        break;
      }
    }
  }
  if (f.rep == Rep::physical) out = fft_inverse(out);
  return out;
}

// --- quadrature and norms -------------------------------------------------

inline double l2_norm_sq(const Field& f) {
  double s = 0;
  if (f.rep == Rep::physical) {
    for (const auto& z : f.data) s += std::norm(z);
    return s * std::pow(f.grid.dx(), f.grid.d);
  }
  for (const auto& z : f.data) s += std::norm(z);
  return s * std::pow(f.grid.L, f.grid.d);
}

inline double l2_norm(const Field& f) { return std::sqrt(l2_norm_sq(f)); }

inline double lp_norm(const Field& f, double p) {
  const Field g = to_rep(f, Rep::physical);
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0;
    for (const auto& z : g.data) m = std::max(m, std::abs(z));
    return m;
  }
  double s = 0;
  for (const auto& z : g.data) s += std::pow(std::abs(z), p);
  return std::pow(s * std::pow(g.grid.dx(), g.grid.d), 1.0 / p);
}

inline double sobolev_h_norm(const Field& f, double s) {
  const Field g = to_rep(f, Rep::spectral);
  double acc = 0;
  const std::size_t total = g.grid.size();
  for (std::size_t i = 0; i < total; ++i)
    acc += std::pow(1.0 + g.grid.xi_abs2(i), s) * std::norm(g.data[i]);
  return std::sqrt(acc * std::pow(g.grid.L, g.grid.d));
}

inline double h1_norm(const Field& f) { return sobolev_h_norm(f, 1.0); }

// ||<nabla>^s f||_{L^p}.
inline double sobolev_w_norm(const Field& f, double s, double p) {
  return lp_norm(bessel_pow(f, s), p);
}

inline double linf_norm(const Field& f) {
  return lp_norm(f, std::numeric_limits<double>::infinity());
}

inline cplx mean_value(const Field& f) {
  const Field g = to_rep(f, Rep::physical);
  cplx s{0.0, 0.0};
  for (const auto& z : g.data) s += z;
  return s / static_cast<double>(g.data.size());
}

inline double inner_product_real(const Field& a, const Field& b) {
  check_same_grid(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    s += a.data[i].real() * b.data[i].real() + a.data[i].imag() * b.data[i].imag();
  const double w = a.rep == Rep::physical ? std::pow(a.grid.dx(), a.grid.d)
                                          : std::pow(a.grid.L, a.grid.d);
  return s * w;
}

// --- generators -----------------------------------------------------------

// Band-limited Gaussian random field: independent complex normal coefficients
// on modes with |xi| <= xi_cut, zero elsewhere. Returned in spectral rep.
inline Field random_band_limited(const Grid& g, double xi_cut, std::uint64_t seed,
                                 std::uint64_t stream = 0) {
  Field f(g, Rep::spectral);
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    if (std::sqrt(g.xi_abs2(i)) > xi_cut) continue;
    const double re = rng::normal(seed, 0x52464cULL, stream, i);
    const double im = rng::normal(seed, 0x52464dULL, stream, i);
    f.data[i] = cplx{re, im};
  }
  return f;
}

// Gaussian bump amp * exp(-|x-x0|^2 / (2 w^2)) periodized over the box by
// summing the neighboring images, so the sample is smooth across the seam.
inline Field gaussian_bump(const Grid& g, double amp, double width,
                           const std::array<double, 4>& center) {
  Field f(g, Rep::physical);
  const std::size_t total = g.size();
  const int images = 1;
  std::array<int, 4> off{0, 0, 0, 0};
  for (std::size_t i = 0; i < total; ++i) {
    auto x = g.coord(i);
    double val = 0.0;
    // iterate offsets in {-1,0,1}^d
    for (int a = 0; a < g.d; ++a) off[a] = -images;
    while (true) {
      double r2 = 0;
      for (int a = 0; a < g.d; ++a) {
        double dxa = x[a] - center[a];
        dxa -= g.L * std::round(dxa / g.L);
        dxa += off[a] * g.L;
        r2 += dxa * dxa;
      }
      val += std::exp(-r2 / (2.0 * width * width));
      int a = 0;
      while (a < g.d && ++off[a] > images) off[a++] = -images;
      if (a == g.d) break;
    }
    f.data[i] = cplx{amp * val, 0.0};
  }
  return f;
}

// --- serialization --------------------------------------------------------
// Flat container: magic "ZLF1", u32 d, u32 n, f64 L, u32 rep, then n^d
// little-endian complex doubles in row-major order.

inline void write_field(std::ostream& os, const Field& f) {
  os.write("ZLF1", 4);
  const std::uint32_t d = static_cast<std::uint32_t>(f.grid.d);
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid.n);
  const std::uint32_t rep = static_cast<std::uint32_t>(f.rep);
  os.write(reinterpret_cast<const char*>(&d), 4);
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&f.grid.L), 8);
  os.write(reinterpret_cast<const char*>(&rep), 4);
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
}

inline Field read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "ZLF1", 4) != 0)
    throw std::runtime_error("read_field: bad magic");
  std::uint32_t d = 0, n = 0, rep = 0;
  double L = 0;
  is.read(reinterpret_cast<char*>(&d), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&rep), 4);
  Field f(Grid(static_cast<int>(d), static_cast<int>(n), L),
          static_cast<Rep>(rep));
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_field: truncated data");
  return f;
}

inline void save_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  write_field(os, f);
}

inline Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  return read_field(is);
}

}  // namespace zlab
