#pragma once

#include <complex>
#include <cstring>
#include <cstddef>
#include <vector>

#include "zlab/grid.hpp"

namespace zlab {

using cplx = std::complex<double>;

// Radix-2 transform for power-of-two lengths. Unscaled in both directions;
// callers arrange normalization.
class Fft1d {
 public:
  explicit Fft1d(int n) : n_(n), rev_(n), twre_(n / 2), twim_(n / 2) {
    int logn = 0;
    while ((1 << logn) < n) ++logn;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < logn; ++b)
        if (i & (1 << b)) r |= 1 << (logn - 1 - b);
      rev_[i] = r;
    }
    for (int j = 0; j < n / 2; ++j) {
      const double ang = -2.0 * kPi * j / n;
      twre_[j] = std::cos(ang);
      twim_[j] = std::sin(ang);
    }
  }

  int size() const { return n_; }

  void forward(cplx* a) const { run(a, false); }
  void inverse(cplx* a) const { run(a, true); }

 private:
  int n_;
  std::vector<int> rev_;
  std::vector<double> twre_, twim_;

  void run(cplx* a, bool inv) const {
    for (int i = 0; i < n_; ++i)
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    double* v = reinterpret_cast<double*>(a);
    for (int m = 1; m < n_; m <<= 1) {
      const int step = n_ / (2 * m);
      for (int k = 0; k < n_; k += 2 * m) {
        for (int j = 0; j < m; ++j) {
          const double wr = twre_[j * step];
          const double wi = inv ? -twim_[j * step] : twim_[j * step];
          const int p = 2 * (k + j);
          const int q = 2 * (k + j + m);
          const double xr = v[q], xi = v[q + 1];
          const double tr = wr * xr - wi * xi;
          const double ti = wr * xi + wi * xr;
          v[q] = v[p] - tr;
          v[q + 1] = v[p + 1] - ti;
          v[p] += tr;
          v[p + 1] += ti;
        }
      }
    }
  }
};

// Separable transform over all axes of a row-major d-dimensional array.
// Forward applies 1/n per axis so forward(inverse(c)) == c and the forward
// of samples of sum c_k e^{i xi_k x} returns the coefficients c_k.
// Strided axes run butterflies over contiguous row blocks (the twiddle is
// constant across the inner stride, so the loops vectorize without gathers).
class FftNd {
 public:
  explicit FftNd(const Grid& g)
      : grid_(g),
        fft1_(g.n),
        row_(g.size() / static_cast<std::size_t>(g.n)),
        rev_(g.n),
        twre_(g.n / 2),
        twim_(g.n / 2) {
    const int n = g.n;
    int logn = 0;
    while ((1 << logn) < n) ++logn;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < logn; ++b)
        if (i & (1 << b)) r |= 1 << (logn - 1 - b);
      rev_[i] = r;
    }
    for (int j = 0; j < n / 2; ++j) {
      const double ang = -2.0 * kPi * j / n;
      twre_[j] = std::cos(ang);
      twim_[j] = std::sin(ang);
    }
  }

  const Grid& grid() const { return grid_; }

  void forward(std::vector<cplx>& data) { transform(data, false); }
  void inverse(std::vector<cplx>& data) { transform(data, true); }

 private:
  Grid grid_;
  Fft1d fft1_;
  std::vector<cplx> row_;
  std::vector<int> rev_;
  std::vector<double> twre_, twim_;

  void transform(std::vector<cplx>& data, bool inv) {
    const int n = grid_.n;
    const std::size_t total = grid_.size();
    std::size_t stride = 1;
    for (int axis = grid_.d - 1; axis >= 0; --axis) {
      const std::size_t block = stride * static_cast<std::size_t>(n);
      if (stride == 1) {
        for (std::size_t hi = 0; hi < total; hi += block) {
          cplx* base = data.data() + hi;
          if (inv)
            fft1_.inverse(base);
          else {
            fft1_.forward(base);
            const double scale = 1.0 / n;
            for (int t = 0; t < n; ++t) base[t] *= scale;
          }
        }
      } else {
        for (std::size_t hi = 0; hi < total; hi += block)
          transform_axis(data.data() + hi, stride, inv);
      }
      stride = block;
    }
  }

  // One n-point transform whose "elements" are contiguous rows of length s.
  void transform_axis(cplx* base, std::size_t s, bool inv) {
    const int n = grid_.n;
    for (int i = 0; i < n; ++i) {
      if (i < rev_[i]) {
        cplx* a = base + i * s;
        cplx* b = base + rev_[i] * s;
        std::memcpy(row_.data(), a, s * sizeof(cplx));
        std::memcpy(a, b, s * sizeof(cplx));
        std::memcpy(b, row_.data(), s * sizeof(cplx));
      }
    }
    for (int m = 1; m < n; m <<= 1) {
      const int step = n / (2 * m);
      for (int k = 0; k < n; k += 2 * m) {
        for (int j = 0; j < m; ++j) {
          const double wr = twre_[j * step];
          const double wi = inv ? -twim_[j * step] : twim_[j * step];
          double* p = reinterpret_cast<double*>(base + (k + j) * s);
          double* q = reinterpret_cast<double*>(base + (k + j + m) * s);
          for (std::size_t t = 0; t < 2 * s; t += 2) {
            const double xr = q[t], xi = q[t + 1];
            const double tr = wr * xr - wi * xi;
            const double ti = wr * xi + wi * xr;
            q[t] = p[t] - tr;
            q[t + 1] = p[t + 1] - ti;
            p[t] += tr;
            p[t + 1] += ti;
          }
        }
      }
    }
    if (!inv) {
      const double scale = 1.0 / n;
      double* p = reinterpret_cast<double*>(base);
      for (std::size_t t = 0; t < 2 * s * static_cast<std::size_t>(n); ++t) p[t] *= scale;
    }
  }
};

}  // namespace zlab
