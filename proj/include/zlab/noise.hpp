#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zlab/field.hpp"

namespace zlab {

struct HypothesisReport {
  double sum_h4_sq = 0.0;      // sum_k ||phi1_k||_{H^4}^2
  double lateral_sum = 0.0;    // sum_j sum_k int sup_y |grad phi1_k(r e_j + y)| dr
  double sum_h2_sq = 0.0;      // sum_k ||phi2_k||_{H^2}^2
  bool finite() const {
    return std::isfinite(sum_h4_sq) && std::isfinite(lateral_sum) && std::isfinite(sum_h2_sq);
  }
};

// Spatial structure of the Wiener processes W_j = sum_k i phi_k^{(j)} beta_k^{(j)}.
// Immutable after construction; derived mode caches are precomputed here.
struct NoiseModel {
  Grid grid;
  std::vector<Field> modes1;  // phi^{(1)}_k, physical rep, complex allowed
  std::vector<Field> modes2;  // phi^{(2)}_k, physical rep, real
  Field mu;                   // (1/2) sum |phi1_k|^2
  Field mu_hat;               // (1/2) sum (|phi1_k|^2 - phi1_k^2)
  std::optional<cplx> mu_hat_constant;  // set when modes1 is a single constant
  HypothesisReport hypothesis;

  // Caches for the rescaled dynamics.
  std::vector<std::array<Field, 4>> grad_modes1;  // physical
  std::vector<Field> lap_modes1;                  // physical
  std::vector<Field> modes2_spec;                 // spectral

  bool empty() const { return modes1.empty() && modes2.empty(); }
};

namespace detail {

inline double lateral_l1_sup(const Field& gradmag, int axis) {
  const int n = gradmag.grid.n;
  std::vector<double> sup(static_cast<std::size_t>(n), 0.0);
  const std::size_t total = gradmag.grid.size();
  for (std::size_t i = 0; i < total; ++i) {
    const int r = gradmag.grid.unravel(i)[axis];
    sup[r] = std::max(sup[r], std::abs(gradmag.data[i]));
  }
  double acc = 0.0;
  for (int r = 0; r < n; ++r) acc += sup[r];
  return acc * gradmag.grid.dx();
}

inline void finalize_model(NoiseModel& m) {
  m.mu = Field(m.grid, Rep::physical);
  m.mu_hat = Field(m.grid, Rep::physical);
  for (const auto& phi : m.modes1) {
    if (!(phi.grid == m.grid)) throw std::invalid_argument("noise mode on wrong grid");
    for (std::size_t i = 0; i < phi.data.size(); ++i) {
      const cplx p = phi.data[i];
      m.mu.data[i] += cplx{0.5 * std::norm(p), 0.0};
      m.mu_hat.data[i] += 0.5 * (cplx{std::norm(p), 0.0} - p * p);
    }
  }
  for (const auto& phi : m.modes2) {
    if (!(phi.grid == m.grid)) throw std::invalid_argument("noise mode on wrong grid");
    for (const auto& z : phi.data)
      if (std::abs(z.imag()) > 1e-14 * (1.0 + std::abs(z.real())))
        throw std::invalid_argument("wave noise modes must be real-valued");
  }
  if (m.modes1.size() == 1) {
    const auto& d = m.modes1[0].data;
    bool constant = true;
    for (const auto& z : d)
      if (std::abs(z - d[0]) > 1e-14 * (1.0 + std::abs(d[0]))) constant = false;
    if (constant) m.mu_hat_constant = 0.5 * (cplx{std::norm(d[0]), 0.0} - d[0] * d[0]);
  }

  // Derived mode caches.
  for (const auto& phi : m.modes1) {
    const Field spec = to_rep(phi, Rep::spectral);
    std::array<Field, 4> g;
    for (int a = 0; a < m.grid.d; ++a)
      g[a] = fft_inverse(gradient_component(spec, a));
    for (int a = m.grid.d; a < 4; ++a) g[a] = Field(m.grid, Rep::physical);
    m.grad_modes1.push_back(std::move(g));
    m.lap_modes1.push_back(fft_inverse(laplacian(spec)));
  }
  for (const auto& phi : m.modes2) m.modes2_spec.push_back(to_rep(phi, Rep::spectral));

  // Hypothesis (H) sums, evaluated by grid quadrature.
  for (std::size_t k = 0; k < m.modes1.size(); ++k) {
    const double h4 = sobolev_h_norm(m.modes1[k], 4.0);
    m.hypothesis.sum_h4_sq += h4 * h4;
    Field gradmag(m.grid, Rep::physical);
    for (std::size_t i = 0; i < gradmag.data.size(); ++i) {
      double s = 0;
      for (int a = 0; a < m.grid.d; ++a) s += std::norm(m.grad_modes1[k][a].data[i]);
      gradmag.data[i] = cplx{std::sqrt(s), 0.0};
    }
    for (int a = 0; a < m.grid.d; ++a)
      m.hypothesis.lateral_sum += lateral_l1_sup(gradmag, a);
  }
  for (const auto& phi : m.modes2) {
    const double h2 = sobolev_h_norm(phi, 2.0);
    m.hypothesis.sum_h2_sq += h2 * h2;
  }
}

}  // namespace detail

struct ConservativeParams {
  int modes1 = 3;
  int modes2 = 2;
  double amplitude = 1.0;  // mode k gets amplitude * 2^{-k}
  double width_fraction = 0.08;  // bump width as a fraction of L
};

// Conservative preset: real Gaussian bumps with amplitudes 2^{-k} at staggered
// centers for both noise components.
inline NoiseModel build_noise_model_conservative(const Grid& g, const ConservativeParams& p) {
  NoiseModel m;
  m.grid = g;
  const double w = p.width_fraction * g.L;
  for (int k = 0; k < p.modes1; ++k) {
    std::array<double, 4> c{0, 0, 0, 0};
    for (int a = 0; a < g.d; ++a)
      c[a] = g.L * (0.25 + 0.5 * ((k + a) % 3) / 2.0);
    m.modes1.push_back(gaussian_bump(g, p.amplitude * std::pow(2.0, -k), w, c));
  }
  for (int k = 0; k < p.modes2; ++k) {
    std::array<double, 4> c{0, 0, 0, 0};
    for (int a = 0; a < g.d; ++a)
      c[a] = g.L * (0.35 + 0.5 * ((k + 2 * a + 1) % 3) / 2.0);
    m.modes2.push_back(gaussian_bump(g, p.amplitude * std::pow(2.0, -k), w, c));
  }
  detail::finalize_model(m);
  return m;
}

// Non-conservative preset of the regularization theorem: one constant purely
// imaginary Schrodinger mode phi = i c, no wave noise; mu_hat = c^2.
inline NoiseModel build_noise_model_nonconservative(const Grid& g, double c) {
  NoiseModel m;
  m.grid = g;
  Field phi(g, Rep::physical);
  for (auto& z : phi.data) z = cplx{0.0, c};
  m.modes1.push_back(std::move(phi));
  detail::finalize_model(m);
  return m;
}

inline NoiseModel build_noise_model_custom(const Grid& g, std::vector<Field> modes1,
                                           std::vector<Field> modes2) {
  NoiseModel m;
  m.grid = g;
  for (auto& f : modes1) {
    if (!f.finite()) throw std::invalid_argument("custom noise mode with non-finite data");
    m.modes1.push_back(to_rep(f, Rep::physical));
  }
  for (auto& f : modes2) {
    if (!f.finite()) throw std::invalid_argument("custom noise mode with non-finite data");
    m.modes2.push_back(to_rep(f, Rep::physical));
  }
  detail::finalize_model(m);
  return m;
}

inline NoiseModel build_noise_model_empty(const Grid& g) {
  NoiseModel m;
  m.grid = g;
  detail::finalize_model(m);
  return m;
}

// Seeded Brownian increments on a fixed mesh. Increment (j,k,step) is a pure
// function of (seed, j, k, step); prefix sums are cached per mode.
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, double dt, double T) : seed_(seed), dt_(dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("NoisePath: dt, T > 0");
    const double steps = T / dt;
    steps_ = static_cast<long>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(steps_)) > 1e-9)
      throw std::invalid_argument("NoisePath: T must be an integer number of steps");
  }

  std::uint64_t seed() const { return seed_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }
  double horizon() const { return steps_ * dt_; }

  long mesh_index(double t) const {
    const long m = static_cast<long>(std::llround(t / dt_));
    if (std::abs(t - m * dt_) > 1e-9 * std::max(1.0, horizon()) || m < 0 || m > steps_)
      throw std::invalid_argument("time off the path mesh");
    return m;
  }

  double increment(int j, int k, long step) const {
    return std::sqrt(dt_) *
           rng::normal(seed_, static_cast<std::uint64_t>(j) + 1,
                       static_cast<std::uint64_t>(k) + 1,
                       static_cast<std::uint64_t>(step));
  }

  // beta_k^{(j)} at mesh index m (prefix sum of increments).
  double beta_at(int j, int k, long m) const {
    auto& cache = betas_[{j, k}];
    if (cache.empty()) cache.push_back(0.0);
    while (static_cast<long>(cache.size()) <= m)
      cache.push_back(cache.back() + increment(j, k, static_cast<long>(cache.size()) - 1));
    return cache[static_cast<std::size_t>(m)];
  }

  double brownian_value(int j, int k, double t) const { return beta_at(j, k, mesh_index(t)); }

 private:
  std::uint64_t seed_;
  double dt_;
  long steps_;
  mutable std::map<std::pair<int, int>, std::vector<double>> betas_;
};

// W_1(sigma + t) - W_1(sigma) as a spatial field; sigma = 0 gives W_1(t).
inline Field w1_field(const NoiseModel& m, const NoisePath& path, double t, double sigma = 0.0) {
  Field w(m.grid, Rep::physical);
  const long msig = path.mesh_index(sigma);
  const long mt = path.mesh_index(sigma + t);
  for (std::size_t k = 0; k < m.modes1.size(); ++k) {
    const double b = path.beta_at(0, static_cast<int>(k), mt) -
                     path.beta_at(0, static_cast<int>(k), msig);
    const cplx ib{0.0, b};
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] += ib * m.modes1[k].data[i];
  }
  return w;
}

// Increment of W_2 over [step*dt, (step+1)*dt].
inline Field w2_increment(const NoiseModel& m, const NoisePath& path, long step) {
  Field w(m.grid, Rep::physical);
  for (std::size_t k = 0; k < m.modes2.size(); ++k) {
    const double db = path.increment(1, static_cast<int>(k), step);
    const cplx idb{0.0, db};
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] += idb * m.modes2[k].data[i];
  }
  return w;
}

// Geometric Brownian motion h_c(t) = exp(-2 c beta(t) - 2 c^2 t) driven by the
// first Schrodinger-noise Brownian motion.
inline double geometric_bm(const NoisePath& path, double c, double t) {
  if (c < 0.0) throw std::invalid_argument("geometric_bm: c >= 0 required");
  const long mt = path.mesh_index(t);
  const double beta = path.beta_at(0, 0, mt);
  return std::exp(-2.0 * c * beta - 2.0 * c * c * (mt * path.dt()));
}

// Stochastic convolution T_{sigma+t,sigma}(W_2): left-point quadrature of
// -i int_sigma^{sigma+t} e^{i(sigma+t-s)|nabla|} dW_2(s), returned spectral.
inline Field stochastic_convolution(const NoiseModel& m, const NoisePath& path, double t,
                                    double sigma = 0.0) {
  Field acc(m.grid, Rep::spectral);
  const long m0 = path.mesh_index(sigma);
  const long m1 = path.mesh_index(sigma + t);
  if (m.modes2.empty() || m1 == m0) return acc;

  const std::size_t total = m.grid.size();
  std::vector<double> absxi(total);
  for (std::size_t i = 0; i < total; ++i) absxi[i] = std::sqrt(m.grid.xi_abs2(i));

  for (long step = m0; step < m1; ++step) {
    // acc <- e^{i dt |nabla|} (acc + (-i) dW2(step))
    for (std::size_t k = 0; k < m.modes2.size(); ++k) {
      const double db = path.increment(1, static_cast<int>(k), step);
      // (-i) * (i phi db) = phi db
      for (std::size_t i = 0; i < total; ++i)
        acc.data[i] += db * m.modes2_spec[k].data[i];
    }
    for (std::size_t i = 0; i < total; ++i)
      acc.data[i] *= std::polar(1.0, path.dt() * absxi[i]);
  }
  return acc;
}

// Lower-order coefficients of the conservative rescaled system at time
// sigma + t built from noise increments after sigma:
//   b = 2 grad W_{1,sigma},  c = sum_a (d_a W_{1,sigma})^2 + Delta W_{1,sigma}.
struct LowerOrderCoeffs {
  std::array<Field, 4> b;  // physical, d components used
  Field c;                 // physical
};

inline LowerOrderCoeffs lower_order_coeffs(const NoiseModel& m, const NoisePath& path,
                                           double t, double sigma = 0.0) {
  LowerOrderCoeffs out;
  for (int a = 0; a < m.grid.d; ++a) out.b[a] = Field(m.grid, Rep::physical);
  out.c = Field(m.grid, Rep::physical);
  const long msig = path.mesh_index(sigma);
  const long mt = path.mesh_index(sigma + t);

  std::array<Field, 4> gradw;
  for (int a = 0; a < m.grid.d; ++a) gradw[a] = Field(m.grid, Rep::physical);
  Field lapw(m.grid, Rep::physical);

  for (std::size_t k = 0; k < m.modes1.size(); ++k) {
    const double beta = path.beta_at(0, static_cast<int>(k), mt) -
                        path.beta_at(0, static_cast<int>(k), msig);
    const cplx ib{0.0, beta};
    for (int a = 0; a < m.grid.d; ++a)
      for (std::size_t i = 0; i < lapw.data.size(); ++i)
        gradw[a].data[i] += ib * m.grad_modes1[k][a].data[i];
    for (std::size_t i = 0; i < lapw.data.size(); ++i)
      lapw.data[i] += ib * m.lap_modes1[k].data[i];
  }
  for (int a = 0; a < m.grid.d; ++a) {
    for (std::size_t i = 0; i < lapw.data.size(); ++i) {
      out.b[a].data[i] = 2.0 * gradw[a].data[i];
      out.c.data[i] += gradw[a].data[i] * gradw[a].data[i];
    }
  }
  out.c += lapw;
  return out;
}

}  // namespace zlab
