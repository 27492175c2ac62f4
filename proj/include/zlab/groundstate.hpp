#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "zlab/field.hpp"
#include "zlab/noise.hpp"

namespace zlab {

namespace quad {

namespace detail {

template <typename F>
double simpson(F& f, double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adapt(F& f, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson over [a,b].
template <typename F>
double integrate(F f, double a, double b, double tol = 1e-11, int initial_panels = 64) {
  double acc = 0.0;
  const double h = (b - a) / initial_panels;
  for (int i = 0; i < initial_panels; ++i) {
    const double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    const double f0 = f(x0), fm = f(xm), f1 = f(x1);
    acc += detail::adapt(f, x0, x1, f0, fm, f1, detail::simpson(f, x0, x1, f0, fm, f1),
                         tol / initial_panels, 40);
  }
  return acc;
}

// int_0^inf g(r) dr via the substitution r = s/(1-s).
template <typename G>
double integrate_halfline(G g, double tol = 1e-11) {
  return integrate(
      [g](double s) {
        const double om = 1.0 - s;
        if (om <= 0.0) return 0.0;
        const double r = s / om;
        return g(r) / (om * om);
      },
      0.0, 1.0, tol);
}

}  // namespace quad

inline constexpr double kSphereArea3 = 2.0 * kPi * kPi;  // |S^3|

// Aubin-Talenti ground state family W_lambda(x) = lambda W(lambda x) with
// W(x) = (1 + |x|^2/8)^{-1}, paired with the wave component -W_lambda^2.
// Threshold constants come from a 1-D radial quadrature independent of any
// torus grid.
class GroundState {
 public:
  explicit GroundState(double lambda = 1.0) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("GroundState: lambda > 0");
    w2_l2_sq_ = kSphereArea3 * quad::integrate_halfline([this](double r) {
      const double w = value(r);
      return w * w * w * w * r * r * r;
    });
    grad_l2_sq_ = kSphereArea3 * quad::integrate_halfline([this](double r) {
      const double dw = derivative(r);
      return dw * dw * r * r * r;
    });
    // Energy by direct quadrature of the density of e_Z(W, -W^2):
    // 1/2 |W'|^2 + 1/4 W^4 - 1/2 W^4.
    energy_ = kSphereArea3 * quad::integrate_halfline([this](double r) {
      const double w = value(r), dw = derivative(r);
      return (0.5 * dw * dw - 0.25 * w * w * w * w) * r * r * r;
    });
  }

  double lambda() const { return lambda_; }

  double value(double r) const {
    const double lr = lambda_ * r;
    return lambda_ / (1.0 + lr * lr / 8.0);
  }

  double derivative(double r) const {
    const double lr = lambda_ * r;
    const double den = 1.0 + lr * lr / 8.0;
    return -lambda_ * lambda_ * lambda_ * r / (4.0 * den * den);
  }

  double second_derivative(double r) const {
    const double l2 = lambda_ * lambda_;
    const double den = 1.0 + l2 * r * r / 8.0;
    return -l2 * lambda_ / (4.0 * den * den) +
           l2 * l2 * lambda_ * r * r / (8.0 * den * den * den);
  }

  // Radial Laplacian in d = 4.
  double laplacian(double r) const {
    if (r < 1e-12) return 4.0 * second_derivative(0.0);
    return second_derivative(r) + 3.0 * derivative(r) / r;
  }

  // Cached quadrature constants.
  double w2_norm_sq() const { return w2_l2_sq_; }          // ||W^2||_{L^2}^2
  double w2_norm() const { return std::sqrt(w2_l2_sq_); }  // ||W^2||_{L^2}
  double grad_norm_sq() const { return grad_l2_sq_; }      // ||grad W||_{L^2}^2
  double energy() const { return energy_; }                // e_Z(W, -W^2)
  double threshold() const { return 0.25 * w2_l2_sq_; }    // (1/4)||W^2||^2

  // Relative L^2 residual of -Delta W = W^3 by radial quadrature.
  double residual_radial() const {
    const double num = quad::integrate_halfline([this](double r) {
      const double w = value(r);
      const double res = laplacian(r) + w * w * w;
      return res * res * r * r * r;
    });
    const double den = quad::integrate_halfline([this](double r) {
      const double w = value(r);
      return w * w * w * w * w * w * r * r * r;
    });
    return std::sqrt(std::max(num, 0.0) / den);
  }

  // Grid realization by simple restriction, centered in the box.
  Field field(const Grid& g) const {
    Field f(g, Rep::physical);
    const std::size_t total = g.size();
    for (std::size_t i = 0; i < total; ++i) {
      auto x = g.coord(i);
      double r2 = 0;
      for (int a = 0; a < g.d; ++a) {
        const double da = x[a] - 0.5 * g.L;
        r2 += da * da;
      }
      f.data[i] = cplx{value(std::sqrt(r2)), 0.0};
    }
    return f;
  }

  Field wave_field(const Grid& g) const {
    Field w = field(g);
    for (auto& z : w.data) z = cplx{-z.real() * z.real(), 0.0};
    return w;
  }

  // Reported periodization error: W(L/2)/W(0) for the centered restriction.
  double periodization_error(const Grid& g) const { return value(0.5 * g.L) / value(0.0); }

 private:
  double lambda_;
  double w2_l2_sq_ = 0, grad_l2_sq_ = 0, energy_ = 0;
};

// Zakharov energy e_Z(u,v) = int 1/2 |grad u|^2 + 1/4 |v|^2 + 1/2 Re(v) |u|^2.
inline double zakharov_energy(const Field& u, const Field& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("energy: grid mismatch");
  const Field us = to_rep(u, Rep::spectral);
  double grad_sq = 0.0;
  const std::size_t total = u.grid.size();
  for (std::size_t i = 0; i < total; ++i)
    grad_sq += u.grid.xi_abs2(i) * std::norm(us.data[i]);
  grad_sq *= std::pow(u.grid.L, u.grid.d);

  const Field up = to_rep(u, Rep::physical);
  const Field vp = to_rep(v, Rep::physical);
  double v_sq = 0.0, coupling = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    v_sq += std::norm(vp.data[i]);
    coupling += vp.data[i].real() * std::norm(up.data[i]);
  }
  const double w = std::pow(u.grid.dx(), u.grid.d);
  return 0.5 * grad_sq + 0.25 * v_sq * w + 0.5 * coupling * w;
}

// Relative L^2 residual of -Delta W = W^3 for the grid restriction.
inline double ground_state_residual(const GroundState& gs, const Grid& g) {
  const Field w = gs.field(g);
  const Field lap = laplacian(w);
  Field cube = w;
  for (auto& z : cube.data) z = z * z * z;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    num += std::norm(lap.data[i] + cube.data[i]);
    den += std::norm(cube.data[i]);
  }
  return std::sqrt(num / den);
}

struct VariationalReport {
  bool hypotheses_met = false;
  double energy = 0.0;
  double g_l2 = 0.0;
  double gradf_l2_sq = 0.0;
  double bound_mass = 0.0;      // 4 e_Z(f,g), upper bound for ||g||^2
  double bound_grad = 0.0;      // variational upper bound for ||grad f||^2
  bool mass_ok = false;         // ||g||^2 <= 4 e_Z + slack
  bool grad_ok = false;         // ||grad f||^2 <= bound_grad + slack
  bool chain_ok = false;        // bound_grad <= ||W^2||^2 + slack
  bool all_ok() const { return hypotheses_met && mass_ok && grad_ok && chain_ok; }
};

// Variational constraints below the ground state: under
// e_Z(f,g) < (1/4)||W^2||^2 and ||g|| <= ||W^2||, asserts
// ||g||^2 <= 4 e_Z(f,g) and
// ||grad f||^2 <= 1/2 ||W^2||/(||W^2|| - ||g||) (4 e_Z - ||g||^2) <= ||W^2||^2.
// Note the bound chain is exactly saturated on pairs (s W, -t W^2).
inline VariationalReport variational_check_values(const GroundState& gs, double energy,
                                                  double g_l2, double gradf_l2_sq,
                                                  double slack = 1e-12) {
  VariationalReport rep;
  rep.energy = energy;
  rep.g_l2 = g_l2;
  rep.gradf_l2_sq = gradf_l2_sq;
  const double w2 = gs.w2_norm();
  if (!(energy < gs.threshold()) || !(g_l2 <= w2)) return rep;
  rep.hypotheses_met = true;
  rep.bound_mass = 4.0 * energy;
  rep.mass_ok = g_l2 * g_l2 <= rep.bound_mass + slack * (1.0 + std::abs(rep.bound_mass));
  rep.bound_grad = 0.5 * w2 / (w2 - g_l2) * (4.0 * energy - g_l2 * g_l2);
  rep.grad_ok = gradf_l2_sq <= rep.bound_grad + slack * (1.0 + std::abs(rep.bound_grad));
  rep.chain_ok = rep.bound_grad <= gs.w2_norm_sq() + slack * (1.0 + gs.w2_norm_sq());
  return rep;
}

inline VariationalReport variational_check(const GroundState& gs, const Field& f,
                                           const Field& g, double slack = 1e-12) {
  const Field fs = to_rep(f, Rep::spectral);
  double grad_sq = 0.0;
  for (std::size_t i = 0; i < fs.data.size(); ++i)
    grad_sq += fs.grid.xi_abs2(i) * std::norm(fs.data[i]);
  grad_sq *= std::pow(f.grid.L, f.grid.d);
  return variational_check_values(gs, zakharov_energy(f, g), l2_norm(g), grad_sq, slack);
}

struct SigmaStarResult {
  double value = 0.0;
  bool crossed = false;
};

// Sub-threshold stopping functional
//   e_Z(e^{-W_1(t)} X, Y + i int_0^t e^{i(t-s)|nabla|} dW_2(s))
// compared against e_Z(W,-W^2) - 1/n; the convolution term equals
// Y - T_t(W_2).
inline SigmaStarResult sigma_star_functional(const GroundState& gs, const Field& X,
                                             const Field& Y, double t, const NoiseModel& model,
                                             const NoisePath& path, int n) {
  if (n < 1) throw std::invalid_argument("sigma_star_functional: n >= 1");
  const Field w1 = w1_field(model, path, t);
  Field u = to_rep(X, Rep::physical);
  for (std::size_t i = 0; i < u.data.size(); ++i)
    u.data[i] *= std::exp(-w1.data[i]);
  Field v = to_rep(Y, Rep::spectral);
  v -= stochastic_convolution(model, path, t);
  SigmaStarResult res;
  res.value = zakharov_energy(u, v);
  res.crossed = res.value >= gs.energy() - 1.0 / n;
  return res;
}

}  // namespace zlab
