#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zlab/field.hpp"

namespace zlab {

namespace detail {

// Smooth step built from the exp(-1/t) mollifier: 0 for t<=0, 1 for t>=1.
inline double mollifier_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace detail

// Tabulated bump profile: even, exactly 1 on |r| <= plateau, exactly 0 on
// |r| >= support, smooth monotone transition in between (linear interpolation
// of a dense sample of the mollifier step).
class BumpProfile {
 public:
  BumpProfile(double plateau, double support, int samples = (1 << 17) + 1)
      : plateau_(plateau), support_(support), table_(samples) {
    const int m = samples - 1;
    for (int i = 0; i <= m; ++i)
      table_[i] = detail::mollifier_step(1.0 - static_cast<double>(i) / m);
    table_[0] = 1.0;
    table_[m] = 0.0;
  }

  double plateau() const { return plateau_; }
  double support() const { return support_; }

  double operator()(double r) const {
    r = std::abs(r);
    if (r <= plateau_) return 1.0;
    if (r >= support_) return 0.0;
    const double s = (r - plateau_) / (support_ - plateau_) * (table_.size() - 1);
    const int i = std::min(static_cast<int>(s), static_cast<int>(table_.size()) - 2);
    const double w = s - i;
    return table_[i] * (1.0 - w) + table_[i + 1] * w;
  }

 private:
  double plateau_, support_;
  std::vector<double> table_;
};

enum class BandKind { band, low, high, fattened };

// Dyadic frequency ladder on a grid: eta0 profile (plateau 5/4, support 8/5),
// band multipliers chi_lambda(r) = eta0(r/lambda) - eta0(2r/lambda) and
// chi_{<=lambda}(r) = eta0(r/lambda), plus the lateral profile phi used by the
// angular decomposition (1 on [1/4,2], supported in (1/8,4)).
class DyadicLadder {
 public:
  explicit DyadicLadder(const Grid& g, int projector_constant = 4)
      : grid_(g), k_(projector_constant), eta0_(1.25, 1.6) {
    double top = 1.0;
    const double need = grid_.xi_max() / eta0_.plateau();
    while (top < need) top *= 2.0;
    for (double l = 1.0; l <= top; l *= 2.0) lambdas_.push_back(l);
  }

  const Grid& grid() const { return grid_; }
  int projector_constant() const { return k_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double top_lambda() const { return lambdas_.back(); }

  double eta0(double r) const { return eta0_(r); }

  double chi_band(double r, double lambda) const {
    return eta0_(r / lambda) - eta0_(2.0 * r / lambda);
  }

  double chi_low(double r, double lambda) const { return eta0_(r / lambda); }

  // Band profile of the projector P_lambda: chi_{<=1} at the bottom rung,
  // chi_lambda above.
  double band_profile(double r, double lambda) const {
    return lambda <= 1.0 ? chi_low(r, 1.0) : chi_band(r, lambda);
  }

  struct LateralProfile {
    double operator()(double r) const {
      r = std::abs(r);
      if (r <= 0.125 || r >= 4.0) return 0.0;
      if (r >= 0.25 && r <= 2.0) return 1.0;
      if (r < 0.25) return detail::mollifier_step((r - 0.125) / 0.125);
      return detail::mollifier_step((4.0 - r) / 2.0);
    }
  };

  double phi(double r) const { return phi_(r); }

  void check_lambda(double lambda) const {
    const double l = std::log2(lambda);
    if (std::abs(l - std::round(l)) > 1e-12)
      throw std::invalid_argument("projector scale must be dyadic");
    if (lambda < 1.0 || lambda > top_lambda())
      throw std::invalid_argument("projector scale outside the grid ladder");
  }

 private:
  Grid grid_;
  int k_;
  BumpProfile eta0_;
  LateralProfile phi_;
  std::vector<double> lambdas_;
};

// Spatial Littlewood-Paley projector.
inline Field lp_project(const DyadicLadder& lad, const Field& f, double lambda,
                        BandKind kind) {
  if (kind != BandKind::high) lad.check_lambda(lambda);
  switch (kind) {
    case BandKind::band:
      return apply_multiplier(f, [&](const std::array<double, 4>&, double xi2) {
        return cplx{lad.band_profile(std::sqrt(xi2), lambda), 0.0};
      });
    case BandKind::low:
      return apply_multiplier(f, [&](const std::array<double, 4>&, double xi2) {
        return cplx{lad.chi_low(std::sqrt(xi2), lambda), 0.0};
      });
    case BandKind::high:
      return apply_multiplier(f, [&](const std::array<double, 4>&, double xi2) {
        return cplx{1.0 - lad.chi_low(std::sqrt(xi2), lambda), 0.0};
      });
    case BandKind::fattened: {
      return apply_multiplier(f, [&](const std::array<double, 4>&, double xi2) {
        const double r = std::sqrt(xi2);
        double s = lad.band_profile(r, lambda);
        if (lambda / 2.0 >= 1.0) s += lad.band_profile(r, lambda / 2.0);
        if (lambda * 2.0 <= lad.top_lambda()) s += lad.band_profile(r, lambda * 2.0);
        return cplx{s, 0.0};
      });
    }
  }
  throw std::logic_error("unreachable");
}

// Lateral projector P_{N,e}: multiplier phi(xi_e / N).
inline Field lateral_project(const DyadicLadder& lad, const Field& f, double N,
                             int axis) {
  if (axis < 0 || axis >= f.grid.d)
    throw std::invalid_argument("lateral_project: bad axis");
  return apply_multiplier(f, [&, axis, N](const std::array<double, 4>& xi, double) {
    return cplx{lad.phi(xi[axis] / N), 0.0};
  });
}

// Angular decomposition of P_N f into d pieces
//   G_j = P_{N,e_j} prod_{l<j} (1 - P_{N,e_l}) P_N f,
// which sum to P_N f because the lateral profiles cover the annulus.
inline std::vector<Field> decompose_angular(const DyadicLadder& lad, const Field& f,
                                            double N) {
  std::vector<Field> parts;
  const Field fn = lp_project(lad, f, N, BandKind::band);
  for (int j = 0; j < f.grid.d; ++j) {
    parts.push_back(apply_multiplier(
        fn, [&, j, N](const std::array<double, 4>& xi, double) {
          double g = lad.phi(xi[j] / N);
          for (int l = 0; l < j; ++l) g *= 1.0 - lad.phi(xi[l] / N);
          return cplx{g, 0.0};
        }));
  }
  return parts;
}

}  // namespace zlab
