#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zlab/block.hpp"

namespace zlab {

// Regularity regimes used by the adapted norms: (s,a) = (1,1/4) at the energy
// level, (1/2,0) at the endpoint level.
enum class SReg { energy, endpoint };

inline double sreg_s(SReg r) { return r == SReg::energy ? 1.0 : 0.5; }
inline double sreg_a(SReg r) { return r == SReg::energy ? 0.25 : 0.0; }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline double modulation_cut(const DyadicLadder& lad, double lambda) {
  const double c = lambda / lad.projector_constant();
  // snap to the dyadic grid from below so the cutoff is itself dyadic
  return std::pow(2.0, std::floor(std::log2(c * c) + 0.5));
}

}  // namespace detail

// S^{s,a}_lambda of a block (no implicit band projection):
//   (1,1/4):  l ||u||_{LinfL2} + l ||C_{<=(l/K)^2} u||_{L2L4}
//             + ||((l+|dt|)/(l^2+|dt|))^{1/4} (i d_t + Delta) u||_{L2}
//   (1/2,0):  l^{1/2} ||u||_{LinfL2} + l^{1/2} ||u||_{L2L4}
//             + l^{-1/2} ||(i d_t + Delta) u||_{L2}
inline double s_norm(const DyadicLadder& lad, const SpaceTimeBlock& u, double lambda,
                     SReg reg) {
  const double cut = detail::modulation_cut(lad, lambda);
  if (reg == SReg::energy) {
    const double a = lqt_lpx_norm(u, kInf, 2.0);
    const double b =
        lqt_lpx_norm(modulation_project(lad, u, cut, ModKind::low), 2.0, 4.0);
    const double c =
        l2_spacetime_norm(modulation_weight(schrodinger_operator(u), lambda, 0.25));
    return lambda * a + lambda * b + c;
  }
  const double a = lqt_lpx_norm(u, kInf, 2.0);
  const double b = lqt_lpx_norm(u, 2.0, 4.0);
  const double c = l2_spacetime_norm(schrodinger_operator(u));
  return std::sqrt(lambda) * (a + b) + c / std::sqrt(lambda);
}

// N^{s,a}_lambda:
//   (1,1/4):  l ||C_{<=(l/K)^2} F||_{L2L4/3} + ||((l+|dt|)/(l^2+|dt|))^{1/4} F||_{L2}
//   (1/2,0):  l^{1/2} ||C_{<=(l/K)^2} F||_{L2L4/3} + l^{-1/2} ||F||_{L2}
inline double n_norm(const DyadicLadder& lad, const SpaceTimeBlock& f, double lambda,
                     SReg reg) {
  const double cut = detail::modulation_cut(lad, lambda);
  const double low =
      lqt_lpx_norm(modulation_project(lad, f, cut, ModKind::low), 2.0, 4.0 / 3.0);
  if (reg == SReg::energy)
    return lambda * low + l2_spacetime_norm(modulation_weight(f, lambda, 0.25));
  return std::sqrt(lambda) * low + l2_spacetime_norm(f) / std::sqrt(lambda);
}

// W^{0,alpha,beta}_lambda wave norms:
//   (1/4,1/2): ||v||_{LinfL2} + l^{-1/4} ||(l+|dt|)^{1/4} P^t_{<=(l/K)^2} v||_{LinfL2}
//              + l^{-1/2} ||(i d_t + |nabla|) v||_{L2}
//   (0,0):     ||v||_{LinfL2} + ||P^t_{<=(l/K)^2} v||_{LinfL2}
//              + l^{-1} ||(i d_t + |nabla|) v||_{L2}
enum class WaveReg { quarter_half, zero };

inline double wave_norm(const DyadicLadder& lad, const SpaceTimeBlock& v, double lambda,
                        WaveReg reg) {
  const double cut = detail::modulation_cut(lad, lambda);
  const double a = lqt_lpx_norm(v, kInf, 2.0);
  const SpaceTimeBlock low = temporal_project(lad, v, cut, ModKind::low);
  const double c = l2_spacetime_norm(halfwave_operator(v));
  if (reg == WaveReg::quarter_half) {
    const double b = lqt_lpx_norm(shifted_tau_weight(low, lambda, 0.25), kInf, 2.0);
    return a + b / std::pow(lambda, 0.25) + c / std::sqrt(lambda);
  }
  return a + lqt_lpx_norm(low, kInf, 2.0) + c / lambda;
}

// --- dyadic assemblies ------------------------------------------------------

inline SpaceTimeBlock band_block(const DyadicLadder& lad, const SpaceTimeBlock& b,
                                 double lambda) {
  return map_snapshots(b, [&](const Field& f) {
    return lp_project(lad, f, lambda, BandKind::band);
  });
}

inline double s_total(const DyadicLadder& lad, const SpaceTimeBlock& u, SReg reg) {
  double acc = 0;
  for (double lam : lad.lambdas()) {
    const double v = s_norm(lad, band_block(lad, u, lam), lam, reg);
    acc += v * v;
  }
  return std::sqrt(acc);
}

inline double n_total(const DyadicLadder& lad, const SpaceTimeBlock& f, SReg reg) {
  double acc = 0;
  for (double lam : lad.lambdas()) {
    const double v = n_norm(lad, band_block(lad, f, lam), lam, reg);
    acc += v * v;
  }
  return std::sqrt(acc);
}

inline double y_total(const DyadicLadder& lad, const SpaceTimeBlock& v,
                      WaveReg reg = WaveReg::quarter_half) {
  double acc = 0;
  for (double lam : lad.lambdas()) {
    const double w = wave_norm(lad, band_block(lad, v, lam), lam, reg);
    acc += w * w;
  }
  return std::sqrt(acc);
}

// X^s_lambda = S^{s,a}_lambda + sum_j l^{s+1/2} ||P_{l,e_j} C_{<=(l/K)^2} u||_{Linf,2_{e_j}}
// for lambda > 1; the lateral part is dropped at the bottom rung.
inline double x_norm_band(const DyadicLadder& lad, const SpaceTimeBlock& u, double lambda,
                          SReg reg) {
  double val = s_norm(lad, u, lambda, reg);
  if (lambda > 1.0) {
    const double cut = detail::modulation_cut(lad, lambda);
    const SpaceTimeBlock low = modulation_project(lad, u, cut, ModKind::low);
    const double weight = std::pow(lambda, sreg_s(reg) + 0.5);
    for (int j = 0; j < u.grid.d; ++j) {
      const SpaceTimeBlock lat = map_snapshots(
          low, [&](const Field& f) { return lateral_project(lad, f, lambda, j); });
      val += weight * lateral_norm(lat, j, kInf, 2.0);
    }
  }
  return val;
}

inline double x_total(const DyadicLadder& lad, const SpaceTimeBlock& u, SReg reg) {
  double acc = 0;
  for (double lam : lad.lambdas()) {
    const double v = x_norm_band(lad, band_block(lad, u, lam), lam, reg);
    acc += v * v;
  }
  return std::sqrt(acc);
}

// D = L^2_t W^{1/2,4}_x.
inline double d_norm(const SpaceTimeBlock& u) {
  double acc = 0;
  for (const auto& s : u.snaps) {
    const double w = sobolev_w_norm(s, 0.5, 4.0);
    acc += w * w * u.dt;
  }
  return std::sqrt(acc);
}

// Upper bound for the G^s norm: minimum over the fixed decomposition family
// { F_2 = 0; F_2 = C_{>(l/K)^2} F_l; F_2 = P_{l,e_j} F_l } applied bandwise,
// of ( ||P_1 F||_{N_1}^2 + sum_l ||F_1,l||_{N_l}^2
//      + sum_j sum_l l^{2s-1} ||F_2,l||_{L^{1,2}_{e_j}}^2 )^{1/2}.
inline double g_norm_upper(const DyadicLadder& lad, const SpaceTimeBlock& f, SReg reg) {
  const double s = sreg_s(reg);
  double low_sq = 0;
  {
    const double v = n_norm(lad, band_block(lad, f, 1.0), 1.0, reg);
    low_sq = v * v;
  }
  double total_sq = 0;
  for (double lam : lad.lambdas()) {
    if (lam <= 1.0) continue;
    const SpaceTimeBlock fl = band_block(lad, f, lam);
    const double cut = detail::modulation_cut(lad, lam);
    const double wl = std::pow(lam, 2.0 * s - 1.0);

    auto lateral_cost = [&](const SpaceTimeBlock& f2) {
      double c = 0;
      for (int j = 0; j < f.grid.d; ++j) {
        const double v = lateral_norm(f2, j, 1.0, 2.0);
        c += wl * v * v;
      }
      return c;
    };

    // F_2 = 0
    double best;
    {
      const double v = n_norm(lad, fl, lam, reg);
      best = v * v;
    }
    // F_2 = high-modulation part
    {
      const SpaceTimeBlock hi = modulation_project(lad, fl, cut, ModKind::high);
      const SpaceTimeBlock lo = modulation_project(lad, fl, cut, ModKind::low);
      const double v1 = n_norm(lad, lo, lam, reg);
      best = std::min(best, v1 * v1 + lateral_cost(hi));
    }
    // F_2 = lateral part along one axis
    for (int j = 0; j < f.grid.d; ++j) {
      SpaceTimeBlock f2 = map_snapshots(
          fl, [&](const Field& g) { return lateral_project(lad, g, lam, j); });
      SpaceTimeBlock f1 = fl;
      for (int k = 0; k < fl.samples(); ++k) f1.snaps[k] -= f2.snaps[k];
      const double v1 = n_norm(lad, f1, lam, reg);
      best = std::min(best, v1 * v1 + lateral_cost(f2));
    }
    total_sq += best;
  }
  return std::sqrt(low_sq + total_sq);
}

// --- Duhamel integrators on blocks ------------------------------------------

// J_0[h](t_k) = -i sum_{j<k} e^{i (t_k - s_j) |nabla|} h(s_j) dt  (left point).
inline SpaceTimeBlock wave_duhamel(const SpaceTimeBlock& h) {
  SpaceTimeBlock out(h.grid, h.t0, h.dt, h.samples(), Rep::spectral);
  Field acc(h.grid, Rep::spectral);
  for (int k = 0; k < h.samples(); ++k) {
    out.snaps[k] = acc;
    Field term = to_rep(h.snaps[k], Rep::spectral) * cplx{0.0, -h.dt};
    acc += term;
    acc = wave_propagate(acc, h.dt);
  }
  return out;
}

// I_0[g](t_k) for the Schrodinger group.
inline SpaceTimeBlock schrodinger_duhamel(const SpaceTimeBlock& g) {
  SpaceTimeBlock out(g.grid, g.t0, g.dt, g.samples(), Rep::spectral);
  Field acc(g.grid, Rep::spectral);
  for (int k = 0; k < g.samples(); ++k) {
    out.snaps[k] = acc;
    Field term = to_rep(g.snaps[k], Rep::spectral) * cplx{0.0, -g.dt};
    acc += term;
    acc = schrodinger_propagate(acc, g.dt);
  }
  return out;
}

// --- empirical constant sweeps ----------------------------------------------

struct EstimateRow {
  std::string estimate;
  double parameter = 0;  // band, window length, or sweep index
  double ratio = 0;      // observed left/right
};

// Window tuned so that the modulation structure at band lambda is resolvable:
// tau range (2 lambda)^2 with margin, M snapshots.
inline SpaceTimeBlock free_schrodinger_block(const Grid& g, const Field& f_spec,
                                             double lambda, int m = 64) {
  const double dt = kPi / (8.0 * lambda * lambda);
  return sample_block(g, 0.0, dt, m, [&](double t) {
    return schrodinger_propagate(f_spec, t);
  });
}

// ||e^{it Delta} f_l||_{S^{s,a}_l} / (l^s ||f_l||_{L^2}) over the ladder.
inline std::vector<EstimateRow> sweep_free_schrodinger(const DyadicLadder& lad, SReg reg,
                                                       std::uint64_t seed) {
  std::vector<EstimateRow> rows;
  const Grid& g = lad.grid();
  for (double lam : lad.lambdas()) {
    Field f = random_band_limited(g, 2.0 * lam, seed, std::uint64_t(lam));
    f = lp_project(lad, f, lam, BandKind::band);
    const double ref = l2_norm(f);
    if (ref == 0.0) continue;
    SpaceTimeBlock b = taper_time(free_schrodinger_block(g, f, lam), 0.25);
    rows.push_back({"free_schrodinger_S", lam,
                    s_norm(lad, b, lam, reg) / (std::pow(lam, sreg_s(reg)) * ref)});
  }
  return rows;
}

// ||e^{it|nabla|} g||_Y / ||g||_{L^2}.
inline std::vector<EstimateRow> sweep_free_wave(const DyadicLadder& lad, std::uint64_t seed) {
  std::vector<EstimateRow> rows;
  const Grid& g = lad.grid();
  for (double lam : lad.lambdas()) {
    Field f = random_band_limited(g, 2.0 * lam, seed, 100 + std::uint64_t(lam));
    f = lp_project(lad, f, lam, BandKind::band);
    const double ref = l2_norm(f);
    if (ref == 0.0) continue;
    const double dt = kPi / (8.0 * lam * lam);
    SpaceTimeBlock b = taper_time(
        sample_block(g, 0.0, dt, 64, [&](double t) { return wave_propagate(f, t); }),
        0.25);
    rows.push_back({"free_wave_Y", lam, wave_norm(lad, b, lam, WaveReg::quarter_half) / ref});
  }
  return rows;
}

// Random block with S-norm-friendly content: a superposition of free waves
// with band-limited random data, tapered.
inline SpaceTimeBlock random_free_block(const DyadicLadder& lad, double dt, int m,
                                        std::uint64_t seed, double amp = 1.0) {
  const Grid& g = lad.grid();
  Field f = random_band_limited(g, 0.9 * g.xi_max(), seed);
  f *= cplx{amp, 0.0};
  return taper_time(
      sample_block(g, 0.0, dt, m, [&](double t) { return schrodinger_propagate(f, t); }),
      0.25);
}

inline Field scalar_times(const Field& f, double s) { return f * cplx{s, 0.0}; }

// Trilinear wave estimate: ratio of ||J_0[h |nabla|(conj(phi) psi)]||_{W^{0,1/4,1/2}}
// against (||h||_{L^6} + ||h||_{B^{1/8}_{6,inf}}) ||phi||_{S^{1,1/4}} ||psi||_{S^{1,1/4}};
// the caller supplies the h-norm factor so the h = 1 case reduces exactly to
// the bilinear wave estimate table.
inline double trilinear_wave_ratio(const DyadicLadder& lad, const SpaceTimeBlock& phi,
                                   const SpaceTimeBlock& psi,
                                   const std::vector<double>& h, double h_norm_factor) {
  if (static_cast<int>(h.size()) != phi.samples())
    throw std::invalid_argument("trilinear_wave_ratio: h must match the time mesh");
  SpaceTimeBlock prod(phi.grid, phi.t0, phi.dt, phi.samples(), Rep::physical);
  for (int k = 0; k < phi.samples(); ++k) {
    Field a = to_rep(phi.snaps[k], Rep::physical);
    Field b = to_rep(psi.snaps[k], Rep::physical);
    for (std::size_t i = 0; i < a.data.size(); ++i)
      a.data[i] = std::conj(a.data[i]) * b.data[i] * h[k];
    prod.snaps[k] = abs_grad_pow(a, 1.0);
  }
  const double left = y_total(lad, wave_duhamel(prod));
  const double right = h_norm_factor * s_total(lad, phi, SReg::energy) *
                       s_total(lad, psi, SReg::energy);
  return left / right;
}

// Strang integration of i d_t u + Delta u - Re(v_L) u = 0 with the free-wave
// potential v_L(t) = e^{it|nabla|} v0; returns the sampled solution block.
inline SpaceTimeBlock potential_schrodinger_block(const Grid& g, const Field& v0,
                                                  const Field& u0, double dt, int m) {
  SpaceTimeBlock out(g, 0.0, dt, m, Rep::spectral);
  Field u = to_rep(u0, Rep::spectral);
  FftNd fft(g);
  for (int k = 0; k < m; ++k) {
    out.snaps[k] = u;
    u = schrodinger_propagate(u, 0.5 * dt);
    Field v = fft_inverse(wave_propagate(to_rep(v0, Rep::spectral), (k + 0.5) * dt));
    std::vector<cplx> up = u.data;
    fft.inverse(up);
    for (std::size_t i = 0; i < up.size(); ++i)
      up[i] *= std::polar(1.0, -dt * v.data[i].real());
    fft.forward(up);
    u.data = std::move(up);
    u = schrodinger_propagate(u, 0.5 * dt);
  }
  return out;
}

// Uniform-estimate sweep (free-wave potentials below the wave mass bound B):
// observed ratio ||u||_{S^{1/2,0}} / (||u_0||_{H^{1/2}} + |I|^{1/2}) per sample.
inline std::vector<EstimateRow> sweep_uniform_estimate(const DyadicLadder& lad, double B,
                                                       int samples, std::uint64_t seed) {
  std::vector<EstimateRow> rows;
  const Grid& g = lad.grid();
  const double dt = 0.025;
  const int m = 64;
  for (int s = 0; s < samples; ++s) {
    Field v0 = random_band_limited(g, 0.45 * g.xi_max(), seed, 2 * s);
    const double nv = l2_norm(v0);
    if (nv > 0) v0 *= cplx{B * rng::uniform(seed, 7, s, 0, 0) / nv, 0.0};
    Field u0 = random_band_limited(g, 0.45 * g.xi_max(), seed, 2 * s + 1);
    const double nu = sobolev_h_norm(u0, 1.0);
    if (nu > 0) u0 *= cplx{1.0 / nu, 0.0};
    SpaceTimeBlock u = taper_time(potential_schrodinger_block(g, v0, u0, dt, m), 0.25);
    const double denom = sobolev_h_norm(u0, 0.5) + std::sqrt(m * dt);
    rows.push_back({"uniform_estimate", double(s),
                    s_total(lad, u, SReg::endpoint) / denom});
  }
  return rows;
}

// Window scaling of ||e^{it Delta} u_0||_{D(I)} / (|I|^{1/4} ||u_0||_{H^1}):
// on the torus the left side scales like |I|^{1/2}, so the observed ratio
// scales like |I|^{1/4}; returns (|I|, ratio) rows for a log-log slope fit.
inline std::vector<EstimateRow> sweep_profile_window_scaling(const Grid& g,
                                                             std::uint64_t seed,
                                                             int levels = 5) {
  std::vector<EstimateRow> rows;
  Field u0 = random_band_limited(g, 0.5 * g.xi_max(), seed);
  const double h1 = sobolev_h_norm(u0, 1.0);
  const int m = 32;
  double T = 1.0;
  for (int l = 0; l < levels; ++l) {
    SpaceTimeBlock b = sample_block(g, 0.0, T / m, m, [&](double t) {
      return schrodinger_propagate(u0, t);
    });
    rows.push_back({"profile_window_scaling", T,
                    d_norm(b) / (std::pow(T, 0.25) * h1)});
    T *= 0.5;
  }
  return rows;
}

inline double loglog_slope(const std::vector<EstimateRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(r.parameter), y = std::log(r.ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace zlab
