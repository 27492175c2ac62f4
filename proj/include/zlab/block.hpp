#pragma once

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "zlab/field.hpp"
#include "zlab/ladder.hpp"

namespace zlab {

// A field sampled on a uniform time mesh t0 + k*dt, k = 0..M-1.
struct SpaceTimeBlock {
  Grid grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Field> snaps;

  SpaceTimeBlock() = default;
  SpaceTimeBlock(const Grid& g, double t0_, double dt_, int m, Rep rep)
      : grid(g), t0(t0_), dt(dt_) {
    if (m < 1) throw std::invalid_argument("SpaceTimeBlock: need >= 1 snapshot");
    if (!(dt_ > 0.0)) throw std::invalid_argument("SpaceTimeBlock: dt must be positive");
    snaps.assign(static_cast<std::size_t>(m), Field(g, rep));
  }

  int samples() const { return static_cast<int>(snaps.size()); }
  double time(int k) const { return t0 + k * dt; }
  double window_length() const { return samples() * dt; }
};

template <typename F>
SpaceTimeBlock sample_block(const Grid& g, double t0, double dt, int m, F&& state_at) {
  SpaceTimeBlock b;
  b.grid = g;
  b.t0 = t0;
  b.dt = dt;
  for (int k = 0; k < m; ++k) b.snaps.push_back(state_at(t0 + k * dt));
  return b;
}

// Smooth plateau taper in time: exactly 1 on the middle of the window, smooth
// mollifier ramps over ramp_fraction of the window at each end.
inline SpaceTimeBlock taper_time(const SpaceTimeBlock& b, double ramp_fraction = 0.125) {
  const int m = b.samples();
  if (m < 2) throw std::invalid_argument("taper_time: need >= 2 snapshots");
  const double ramp = ramp_fraction * (m - 1);
  SpaceTimeBlock out = b;
  for (int k = 0; k < m; ++k) {
    const double up = detail::mollifier_step(ramp > 0 ? k / ramp : 1.0);
    const double down = detail::mollifier_step(ramp > 0 ? (m - 1 - k) / ramp : 1.0);
    out.snaps[k] *= cplx{up * down, 0.0};
  }
  return out;
}

namespace detail {

inline int next_pow2(int m) {
  int p = 1;
  while (p < m) p <<= 1;
  return p;
}

}  // namespace detail

// Space-time Fourier multiplier: symbol(tau, xi2). Temporal transform uses the
// window zero-padded by at least one block length (rounded to a power of two),
// so complementary multipliers recompose the input exactly.
template <typename SymbolFn>
SpaceTimeBlock apply_spacetime_multiplier(const SpaceTimeBlock& b, SymbolFn&& symbol) {
  const int m = b.samples();
  if (m < 2) throw std::invalid_argument("space-time multiplier: need >= 2 snapshots");
  const int pad = detail::next_pow2(2 * m);
  const std::size_t nsp = b.grid.size();

  std::vector<cplx> a(static_cast<std::size_t>(pad) * nsp, cplx{0.0, 0.0});
  for (int k = 0; k < m; ++k) {
    const Field s = to_rep(b.snaps[k], Rep::spectral);
    std::memcpy(a.data() + static_cast<std::size_t>(k) * nsp, s.data.data(),
                nsp * sizeof(cplx));
  }

  Fft1d fft(pad);
  std::vector<cplx> line(static_cast<std::size_t>(pad));
  const double dtau = 2.0 * kPi / (pad * b.dt);
  std::vector<double> tau(static_cast<std::size_t>(pad));
  for (int j = 0; j < pad; ++j) tau[j] = dtau * (j < pad / 2 ? j : j - pad);

  std::vector<double> xi2(nsp);
  for (std::size_t i = 0; i < nsp; ++i) xi2[i] = b.grid.xi_abs2(i);

  for (std::size_t i = 0; i < nsp; ++i) {
    for (int j = 0; j < pad; ++j) line[j] = a[static_cast<std::size_t>(j) * nsp + i];
    fft.forward(line.data());
    const double scale = 1.0 / pad;
    for (int j = 0; j < pad; ++j) line[j] *= scale * symbol(tau[j], xi2[i]);
    fft.inverse(line.data());
    for (int j = 0; j < pad; ++j) a[static_cast<std::size_t>(j) * nsp + i] = line[j];
  }

  SpaceTimeBlock out(b.grid, b.t0, b.dt, m, Rep::spectral);
  for (int k = 0; k < m; ++k) {
    std::memcpy(out.snaps[k].data.data(), a.data() + static_cast<std::size_t>(k) * nsp,
                nsp * sizeof(cplx));
    if (b.snaps[k].rep == Rep::physical) out.snaps[k] = fft_inverse(out.snaps[k]);
  }
  return out;
}

enum class ModKind { band, low, high };

namespace detail {

inline void check_dyadic(double lambda) {
  const double l = std::log2(lambda);
  if (!(lambda > 0.0) || std::abs(l - std::round(l)) > 1e-12)
    throw std::invalid_argument("modulation scale must be dyadic");
}

inline double mod_profile(const DyadicLadder& lad, double r, double lambda, ModKind kind) {
  switch (kind) {
    case ModKind::band:
      return lad.chi_band(r, lambda);
    case ModKind::low:
      return lad.chi_low(r, lambda);
    case ModKind::high:
      return 1.0 - lad.chi_low(r, lambda);
  }
  return 0.0;
}

}  // namespace detail

// C_lambda and friends: localization in |tau + |xi|^2| (distance to the
// Schrodinger paraboloid).
inline SpaceTimeBlock modulation_project(const DyadicLadder& lad, const SpaceTimeBlock& b,
                                         double lambda, ModKind kind) {
  if (b.samples() < 4)
    throw std::invalid_argument("modulation_project: need >= 4 time samples");
  detail::check_dyadic(lambda);
  return apply_spacetime_multiplier(b, [&lad, lambda, kind](double tau, double xi2) {
    return cplx{detail::mod_profile(lad, std::abs(tau + xi2), lambda, kind), 0.0};
  });
}

// P^(t)_lambda and friends: localization in |tau|.
inline SpaceTimeBlock temporal_project(const DyadicLadder& lad, const SpaceTimeBlock& b,
                                       double lambda, ModKind kind) {
  if (b.samples() < 4)
    throw std::invalid_argument("temporal_project: need >= 4 time samples");
  detail::check_dyadic(lambda);
  return apply_spacetime_multiplier(b, [&lad, lambda, kind](double tau, double) {
    return cplx{detail::mod_profile(lad, std::abs(tau), lambda, kind), 0.0};
  });
}

// (i d/dt + Delta) u, symbol -(tau + |xi|^2).
inline SpaceTimeBlock schrodinger_operator(const SpaceTimeBlock& b) {
  return apply_spacetime_multiplier(
      b, [](double tau, double xi2) { return cplx{-(tau + xi2), 0.0}; });
}

// (i d/dt + |nabla|) v, symbol |xi| - tau.
inline SpaceTimeBlock halfwave_operator(const SpaceTimeBlock& b) {
  return apply_spacetime_multiplier(
      b, [](double tau, double xi2) { return cplx{std::sqrt(xi2) - tau, 0.0}; });
}

// Weight ((lambda + |tau|) / (lambda^2 + |tau|))^a.
inline SpaceTimeBlock modulation_weight(const SpaceTimeBlock& b, double lambda, double a) {
  return apply_spacetime_multiplier(b, [lambda, a](double tau, double) {
    return cplx{std::pow((lambda + std::abs(tau)) / (lambda * lambda + std::abs(tau)), a),
                0.0};
  });
}

// Weight (lambda + |tau|)^a.
inline SpaceTimeBlock shifted_tau_weight(const SpaceTimeBlock& b, double lambda, double a) {
  return apply_spacetime_multiplier(b, [lambda, a](double tau, double) {
    return cplx{std::pow(lambda + std::abs(tau), a), 0.0};
  });
}

// Per-snapshot spatial map.
template <typename FieldFn>
SpaceTimeBlock map_snapshots(const SpaceTimeBlock& b, FieldFn&& fn) {
  SpaceTimeBlock out = b;
  for (auto& s : out.snaps) s = fn(s);
  return out;
}

// --- space-time norms -----------------------------------------------------

// L^q in time (rectangle rule) of L^p in space; q = inf -> max over snapshots.
inline double lqt_lpx_norm(const SpaceTimeBlock& b, double q, double p) {
  const bool qinf = q == std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (const auto& s : b.snaps) {
    const double v = p == 2.0 ? l2_norm(s) : lp_norm(s, p);
    if (qinf)
      acc = std::max(acc, v);
    else
      acc += std::pow(v, q) * b.dt;
  }
  return qinf ? acc : std::pow(acc, 1.0 / q);
}

inline double l2_spacetime_norm(const SpaceTimeBlock& b) { return lqt_lpx_norm(b, 2.0, 2.0); }

// Lateral norm L^{p,q}_e: outer L^p over planes orthogonal to axis e, inner
// L^q over time and the transverse variables.
inline double lateral_norm(const SpaceTimeBlock& b, int axis, double p, double q) {
  if (axis < 0 || axis >= b.grid.d) throw std::invalid_argument("lateral_norm: bad axis");
  const int n = b.grid.n;
  const double dxw = b.grid.dx();
  const double transverse_w = std::pow(dxw, b.grid.d - 1) * b.dt;
  const bool pinf = p == std::numeric_limits<double>::infinity();
  const bool qinf = q == std::numeric_limits<double>::infinity();

  std::vector<double> inner(static_cast<std::size_t>(n), 0.0);
  for (const auto& snap : b.snaps) {
    const Field s = to_rep(snap, Rep::physical);
    const std::size_t total = s.grid.size();
    for (std::size_t i = 0; i < total; ++i) {
      const int r = s.grid.unravel(i)[axis];
      const double av = std::abs(s.data[i]);
      if (qinf)
        inner[r] = std::max(inner[r], av);
      else
        inner[r] += std::pow(av, q) * transverse_w;
    }
  }
  double acc = 0.0;
  for (int r = 0; r < n; ++r) {
    const double iv = qinf ? inner[r] : std::pow(inner[r], 1.0 / q);
    if (pinf)
      acc = std::max(acc, iv);
    else
      acc += std::pow(iv, p) * dxw;
  }
  return pinf ? acc : std::pow(acc, 1.0 / p);
}

// --- serialization --------------------------------------------------------
// "ZLB1", u32 d, u32 n, f64 L, u32 rep, u32 M, f64 t0, f64 dt, then M
// snapshots of raw complex doubles.

inline void save_block(const std::string& path, const SpaceTimeBlock& b) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_block: cannot open " + path);
  os.write("ZLB1", 4);
  const std::uint32_t d = static_cast<std::uint32_t>(b.grid.d);
  const std::uint32_t n = static_cast<std::uint32_t>(b.grid.n);
  const std::uint32_t rep = static_cast<std::uint32_t>(b.snaps.at(0).rep);
  const std::uint32_t m = static_cast<std::uint32_t>(b.samples());
  os.write(reinterpret_cast<const char*>(&d), 4);
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&b.grid.L), 8);
  os.write(reinterpret_cast<const char*>(&rep), 4);
  os.write(reinterpret_cast<const char*>(&m), 4);
  os.write(reinterpret_cast<const char*>(&b.t0), 8);
  os.write(reinterpret_cast<const char*>(&b.dt), 8);
  for (const auto& s : b.snaps)
    os.write(reinterpret_cast<const char*>(s.data.data()),
             static_cast<std::streamsize>(s.data.size() * sizeof(cplx)));
}

inline SpaceTimeBlock load_block(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_block: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "ZLB1", 4) != 0)
    throw std::runtime_error("load_block: bad magic");
  std::uint32_t d = 0, n = 0, rep = 0, m = 0;
  double L = 0, t0 = 0, dt = 0;
  is.read(reinterpret_cast<char*>(&d), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&rep), 4);
  is.read(reinterpret_cast<char*>(&m), 4);
  is.read(reinterpret_cast<char*>(&t0), 8);
  is.read(reinterpret_cast<char*>(&dt), 8);
  SpaceTimeBlock b(Grid(static_cast<int>(d), static_cast<int>(n), L), t0, dt,
                   static_cast<int>(m), static_cast<Rep>(rep));
  for (auto& s : b.snaps) {
    is.read(reinterpret_cast<char*>(s.data.data()),
            static_cast<std::streamsize>(s.data.size() * sizeof(cplx)));
  }
  if (!is) throw std::runtime_error("load_block: truncated data");
  return b;
}

}  // namespace zlab
