#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zlab/groundstate.hpp"
#include "zlab/noise.hpp"

namespace zlab {

enum class Frame { direct, rescaled_conservative, rescaled_nonconservative };

// (X,Y) in the direct frame, (u,v) in the conservative rescaled frame,
// (z,v) in the non-conservative one. t is absolute time; sigma is the
// restart offset of a refined-rescaling frame (0 for the plain one).
struct ZakharovState {
  Field X, Y;
  double t = 0.0;
  Frame frame = Frame::direct;
  double sigma = 0.0;
};

enum class Outcome { global, blowup, undecided };

struct DiagnosticsRow {
  double t = 0;
  double mass = 0;     // ||X||_{L^2}^2
  double energy = 0;   // e_Z(X, Y)
  double h1_X = 0;
  double l2_Y = 0;
  double d_accum = 0;  // sqrt(int_0^t ||X||_{W^{1/2,4}}^2)
};

struct Trajectory {
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<ZakharovState> checkpoints;
  Outcome outcome = Outcome::undecided;
  double blowup_time = -1.0;
};

struct BlowupThresholds {
  double m_blow = 0.0;  // absolute threshold on ||X||_{H^1} + ||Y||_{L^2}; 0 = auto
  double m_blow_factor = 1e3;  // auto: factor times the initial norm
  double d_blow = 1e3;
};

// --- frame transforms -------------------------------------------------------

inline Field exp_field(const Field& w, double scale = 1.0) {
  Field out = w;
  for (auto& z : out.data) z = std::exp(scale * z);
  return out;
}

// u = e^{-W_1(t)} X, v = Y - T_t(W_2).
inline ZakharovState to_rescaled_conservative(const ZakharovState& s, const NoiseModel& m,
                                              const NoisePath& p) {
  if (s.frame != Frame::direct)
    throw std::invalid_argument("to_rescaled_conservative: direct frame required");
  ZakharovState out;
  out.t = s.t;
  out.frame = Frame::rescaled_conservative;
  const Field w1 = w1_field(m, p, s.t);
  out.X = pointwise_product(exp_field(w1, -1.0), to_rep(s.X, Rep::physical));
  out.Y = to_rep(s.Y, Rep::spectral) - stochastic_convolution(m, p, s.t);
  return out;
}

// X = e^{W_1(t)} u, Y = v + T_t(W_2).
inline ZakharovState to_direct_from_conservative(const ZakharovState& s, const NoiseModel& m,
                                                 const NoisePath& p) {
  if (s.frame != Frame::rescaled_conservative || s.sigma != 0.0)
    throw std::invalid_argument("to_direct: plain conservative rescaled frame required");
  ZakharovState out;
  out.t = s.t;
  out.frame = Frame::direct;
  const Field w1 = w1_field(m, p, s.t);
  out.X = pointwise_product(exp_field(w1, +1.0), to_rep(s.X, Rep::physical));
  out.Y = to_rep(s.Y, Rep::spectral) + stochastic_convolution(m, p, s.t);
  return out;
}

// z = e^{mu_hat t - W_1(t)} X, v = Y.
inline ZakharovState to_rescaled_nonconservative(const ZakharovState& s, const NoiseModel& m,
                                                 const NoisePath& p) {
  if (s.frame != Frame::direct)
    throw std::invalid_argument("to_rescaled_nonconservative: direct frame required");
  ZakharovState out;
  out.t = s.t;
  out.frame = Frame::rescaled_nonconservative;
  Field factor = w1_field(m, p, s.t);  // W_1(t)
  for (std::size_t i = 0; i < factor.data.size(); ++i)
    factor.data[i] = std::exp(m.mu_hat.data[i] * s.t - factor.data[i]);
  out.X = pointwise_product(factor, to_rep(s.X, Rep::physical));
  out.Y = s.Y;
  return out;
}

inline ZakharovState to_direct_from_nonconservative(const ZakharovState& s, const NoiseModel& m,
                                                    const NoisePath& p) {
  if (s.frame != Frame::rescaled_nonconservative)
    throw std::invalid_argument("to_direct: nonconservative rescaled frame required");
  ZakharovState out;
  out.t = s.t;
  out.frame = Frame::direct;
  Field factor = w1_field(m, p, s.t);
  for (std::size_t i = 0; i < factor.data.size(); ++i)
    factor.data[i] = std::exp(factor.data[i] - m.mu_hat.data[i] * s.t);
  out.X = pointwise_product(factor, to_rep(s.X, Rep::physical));
  out.Y = s.Y;
  return out;
}

// Refined rescaling restart at time sigma (Prop. 2.3 forward map):
// u_sigma(0) = e^{W_1(sigma)} u(sigma), v_sigma(0) = v(sigma) + T_sigma(W_2).
inline ZakharovState refined_restart(const ZakharovState& s, double sigma, const NoiseModel& m,
                                     const NoisePath& p) {
  if (s.frame != Frame::rescaled_conservative || s.sigma != 0.0)
    throw std::invalid_argument("refined_restart: plain conservative rescaled frame required");
  p.mesh_index(sigma);  // reject off-mesh sigma
  if (std::abs(s.t - sigma) > 1e-12)
    throw std::invalid_argument("refined_restart: state must sit at t = sigma");
  ZakharovState out;
  out.t = sigma;
  out.sigma = sigma;
  out.frame = Frame::rescaled_conservative;
  const Field w1 = w1_field(m, p, sigma);
  out.X = pointwise_product(exp_field(w1, +1.0), to_rep(s.X, Rep::physical));
  out.Y = to_rep(s.Y, Rep::spectral) + stochastic_convolution(m, p, sigma);
  return out;
}

// Inverse of the restart map at absolute time t >= sigma:
// u(t) = e^{-W_1(sigma)} u_sigma, v(t) = v_sigma - e^{i(t-sigma)|nabla|} T_sigma(W_2).
inline ZakharovState restart_inverse(const ZakharovState& s, const NoiseModel& m,
                                     const NoisePath& p) {
  if (s.frame != Frame::rescaled_conservative)
    throw std::invalid_argument("restart_inverse: conservative rescaled frame required");
  ZakharovState out;
  out.t = s.t;
  out.sigma = 0.0;
  out.frame = Frame::rescaled_conservative;
  const Field w1 = w1_field(m, p, s.sigma);
  out.X = pointwise_product(exp_field(w1, -1.0), to_rep(s.X, Rep::physical));
  out.Y = to_rep(s.Y, Rep::spectral) -
          wave_propagate(stochastic_convolution(m, p, s.sigma), s.t - s.sigma);
  return out;
}

// Map a sigma-frame trajectory back and append it to a plain-frame one.
inline Trajectory glue(const Trajectory& base, const Trajectory& restarted, double sigma,
                       const NoiseModel& m, const NoisePath& p) {
  Trajectory out = base;
  for (const auto& cp : restarted.checkpoints) {
    if (cp.t < sigma - 1e-12) continue;
    out.checkpoints.push_back(restart_inverse(cp, m, p));
  }
  for (const auto& row : restarted.diagnostics)
    if (row.t > sigma + 1e-12) out.diagnostics.push_back(row);
  out.outcome = restarted.outcome;
  out.blowup_time = restarted.blowup_time;
  return out;
}

// --- time stepper -----------------------------------------------------------

// Strang-split integrator bound to (grid, model, path, dt, frame). Holds the
// multiplier tables and the running stochastic convolution; one instance per
// worker. States are carried spectrally.
class Stepper {
 public:
  Stepper(const NoiseModel& model, const NoisePath& path, double dt, Frame frame,
          double sigma = 0.0)
      : model_(model), path_(path), dt_(dt), frame_(frame), sigma_(sigma) {
    const double ratio = dt / path.dt();
    substeps_ = static_cast<long>(std::llround(ratio));
    if (substeps_ < 1 || std::abs(ratio - substeps_) > 1e-9)
      throw std::invalid_argument("Stepper: dt must be a multiple of the path mesh");
    const Grid& g = model.grid;
    const std::size_t total = g.size();
    xi2_.resize(total);
    absxi_.resize(total);
    schro_half_.resize(total);
    wave_half_.resize(total);
    dealias_keep_.resize(total);
    const int cut = g.n / 3;
    for (std::size_t i = 0; i < total; ++i) {
      xi2_[i] = g.xi_abs2(i);
      absxi_[i] = std::sqrt(xi2_[i]);
      schro_half_[i] = std::polar(1.0, -0.5 * dt * xi2_[i]);
      wave_half_[i] = std::polar(1.0, 0.5 * dt * absxi_[i]);
      bool keep = true;
      auto ix = g.unravel(i);
      for (int a = 0; a < g.d; ++a) {
        const int k = g.freq_int(ix[a]);
        if (k > cut || k < -cut) keep = false;
      }
      dealias_keep_[i] = keep;
    }
    conv_ = Field(g, Rep::spectral);
    fft_ = std::make_unique<FftNd>(g);
  }

  double dt() const { return dt_; }
  Frame frame() const { return frame_; }
  const NoiseModel& model() const { return model_; }
  const NoisePath& path() const { return path_; }

  // Running stochastic convolution T_{sigma + t, sigma}(W_2) at the stepper's
  // current position (advanced by step()); spectral rep.
  const Field& convolution() const { return conv_; }

  ZakharovState step(const ZakharovState& s) {
    if (s.frame != frame_) throw std::invalid_argument("Stepper: frame mismatch");
    ZakharovState out = s;
    out.X = to_rep(s.X, Rep::spectral);
    out.Y = to_rep(s.Y, Rep::spectral);

    half_linear(out);
    switch (frame_) {
      case Frame::direct:
        nonlinear_direct(out);
        noise_direct(out);
        break;
      case Frame::rescaled_conservative:
        nonlinear_conservative(out);
        advance_convolution(out.t);
        break;
      case Frame::rescaled_nonconservative:
        nonlinear_nonconservative(out);
        break;
    }
    half_linear(out);
    out.t = s.t + dt_;
    if (!out.X.finite() || !out.Y.finite()) blown_ = true;
    return out;
  }

  bool blown() const { return blown_; }

 private:
  const NoiseModel& model_;
  const NoisePath& path_;
  double dt_;
  Frame frame_;
  double sigma_;
  long substeps_;
  std::vector<double> xi2_, absxi_;
  std::vector<cplx> schro_half_, wave_half_;
  std::vector<char> dealias_keep_;
  Field conv_;  // spectral running T_{sigma+t,sigma}(W_2)
  double conv_time_ = -1.0;
  std::unique_ptr<FftNd> fft_;
  bool blown_ = false;

  void half_linear(ZakharovState& s) const {
    for (std::size_t i = 0; i < s.X.data.size(); ++i) {
      s.X.data[i] *= schro_half_[i];
      s.Y.data[i] *= wave_half_[i];
    }
  }

  // Sum of base-mesh increments covering [t, t+dt).
  double beta_increment(int j, int k, double t) const {
    const long base = path_.mesh_index(t);
    double acc = 0.0;
    for (long s = 0; s < substeps_; ++s) acc += path_.increment(j, k, base + s);
    return acc;
  }

  void wave_forcing(ZakharovState& s, const std::vector<cplx>& qhat, double gain) {
    for (std::size_t i = 0; i < qhat.size(); ++i)
      if (dealias_keep_[i])
        s.Y.data[i] += cplx{0.0, gain * dt_ * absxi_[i]} * qhat[i];
  }

  void nonlinear_direct(ZakharovState& s) {
    std::vector<cplx> x = s.X.data;
    fft_->inverse(x);
    std::vector<cplx> y = s.Y.data;
    fft_->inverse(y);
    std::vector<cplx> q(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      q[i] = cplx{std::norm(x[i]), 0.0};
      x[i] *= std::polar(1.0, -dt_ * y[i].real());
    }
    fft_->forward(q);
    wave_forcing(s, q, 1.0);
    phys_x_ = std::move(x);
  }

  void noise_direct(ZakharovState& s) {
    std::vector<cplx>& x = phys_x_;
    if (!model_.modes1.empty()) {
      // Exact pathwise factor e^{dW_1 - mu_hat dt}.
      std::vector<cplx> expo(x.size(), cplx{0.0, 0.0});
      for (std::size_t k = 0; k < model_.modes1.size(); ++k) {
        const double db = beta_increment(0, static_cast<int>(k), s.t);
        const cplx idb{0.0, db};
        for (std::size_t i = 0; i < x.size(); ++i)
          expo[i] += idb * model_.modes1[k].data[i];
      }
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] *= std::exp(expo[i] - model_.mu_hat.data[i] * dt_);
    }
    fft_->forward(x);
    s.X.data = std::move(x);
    // Y <- Y - i dW_2 = Y + sum phi_k dbeta_k.
    for (std::size_t k = 0; k < model_.modes2.size(); ++k) {
      const double db = beta_increment(1, static_cast<int>(k), s.t);
      for (std::size_t i = 0; i < s.Y.data.size(); ++i)
        s.Y.data[i] += db * model_.modes2_spec[k].data[i];
    }
  }

  void nonlinear_conservative(ZakharovState& s) {
    const Grid& g = model_.grid;
    const std::size_t total = g.size();
    std::vector<cplx> u = s.X.data;
    fft_->inverse(u);
    std::vector<cplx> v = s.Y.data;
    fft_->inverse(v);

    // Frozen coefficients at the step's start, from increments after sigma.
    auto co = lower_order_coeffs(model_, path_, s.t - sigma_, sigma_);
    std::vector<cplx> tconv;
    if (!model_.modes2.empty()) {
      sync_convolution(s.t);
      tconv = conv_.data;
      fft_->inverse(tconv);
    }

    // b . grad u, assembled pointwise and dealiased as a forcing.
    std::vector<cplx> bgrad(total, cplx{0.0, 0.0});
    if (!model_.modes1.empty()) {
      std::vector<cplx> du(total);
      for (int a = 0; a < g.d; ++a) {
        for (std::size_t i = 0; i < total; ++i)
          du[i] = s.X.data[i] * cplx{0.0, g.xi(i)[a]};
        fft_->inverse(du);
        for (std::size_t i = 0; i < total; ++i) bgrad[i] += co.b[a].data[i] * du[i];
      }
      fft_->forward(bgrad);
      for (std::size_t i = 0; i < total; ++i)
        if (!dealias_keep_[i]) bgrad[i] = cplx{0.0, 0.0};
    }

    std::vector<cplx> q(total);
    for (std::size_t i = 0; i < total; ++i) {
      q[i] = cplx{std::norm(u[i]), 0.0};
      cplx scalar = cplx{v[i].real(), 0.0} - co.c.data[i];
      if (!tconv.empty()) scalar += cplx{tconv[i].real(), 0.0};
      u[i] *= std::exp(cplx{0.0, -dt_} * scalar);
    }
    fft_->forward(u);
    for (std::size_t i = 0; i < total; ++i)
      u[i] += cplx{0.0, dt_} * bgrad[i];
    s.X.data = std::move(u);

    fft_->forward(q);
    wave_forcing(s, q, 1.0);
  }

  void nonlinear_nonconservative(ZakharovState& s) {
    double c = 0.0;
    if (!model_.modes1.empty()) c = model_.modes1[0].data[0].imag();
    const double h = geometric_bm(path_, c, s.t);
    std::vector<cplx> z = s.X.data;
    fft_->inverse(z);
    std::vector<cplx> v = s.Y.data;
    fft_->inverse(v);
    std::vector<cplx> q(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      q[i] = cplx{std::norm(z[i]), 0.0};
      z[i] *= std::polar(1.0, -dt_ * v[i].real());
    }
    fft_->forward(q);
    wave_forcing(s, q, h);
    fft_->forward(z);
    s.X.data = std::move(z);
  }

  // Advance T_{sigma+t,sigma} from the stepper's last position to time t+dt:
  // T(t+dt) = e^{i dt |nabla|} (T(t) + (-i) dW_2(t)).
  void advance_convolution(double t) {
    if (model_.modes2.empty()) return;
    sync_convolution(t);
    for (std::size_t k = 0; k < model_.modes2.size(); ++k) {
      const double db = beta_increment(1, static_cast<int>(k), t);
      for (std::size_t i = 0; i < conv_.data.size(); ++i)
        conv_.data[i] += db * model_.modes2_spec[k].data[i];
    }
    for (std::size_t i = 0; i < conv_.data.size(); ++i)
      conv_.data[i] *= std::polar(1.0, dt_ * absxi_[i]);
    conv_time_ = t + dt_;
  }

  void sync_convolution(double t) {
    if (conv_time_ == t) return;
    conv_ = stochastic_convolution(model_, path_, t - sigma_, sigma_);
    conv_time_ = t;
  }

  std::vector<cplx> phys_x_;
};

// One-shot convenience wrappers over Stepper.
inline ZakharovState step_direct(const ZakharovState& s, const NoiseModel& m,
                                 const NoisePath& p, double dt) {
  Stepper st(m, p, dt, Frame::direct);
  return st.step(s);
}

inline ZakharovState step_rescaled(const ZakharovState& s, const NoiseModel& m,
                                   const NoisePath& p, double dt) {
  if (s.frame == Frame::direct)
    throw std::invalid_argument("step_rescaled: rescaled frame required");
  Stepper st(m, p, dt, s.frame, s.sigma);
  return st.step(s);
}

// --- diagnostics and outcomes ----------------------------------------------

inline DiagnosticsRow diagnostics_row(const ZakharovState& s, double d_accum_sq) {
  DiagnosticsRow row;
  row.t = s.t;
  row.mass = l2_norm_sq(s.X);
  row.energy = zakharov_energy(s.X, s.Y);
  row.h1_X = h1_norm(s.X);
  row.l2_Y = l2_norm(s.Y);
  row.d_accum = std::sqrt(d_accum_sq);
  return row;
}

struct IntegrateOptions {
  double T = 1.0;
  int diag_stride = 1;        // record diagnostics every k-th step
  int checkpoint_stride = 0;  // 0 = only first/last
  bool track_d_norm = true;
  BlowupThresholds thresholds;
};

inline double resolve_m_blow(const BlowupThresholds& th, const DiagnosticsRow& first) {
  return th.m_blow > 0 ? th.m_blow : th.m_blow_factor * (first.h1_X + first.l2_Y + 1e-12);
}

// Integrate with diagnostics and threshold-based outcome classification.
inline Trajectory integrate(Stepper& st, ZakharovState state, const IntegrateOptions& opt) {
  Trajectory traj;
  const long nsteps = static_cast<long>(std::llround(opt.T / st.dt()));
  if (std::abs(opt.T - nsteps * st.dt()) > 1e-9)
    throw std::invalid_argument("integrate: T must be a whole number of steps");

  double d_accum_sq = 0.0;
  traj.diagnostics.push_back(diagnostics_row(state, 0.0));
  traj.checkpoints.push_back(state);
  const double m_blow = resolve_m_blow(opt.thresholds, traj.diagnostics.front());

  for (long k = 0; k < nsteps; ++k) {
    state = st.step(state);
    if (!state.X.finite() || !state.Y.finite()) {
      traj.outcome = Outcome::blowup;
      traj.blowup_time = state.t;
      return traj;
    }
    const bool record = (k + 1) % opt.diag_stride == 0 || k + 1 == nsteps;
    if (record) {
      if (opt.track_d_norm) {
        const double w = sobolev_w_norm(state.X, 0.5, 4.0);
        d_accum_sq += w * w * st.dt() * opt.diag_stride;
      }
      DiagnosticsRow row = diagnostics_row(state, d_accum_sq);
      traj.diagnostics.push_back(row);
      if (row.h1_X + row.l2_Y >= m_blow || row.d_accum >= opt.thresholds.d_blow) {
        traj.outcome = Outcome::blowup;
        traj.blowup_time = state.t;
        traj.checkpoints.push_back(state);
        return traj;
      }
    }
    if (opt.checkpoint_stride > 0 && (k + 1) % opt.checkpoint_stride == 0)
      traj.checkpoints.push_back(state);
  }
  if (traj.checkpoints.back().t != state.t) traj.checkpoints.push_back(state);
  traj.outcome = Outcome::global;
  return traj;
}

// Threshold re-classification of a recorded trajectory.
inline Outcome detect_blowup(Trajectory& traj, const BlowupThresholds& th) {
  if (traj.diagnostics.empty()) return Outcome::undecided;
  const double m_blow = resolve_m_blow(th, traj.diagnostics.front());
  for (const auto& row : traj.diagnostics) {
    const bool finite = std::isfinite(row.h1_X) && std::isfinite(row.l2_Y) &&
                        std::isfinite(row.mass) && std::isfinite(row.energy);
    if (!finite || row.h1_X + row.l2_Y >= m_blow || row.d_accum >= th.d_blow) {
      traj.outcome = Outcome::blowup;
      traj.blowup_time = row.t;
      return traj.outcome;
    }
  }
  traj.outcome = Outcome::global;
  traj.blowup_time = -1.0;
  return traj.outcome;
}

// --- scattering probe -------------------------------------------------------

struct ScatterProbeResult {
  bool scatters = false;
  double max_profile_diff = 0.0;     // worst pairwise H^1 x L^2 profile gap
  std::vector<double> profile_times;
  double final_h1_X = 0.0;
};

// Free-evolved noise-corrected profiles: e^{-it Delta} e^{mu_hat t - W_1(t)} X
// in H^1 and e^{-it |nabla|} Y in L^2. For a state already in the
// non-conservative rescaled frame the first profile is e^{-it Delta} z.
inline std::pair<Field, Field> scattering_profiles(const ZakharovState& s, const NoiseModel& m,
                                                   const NoisePath& p) {
  Field z;
  switch (s.frame) {
    case Frame::rescaled_nonconservative:
      z = s.X;
      break;
    case Frame::direct:
      z = to_rescaled_nonconservative(s, m, p).X;
      break;
    default:
      throw std::invalid_argument("scattering_profiles: unsupported frame");
  }
  return {schrodinger_propagate(to_rep(z, Rep::spectral), -s.t),
          wave_propagate(to_rep(s.Y, Rep::spectral), -s.t)};
}

// Cauchy test on the last checkpoints: scatters iff no blow-up and all
// pairwise late-profile differences stay below tol (relative to the initial
// data norms).
inline ScatterProbeResult scattering_probe(const Trajectory& traj, const NoiseModel& m,
                                           const NoisePath& p, int late_checkpoints,
                                           double tol) {
  if (late_checkpoints < 3)
    throw std::invalid_argument("scattering_probe: need >= 3 late checkpoints");
  ScatterProbeResult res;
  if (traj.outcome == Outcome::blowup) return res;
  if (static_cast<int>(traj.checkpoints.size()) < late_checkpoints + 1) return res;

  // Joint scale: a zero component must not blow up the relative gap.
  const double ref =
      std::max(1e-12, traj.diagnostics.front().h1_X + traj.diagnostics.front().l2_Y);
  const double ref_h1 = ref, ref_l2 = ref;

  std::vector<std::pair<Field, Field>> profiles;
  const int n = static_cast<int>(traj.checkpoints.size());
  for (int i = n - late_checkpoints; i < n; ++i) {
    profiles.push_back(scattering_profiles(traj.checkpoints[i], m, p));
    res.profile_times.push_back(traj.checkpoints[i].t);
  }
  for (std::size_t a = 0; a < profiles.size(); ++a)
    for (std::size_t b = a + 1; b < profiles.size(); ++b) {
      Field dz = profiles[a].first - profiles[b].first;
      Field dv = profiles[a].second - profiles[b].second;
      res.max_profile_diff = std::max(
          res.max_profile_diff,
          std::max(h1_norm(dz) / ref_h1, l2_norm(dv) / ref_l2));
    }
  const auto& last = traj.checkpoints.back();
  if (last.frame == Frame::direct)
    res.final_h1_X = h1_norm(last.X);
  else if (last.frame == Frame::rescaled_nonconservative)
    res.final_h1_X = h1_norm(to_direct_from_nonconservative(last, m, p).X);
  res.scatters = res.max_profile_diff <= tol;
  return res;
}

}  // namespace zlab
