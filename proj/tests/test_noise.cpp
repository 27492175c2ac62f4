#include <catch2/catch_amalgamated.hpp>

#include "zlab/noise.hpp"

using namespace zlab;

namespace {

double rel_diff(const Field& a, const Field& b) {
  Field d = a;
  d -= b;
  return l2_norm(d) / std::max(1e-300, l2_norm(b));
}

}  // namespace

TEST_CASE("nonconservative preset: mu = c^2/2 constant, mu_hat = c^2") {
  Grid g(2, 8, 2 * kPi);
  const double c = 1.0;
  NoiseModel m = build_noise_model_nonconservative(g, c);
  REQUIRE(m.mu_hat_constant.has_value());
  REQUIRE(std::abs(*m.mu_hat_constant - cplx{1.0, 0.0}) < 1e-14);
  for (const auto& z : m.mu.data) REQUIRE(std::abs(z - cplx{0.5, 0.0}) < 1e-14);
  for (const auto& z : m.mu_hat.data) REQUIRE(std::abs(z - cplx{1.0, 0.0}) < 1e-14);
}

TEST_CASE("empty model has mu = 0") {
  Grid g(2, 8, 2 * kPi);
  NoiseModel m = build_noise_model_empty(g);
  REQUIRE(m.empty());
  REQUIRE(l2_norm(m.mu) == 0.0);
}

TEST_CASE("mu is nonnegative pointwise and hypothesis sums are finite") {
  Grid g(2, 32, 2 * kPi * 4);
  NoiseModel m = build_noise_model_conservative(g, ConservativeParams{});
  for (const auto& z : m.mu.data) REQUIRE(z.real() >= -1e-15);
  REQUIRE(m.hypothesis.finite());
  REQUIRE(m.hypothesis.sum_h4_sq > 0.0);
  REQUIRE(m.hypothesis.lateral_sum > 0.0);
  REQUIRE(m.hypothesis.sum_h2_sq > 0.0);
}

TEST_CASE("custom models reject complex wave modes") {
  Grid g(1, 8, 2 * kPi);
  Field bad(g, Rep::physical);
  for (auto& z : bad.data) z = cplx{1.0, 0.5};
  REQUIRE_THROWS_AS(build_noise_model_custom(g, {}, {bad}), std::invalid_argument);
}

TEST_CASE("brownian paths start at zero and are deterministic") {
  NoisePath p(42, 0.01, 2.0);
  REQUIRE(p.brownian_value(0, 0, 0.0) == 0.0);
  NoisePath q(42, 0.01, 2.0);
  for (double t : {0.25, 1.0, 2.0})
    REQUIRE(p.brownian_value(0, 3, t) == q.brownian_value(0, 3, t));
  NoisePath r(43, 0.01, 2.0);
  REQUIRE(p.brownian_value(0, 0, 1.0) != r.brownian_value(0, 0, 1.0));
}

TEST_CASE("off-mesh times are rejected") {
  NoisePath p(1, 0.1, 1.0);
  REQUIRE_THROWS_AS(p.brownian_value(0, 0, 0.05), std::invalid_argument);
  REQUIRE_THROWS_AS(p.brownian_value(0, 0, 1.1), std::invalid_argument);
}

TEST_CASE("sample variance of beta(1) matches t within 3 standard errors") {
  const int paths = 10000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < paths; ++i) {
    NoisePath p(9000 + i, 0.125, 1.0);
    const double b = p.brownian_value(0, 0, 1.0);
    s1 += b;
    s2 += b * b;
  }
  const double mean = s1 / paths;
  const double var = s2 / paths - mean * mean;
  // var(beta(1)^2) = 2 for a standard normal, so SE(var-hat) ~ sqrt(2/M)
  const double se = std::sqrt(2.0 / paths);
  REQUIRE(std::abs(var - 1.0) < 3.0 * se);
  REQUIRE(std::abs(mean) < 3.0 / std::sqrt(double(paths)));
}

TEST_CASE("restart consistency: increments concatenate exactly") {
  NoisePath p(7, 0.05, 3.0);
  const long msig = p.mesh_index(1.4);
  double acc = 0.0;
  for (long s = 0; s < msig; ++s) acc += p.increment(0, 2, s);
  double acc2 = 0.0;
  for (long s = msig; s < p.mesh_index(2.9); ++s) acc2 += p.increment(0, 2, s);
  REQUIRE(acc == p.beta_at(0, 2, msig));
  REQUIRE(acc + acc2 == Catch::Approx(p.beta_at(0, 2, p.mesh_index(2.9))).margin(1e-15));
}

TEST_CASE("conservative W1 is purely imaginary pointwise") {
  Grid g(2, 16, 2 * kPi * 4);
  NoiseModel m = build_noise_model_conservative(g, ConservativeParams{});
  NoisePath p(5, 0.02, 1.0);
  Field w1 = w1_field(m, p, 0.8);
  for (const auto& z : w1.data) REQUIRE(std::abs(z.real()) < 1e-15);
  REQUIRE(l2_norm(w1) > 0.0);
}

TEST_CASE("geometric BM basics") {
  NoisePath p(11, 0.01, 2.0);
  REQUIRE(geometric_bm(p, 1.0, 0.0) == 1.0);
  for (double t : {0.5, 1.0, 2.0}) REQUIRE(geometric_bm(p, 0.0, t) == 1.0);
  REQUIRE(geometric_bm(p, 2.0, 1.0) > 0.0);
  REQUIRE_THROWS_AS(geometric_bm(p, -1.0, 0.5), std::invalid_argument);
}

TEST_CASE("mean of h_1(1) is 1 within 3 standard errors (Gaussian MGF oracle)") {
  const int paths = 10000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < paths; ++i) {
    NoisePath p(31000 + i, 0.0625, 1.0);
    const double h = geometric_bm(p, 1.0, 1.0);
    s1 += h;
    s2 += h * h;
  }
  const double mean = s1 / paths;
  const double sd = std::sqrt(s2 / paths - mean * mean);
  REQUIRE(std::abs(mean - 1.0) < 3.0 * sd / std::sqrt(double(paths)));
}

TEST_CASE("stochastic convolution: zero wave noise gives the zero field") {
  Grid g(2, 8, 2 * kPi);
  NoiseModel m = build_noise_model_nonconservative(g, 1.0);
  NoisePath p(3, 0.1, 1.0);
  REQUIRE(l2_norm(stochastic_convolution(m, p, 1.0)) == 0.0);
}

TEST_CASE("stochastic convolution: single step equals the quadrature term") {
  Grid g(1, 16, 2 * kPi);
  Field phi = gaussian_bump(g, 1.0, 0.7, {kPi, 0, 0, 0});
  NoiseModel m = build_noise_model_custom(g, {}, {phi});
  NoisePath p(17, 0.2, 1.0);
  // T_{dt} = e^{i dt |nabla|} ( (-i) dW_2(0) ), and (-i)(i phi db) = phi db.
  const double db = p.increment(1, 0, 0);
  Field expect = wave_propagate(to_rep(phi, Rep::spectral) * cplx{db, 0.0}, p.dt());
  Field got = stochastic_convolution(m, p, p.dt());
  REQUIRE(rel_diff(got, expect) < 1e-13);
}

TEST_CASE("stochastic convolution restart identity holds exactly on the mesh") {
  Grid g(1, 16, 2 * kPi);
  Field phi1 = gaussian_bump(g, 1.0, 0.7, {kPi, 0, 0, 0});
  Field phi2 = gaussian_bump(g, 0.5, 0.9, {2.0, 0, 0, 0});
  NoiseModel m = build_noise_model_custom(g, {}, {phi1, phi2});
  NoisePath p(23, 0.125, 2.0);
  const double sigma = 0.75, t = 0.875;
  Field full = stochastic_convolution(m, p, sigma + t);
  Field glued = wave_propagate(stochastic_convolution(m, p, sigma), t) +
                stochastic_convolution(m, p, t, sigma);
  REQUIRE(rel_diff(glued, full) < 1e-13);
}

TEST_CASE("lower order coefficients vanish for constant modes") {
  Grid g(2, 8, 2 * kPi);
  NoiseModel m = build_noise_model_nonconservative(g, 2.0);
  NoisePath p(2, 0.1, 1.0);
  auto co = lower_order_coeffs(m, p, 0.7);
  for (int a = 0; a < g.d; ++a) REQUIRE(l2_norm(co.b[a]) < 1e-12);
  REQUIRE(l2_norm(co.c) < 1e-12);
}

TEST_CASE("single real mode: b = 2 i beta(t) grad(phi)") {
  Grid g(2, 32, 2 * kPi * 4);
  Field phi = gaussian_bump(g, 1.0, 0.1 * g.L, {0.4 * g.L, 0.5 * g.L, 0, 0});
  NoiseModel m = build_noise_model_custom(g, {phi}, {});
  NoisePath p(29, 0.05, 1.0);
  const double t = 0.65;
  const double beta = p.brownian_value(0, 0, t);
  auto co = lower_order_coeffs(m, p, t);
  for (int a = 0; a < g.d; ++a) {
    Field expect = fft_inverse(gradient_component(to_rep(phi, Rep::spectral), a)) *
                   cplx{0.0, 2.0 * beta};
    REQUIRE(rel_diff(co.b[a], expect) < 1e-12);
  }
}

TEST_CASE("operator identity e^{-W1} Delta(e^{W1} u) = Delta u + b.grad u + c u") {
  Grid g(2, 64, 2 * kPi * 4);
  ConservativeParams params;
  params.amplitude = 0.4;
  params.width_fraction = 0.12;
  NoiseModel m = build_noise_model_conservative(g, params);
  NoisePath p(41, 0.05, 1.0);
  const double t = 0.5;

  Field u = random_band_limited(g, 0.25 * g.xi_max_axis(), 97);
  Field up = fft_inverse(u);

  Field w1 = w1_field(m, p, t);
  Field ew(g, Rep::physical), emw(g, Rep::physical);
  for (std::size_t i = 0; i < w1.data.size(); ++i) {
    ew.data[i] = std::exp(w1.data[i]);
    emw.data[i] = std::exp(-w1.data[i]);
  }
  Field lhs = pointwise_product(emw, fft_inverse(laplacian(fft_forward(
                                          pointwise_product(ew, up)))));

  auto co = lower_order_coeffs(m, p, t);
  Field rhs = fft_inverse(laplacian(u));
  for (int a = 0; a < g.d; ++a)
    rhs += pointwise_product(co.b[a], fft_inverse(gradient_component(u, a)));
  rhs += pointwise_product(co.c, up);

  REQUIRE(rel_diff(lhs, rhs) < 1e-8);
}

TEST_CASE("LIL statistic: median in [0.5, 1.2] at T = 1000, monotone in T") {
  const int paths = 200;
  const double dt = 0.5;
  std::vector<double> stat_t100(paths), stat_t1000(paths);
  for (int i = 0; i < paths; ++i) {
    NoisePath p(52000 + i, dt, 1000.0);
    double m100 = 0.0, m1000 = 0.0;
    double beta = 0.0;
    for (long s = 0; s < p.steps(); ++s) {
      beta += p.increment(0, 0, s);
      const double t = (s + 1) * dt;
      if (t < 10.0) continue;
      const double z = beta / std::sqrt(2.0 * t * std::log(std::log(t)));
      if (t <= 100.0) m100 = std::max(m100, z);
      m1000 = std::max(m1000, z);
    }
    stat_t100[i] = m100;
    stat_t1000[i] = m1000;
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double med1000 = median(stat_t1000);
  REQUIRE(med1000 >= 0.5);
  REQUIRE(med1000 <= 1.2);
  REQUIRE(median(stat_t100) <= med1000);
}
