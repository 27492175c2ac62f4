#include <catch2/catch_amalgamated.hpp>

#include "zlab/block.hpp"
#include "zlab/field.hpp"
#include "zlab/ladder.hpp"

using namespace zlab;

namespace {

Field random_physical(const Grid& g, std::uint64_t seed) {
  Field f(g, Rep::physical);
  for (std::size_t i = 0; i < f.data.size(); ++i)
    f.data[i] = cplx{rng::normal(seed, 1, 2, i), rng::normal(seed, 3, 4, i)};
  return f;
}

Field plane_wave(const Grid& g, const std::array<int, 4>& k) {
  Field f(g, Rep::physical);
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    auto x = g.coord(i);
    double phase = 0;
    for (int a = 0; a < g.d; ++a) phase += g.dk() * k[a] * x[a];
    f.data[i] = std::polar(1.0, phase);
  }
  return f;
}

double rel_diff(const Field& a, const Field& b) {
  Field d = a;
  d -= b;
  return l2_norm(d) / std::max(1e-300, l2_norm(b));
}

}  // namespace

TEST_CASE("fft of delta is a constant spectrum") {
  Grid g(2, 16, 2 * kPi);
  Field f(g, Rep::physical);
  f.data[0] = cplx{1.0, 0.0};
  Field s = fft_forward(f);
  const cplx expect{1.0 / g.size(), 0.0};
  for (const auto& z : s.data) REQUIRE(std::abs(z - expect) < 1e-14);
}

TEST_CASE("fft round trip is the identity") {
  for (int d : {1, 2, 3}) {
    Grid g(d, 16, 5.0);
    Field f = random_physical(g, 7 + d);
    Field back = fft_inverse(fft_forward(f));
    REQUIRE(rel_diff(back, f) < 1e-12);
  }
}

TEST_CASE("parseval holds between representations") {
  Grid g(3, 8, 3.7);
  Field f = random_physical(g, 21);
  REQUIRE(l2_norm(f) == Catch::Approx(l2_norm(fft_forward(f))).epsilon(1e-12));
}

TEST_CASE("fft rejects non-finite data") {
  Grid g(1, 8, 1.0);
  Field f(g, Rep::physical);
  f.data[3] = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
  REQUIRE_THROWS_AS(fft_forward(f), std::invalid_argument);
}

TEST_CASE("multiplier identity and Laplacian eigenfunction") {
  Grid g(2, 16, 4.0);
  Field f = random_physical(g, 3);
  Field same = apply_multiplier(f, [](const std::array<double, 4>&, double) {
    return cplx{1.0, 0.0};
  });
  REQUIRE(rel_diff(same, f) < 1e-12);

  std::array<int, 4> k{3, -2, 0, 0};
  Field pw = plane_wave(g, k);
  const double xi2 = g.dk() * g.dk() * (3 * 3 + 2 * 2);
  Field lap = laplacian(pw);
  Field expect = pw * cplx{-xi2, 0.0};
  REQUIRE(rel_diff(lap, expect) < 1e-12);
}

TEST_CASE("zero mode convention for |nabla|^s") {
  Grid g(2, 8, 2 * kPi);
  Field f(g, Rep::physical);
  for (auto& z : f.data) z = cplx{2.5, -1.0};  // pure mean
  REQUIRE(l2_norm(abs_grad_pow(f, 0.5)) < 1e-14);
  REQUIRE(rel_diff(abs_grad_pow(f, 0.0), f) < 1e-14);
}

TEST_CASE("propagators: identity at t=0, unitary, plane-wave phase") {
  Grid g(2, 16, 2 * kPi);
  Field f = random_physical(g, 11);
  REQUIRE(rel_diff(schrodinger_propagate(f, 0.0), f) < 1e-13);
  REQUIRE(rel_diff(wave_propagate(f, 0.0), f) < 1e-13);

  const double t = 0.37;
  REQUIRE(l2_norm(schrodinger_propagate(f, t)) == Catch::Approx(l2_norm(f)).epsilon(1e-12));
  REQUIRE(l2_norm(wave_propagate(f, t)) == Catch::Approx(l2_norm(f)).epsilon(1e-12));

  std::array<int, 4> k{2, 1, 0, 0};
  Field pw = plane_wave(g, k);
  const double xi2 = g.dk() * g.dk() * 5.0;
  Field prop = schrodinger_propagate(pw, t);
  Field expect = pw * std::polar(1.0, -xi2 * t);
  REQUIRE(rel_diff(prop, expect) < 1e-12);
}

TEST_CASE("propagators commute with band projectors") {
  Grid g(2, 32, 2 * kPi);
  DyadicLadder lad(g);
  Field f = random_physical(g, 5);
  const double t = 0.21;
  for (double lam : lad.lambdas()) {
    Field a = schrodinger_propagate(lp_project(lad, f, lam, BandKind::band), t);
    Field b = lp_project(lad, schrodinger_propagate(f, t), lam, BandKind::band);
    a -= b;
    REQUIRE(l2_norm(a) <= 1e-12 * l2_norm(f));
  }
}

TEST_CASE("dyadic ladder telescopes to a resolution of the identity") {
  for (int d : {1, 2}) {
    Grid g(d, 32, 2 * kPi);
    DyadicLadder lad(g);
    Field f = random_physical(g, 13 + d);
    Field sum(g, Rep::physical);
    for (double lam : lad.lambdas()) sum += lp_project(lad, f, lam, BandKind::band);
    REQUIRE(rel_diff(sum, f) < 1e-12);
  }
}

TEST_CASE("bump profile bounds and plateau") {
  Grid g(1, 16, 2 * kPi);
  DyadicLadder lad(g);
  for (double r = 0.0; r < 3.0; r += 0.01) {
    REQUIRE(lad.eta0(r) >= 0.0);
    REQUIRE(lad.eta0(r) <= 1.0);
  }
  REQUIRE(lad.eta0(1.25) == 1.0);
  REQUIRE(lad.eta0(1.6) == 0.0);
  // chi_lambda(lambda) = eta0(1) - eta0(2) = 1
  REQUIRE(lad.chi_band(4.0, 4.0) == 1.0);
}

TEST_CASE("plane wave with |xi| = lambda passes P_lambda unchanged") {
  Grid g(2, 32, 2 * kPi);
  DyadicLadder lad(g);
  std::array<int, 4> k{4, 0, 0, 0};  // |xi| = 4
  Field pw = plane_wave(g, k);
  Field proj = lp_project(lad, pw, 4.0, BandKind::band);
  REQUIRE(rel_diff(proj, pw) < 1e-12);
}

TEST_CASE("band projector output is supported in the dyadic annulus") {
  Grid g(2, 32, 2 * kPi);
  DyadicLadder lad(g);
  Field f = random_physical(g, 17);
  const double lam = 8.0;
  Field proj = fft_forward(lp_project(lad, f, lam, BandKind::band));
  for (std::size_t i = 0; i < proj.data.size(); ++i) {
    const double r = std::sqrt(g.xi_abs2(i));
    if (r <= lam / 2.0 || r >= 2.0 * lam) REQUIRE(std::abs(proj.data[i]) < 1e-14);
  }
}

TEST_CASE("projector scale beyond the ladder is rejected") {
  Grid g(2, 16, 2 * kPi);
  DyadicLadder lad(g);
  Field f = random_physical(g, 19);
  REQUIRE_THROWS_AS(lp_project(lad, f, 4.0 * lad.top_lambda(), BandKind::band),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(lp_project(lad, f, 3.0, BandKind::band), std::invalid_argument);
}

TEST_CASE("angular decomposition sums to the band projection") {
  Grid g(4, 8, 2 * kPi);
  DyadicLadder lad(g);
  Field f = random_physical(g, 23);
  const double N = 2.0;
  Field pn = lp_project(lad, f, N, BandKind::band);
  auto parts = decompose_angular(lad, f, N);
  REQUIRE(parts.size() == 4);
  Field sum(g, Rep::physical);
  for (auto& p : parts) sum += p;
  REQUIRE(rel_diff(sum, pn) < 1e-12);
}

TEST_CASE("lateral profile is 1 where the decomposition needs it") {
  Grid g(4, 8, 2 * kPi);
  DyadicLadder lad(g);
  // N = 4, xi_1 = 3: phi(3/4) = 1 so the product term (1 - phi) vanishes.
  REQUIRE(lad.phi(3.0 / 4.0) == 1.0);
  REQUIRE(lad.phi(0.1) == 0.0);
  REQUIRE(lad.phi(5.0) == 0.0);
}

TEST_CASE("annulus coverage: some axis frequency is always in the phi plateau") {
  // Brute scan of integer lattice points in the annulus N/2 < |xi| < 2N for
  // d = 4: max_j |xi_j| always lies in [N/4, 2N], where phi = 1.
  const double N = 4.0;
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b)
      for (int c = -8; c <= 8; ++c)
        for (int e = -8; e <= 8; ++e) {
          const double r = std::sqrt(double(a * a + b * b + c * c + e * e));
          if (r <= N / 2 || r >= 2 * N) continue;
          const int mx = std::max(std::max(std::abs(a), std::abs(b)),
                                  std::max(std::abs(c), std::abs(e)));
          REQUIRE(mx >= N / 4);
          REQUIRE(mx <= 2 * N);
        }
}

TEST_CASE("modulation projectors: complementary kinds recompose the block") {
  Grid g(2, 8, 2 * kPi);
  DyadicLadder lad(g);
  SpaceTimeBlock b(g, 0.0, 0.05, 12, Rep::physical);
  for (int k = 0; k < b.samples(); ++k)
    b.snaps[k] = random_physical(g, 100 + k);
  SpaceTimeBlock lo = modulation_project(lad, b, 2.0, ModKind::low);
  SpaceTimeBlock hi = modulation_project(lad, b, 2.0, ModKind::high);
  for (int k = 0; k < b.samples(); ++k) {
    Field s = lo.snaps[k] + hi.snaps[k];
    REQUIRE(rel_diff(s, b.snaps[k]) < 1e-12);
  }
}

TEST_CASE("modulation projector rejects too-short blocks") {
  Grid g(1, 8, 2 * kPi);
  DyadicLadder lad(g);
  SpaceTimeBlock b(g, 0.0, 0.1, 2, Rep::physical);
  REQUIRE_THROWS_AS(modulation_project(lad, b, 1.0, ModKind::low), std::invalid_argument);
}

TEST_CASE("free Schrodinger wave has tiny high-modulation content after taper") {
  Grid g(1, 32, 2 * kPi);
  DyadicLadder lad(g);
  std::array<int, 4> k{3, 0, 0, 0};
  Field pw = plane_wave(g, k);
  const double xi2 = 9.0;
  auto state = [&](double t) { return pw * std::polar(1.0, -xi2 * t); };
  SpaceTimeBlock b = taper_time(sample_block(g, 0.0, 0.05, 128, state), 0.25);
  const double ref = lqt_lpx_norm(b, 2.0, 2.0);
  // Distance to the paraboloid is 0, so band output is pure taper leakage.
  // Ceilings frozen at ~2x the measured values for this window.
  const double lam[3] = {16.0, 32.0, 64.0};
  const double ceiling[3] = {4e-3, 2e-4, 5e-6};
  double prev = 1.0;
  for (int i = 0; i < 3; ++i) {
    SpaceTimeBlock proj = modulation_project(lad, b, lam[i], ModKind::band);
    const double leak = lqt_lpx_norm(proj, 2.0, 2.0) / ref;
    REQUIRE(leak < ceiling[i]);
    REQUIRE(leak < prev);
    prev = leak;
  }
}

TEST_CASE("space-time multiplier factorizes for a single spatial mode") {
  // f(t,x) = s(t) e^{i xi x}: the block pipeline must equal the 1-D pipeline
  // applied to s, for the modulation symbol frozen at this xi.
  Grid g(1, 16, 2 * kPi);
  DyadicLadder lad(g);
  const int m = 16;
  const double dt = 0.11;
  std::array<int, 4> k{2, 0, 0, 0};
  Field pw = plane_wave(g, k);
  const double xi2 = 4.0;
  const double lambda = 4.0;

  const double tau0 = 1.3;
  SpaceTimeBlock b(g, 0.0, dt, m, Rep::physical);
  for (int j = 0; j < m; ++j) b.snaps[j] = pw * std::polar(1.0, tau0 * j * dt);
  SpaceTimeBlock proj = modulation_project(lad, b, lambda, ModKind::band);

  // 1-D oracle: same padding, transform, profile, crop.
  const int pad = 32;
  std::vector<cplx> line(pad, cplx{0, 0});
  for (int j = 0; j < m; ++j) line[j] = std::polar(1.0, tau0 * j * dt);
  Fft1d fft(pad);
  fft.forward(line.data());
  for (int j = 0; j < pad; ++j) {
    const double tau = 2.0 * kPi / (pad * dt) * (j < pad / 2 ? j : j - pad);
    line[j] *= lad.chi_band(std::abs(tau + xi2), lambda) / pad;
  }
  fft.inverse(line.data());

  for (int j = 0; j < m; ++j) {
    Field expect = pw * line[j];
    REQUIRE(rel_diff(proj.snaps[j], expect) < 1e-11);
  }
}

TEST_CASE("wave at exact modulation distance lambda passes C_lambda near gain 1") {
  // tau + xi^2 = lambda at a padded-mesh bin keeps most mass; the residual
  // comes from the zero pad. Gain measured against the 1-D oracle elsewhere;
  // here the center-of-window gain must sit near chi(lambda) = 1.
  Grid g(1, 16, 2 * kPi);
  DyadicLadder lad(g);
  const int m = 32;
  const double dt = 0.0625;
  const int pad = 64;
  std::array<int, 4> k{2, 0, 0, 0};
  Field pw = plane_wave(g, k);
  const double xi2 = 4.0;
  const double lambda = 8.0;
  const double dtau = 2.0 * kPi / (pad * dt);
  const double tau0 = std::round((lambda - xi2) / dtau) * dtau;
  REQUIRE(lad.chi_band(std::abs(tau0 + xi2), lambda) > 0.999);

  SpaceTimeBlock b(g, 0.0, dt, m, Rep::physical);
  for (int j = 0; j < m; ++j) b.snaps[j] = pw * std::polar(1.0, tau0 * j * dt);
  SpaceTimeBlock proj = modulation_project(lad, b, lambda, ModKind::band);
  const int mid = m / 2;
  const cplx gain = proj.snaps[mid].data[2] / b.snaps[mid].data[2];
  REQUIRE(std::abs(gain - cplx{1.0, 0.0}) < 0.2);
}

TEST_CASE("lateral norm with p = q collapses to the space-time norm") {
  Grid g(2, 16, 3.0);
  SpaceTimeBlock b(g, 0.0, 0.1, 8, Rep::physical);
  for (int k = 0; k < 8; ++k) b.snaps[k] = random_physical(g, 400 + k);
  const double full = std::pow(
      [&] {
        double s = 0;
        for (const auto& f : b.snaps)
          for (const auto& z : f.data) s += std::norm(z) * std::pow(g.dx(), g.d) * b.dt;
        return s;
      }(),
      0.5);
  REQUIRE(lateral_norm(b, 0, 2.0, 2.0) == Catch::Approx(full).epsilon(1e-12));
  REQUIRE(lateral_norm(b, 1, 2.0, 2.0) == Catch::Approx(full).epsilon(1e-12));
}

TEST_CASE("field round trips through the binary container") {
  Grid g(3, 8, 1.75);
  Field f = random_physical(g, 77);
  save_field("/tmp/zlab_field_test.bin", f);
  Field back = load_field("/tmp/zlab_field_test.bin");
  REQUIRE(back.grid == f.grid);
  REQUIRE(back.rep == f.rep);
  REQUIRE(rel_diff(back, f) == 0.0);
}
