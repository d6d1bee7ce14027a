#include <catch2/catch_amalgamated.hpp>

#include "impwave/impwave.hpp"
#include "oracles.hpp"

using namespace impwave;
using Catch::Approx;

namespace {
// bump normalization 1 / int exp(-1/(1-x^2)) dx, frozen from an independent
// high-precision evaluation
constexpr double kBumpC = 2.25228362104358101;
}  // namespace

TEST_CASE("bump mollifier: normalization, support, unit mass") {
  const Mollifier m = make_bump_mollifier();
  CHECK(m.rho(0.0) == Approx(kBumpC * std::exp(-1.0)).margin(1e-10));
  CHECK(m.rho(1.0) == 0.0);
  CHECK(m.rho(-1.2) == 0.0);
  CHECK(m.sup_rho == Approx(0.82856883986910515).margin(1e-10));
  CHECK(m.sup_rho_prime == Approx(1.7982902526087073).margin(1e-7));

  const double mass = oracles::gauss_legendre([&](double x) { return m.rho(x); }, -1.0, 1.0);
  CHECK(mass == Approx(1.0).margin(1e-10));
}

TEST_CASE("poly and tilted mollifiers have unit mass and stated smoothness data") {
  for (const char* name : {"poly", "tilted"}) {
    const Mollifier m = mollifier_catalog(name);
    const double mass = oracles::gauss_legendre([&](double x) { return m.rho(x); }, -1.0, 1.0);
    CHECK(mass == Approx(1.0).margin(1e-10));
    CHECK(m.rho(1.0) == 0.0);
    // rho' matches a finite difference of rho
    for (double x : {-0.7, -0.2, 0.1, 0.4, 0.8}) {
      const double h = 1e-6;
      const double fd = (m.rho(x + h) - m.rho(x - h)) / (2 * h);
      CHECK(m.rho_prime(x) == Approx(fd).margin(1e-6));
    }
  }
  CHECK(make_poly_mollifier(4).sup_rho == Approx(315.0 / 256.0).margin(1e-12));
  CHECK(make_poly_mollifier(4).sup_rho_prime == Approx(2.3429940546235259).margin(1e-7));
  CHECK_FALSE(mollifier_catalog("tilted").even);
  CHECK_THROWS_AS(mollifier_catalog("box"), ConfigError);
}

TEST_CASE("delta_eval: support, unit mass, scaling, frozen value") {
  const Mollifier m = make_bump_mollifier();
  CHECK(delta_eval(m, 0.1, 0.2) == 0.0);
  CHECK(delta_eval(m, 1.0, 0.0) == Approx(kBumpC * std::exp(-1.0)).margin(1e-10));
  CHECK_THROWS_AS(delta_eval(m, 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(delta_eval(m, -1.0, 0.1), ConfigError);

  for (double eps : {1.0, 0.1, 0.01}) {
    const double mass = oracles::gauss_legendre(
        [&](double x) { return delta_eval(m, eps, x); }, -eps, eps);
    CHECK(mass == Approx(1.0).margin(1e-9));
  }

  // delta_eps(x) = (1/eps) delta_1(x/eps)
  for (double eps : {0.5, 0.05}) {
    for (double x : {-0.4, -0.01, 0.0, 0.2, 0.9}) {
      CHECK(delta_eval(m, eps, x * eps) ==
            Approx(delta_eval(m, 1.0, x) / eps).epsilon(1e-13));
    }
  }
}

TEST_CASE("delta_prime_eval moments") {
  const Mollifier m = make_bump_mollifier();
  CHECK(delta_prime_eval(m, 0.3, 0.0) == 0.0);  // even rho
  CHECK_THROWS_AS(delta_prime_eval(m, 0.0, 0.1), ConfigError);
  for (double eps : {1.0, 0.25}) {
    const double mass = oracles::gauss_legendre(
        [&](double x) { return delta_prime_eval(m, eps, x); }, -eps, eps, 128);
    CHECK(mass == Approx(0.0).margin(1e-9));
    const double moment = oracles::gauss_legendre(
        [&](double x) { return x * delta_prime_eval(m, eps, x); }, -eps, eps, 128);
    CHECK(moment == Approx(-1.0).margin(1e-8));
  }
}

TEST_CASE("delta nets act like the delta distribution as eps -> 0") {
  auto phi = [](double x) { return std::cos(1.3 * x) * std::exp(-x * x); };
  const std::vector<double> ladder = {0.2, 0.1, 0.05, 0.025};
  for (const char* name : {"bump", "tilted"}) {
    const Mollifier m = mollifier_catalog(name);
    std::vector<double> errs;
    for (double eps : ladder) {
      const double v = oracles::gauss_legendre(
          [&](double x) { return phi(x) * delta_eval(m, eps, x); }, -eps, eps, 128);
      errs.push_back(std::abs(v - phi(0.0)));
    }
    const LineFit f = fit_loglog_slope(ladder, errs);
    INFO("mollifier " << name << " slope " << f.slope);
    CHECK(f.slope >= 0.9);  // at least first order; even mollifiers give ~2
  }
}

TEST_CASE("profile catalog values and gradients") {
  const auto quad = profile_catalog("quadratic", {1.0, -1.0, 0.0});
  const Vec3 g = quad.DH({1, 2, 3});
  CHECK(g[0] == Approx(2.0));
  CHECK(g[1] == Approx(-4.0));
  CHECK(g[2] == Approx(0.0));

  const auto zero = profile_catalog("zero", {});
  CHECK(zero.ball_norms({5, 5, 5}, 3.0) == std::pair<double, double>{0.0, 0.0});

  const auto c5 = profile_catalog("constant", {5.0});
  const auto [nH, nDH] = c5.ball_norms({0, 0, 0}, 2.0);
  CHECK(nH == Approx(5.0));
  CHECK(nDH == 0.0);

  CHECK_THROWS_AS(profile_catalog("sinusoid", {}), ConfigError);
  CHECK_THROWS_AS(profile_catalog("constant", {}), ConfigError);
  CHECK_THROWS_AS(profile_catalog("quadratic", {1.0}), ConfigError);
}

TEST_CASE("catalog gradients match central finite differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  const std::vector<WaveProfile> profiles = {
      profile_catalog("quadratic", {0.7, -0.3, 1.1}),
      profile_catalog("gaussian", {2.0, 0.8}),
      profile_catalog("constant", {3.0}),
  };
  for (const auto& p : profiles) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 z = {uni(rng), uni(rng), uni(rng)};
      const Vec3 dh = p.DH(z);
      for (int c = 0; c < 3; ++c) {
        const double h = 1e-5;
        Vec3 zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        const double fd = (p.H(zp) - p.H(zm)) / (2 * h);
        const double scale = std::max(1.0, std::abs(dh[c]));
        CHECK(std::abs(dh[c] - fd) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("ball norms by sampling: bounds, inflation, monotonicity") {
  const auto quad = profile_catalog("quadratic", {1.0, 1.0, 1.0});
  const auto [nH, nDH] = ball_norms_by_sampling(quad, {0, 0, 0}, 1.0);
  CHECK(nH >= 1.0);        // true sup on the unit ball
  CHECK(nH <= 1.05 + 1e-12);
  CHECK(nDH >= 2.0);       // |DH| = 2|z|, sup 2
  CHECK(nDH <= 2.1 + 1e-12);

  // monotone in radius up to lattice discretization of the sampled sup
  const auto gauss = profile_catalog("gaussian", {1.5, 1.0});
  const Vec3 c = {0.3, -0.2, 0.5};
  const auto small = gauss.ball_norms(c, 0.5);
  const auto big = gauss.ball_norms(c, 1.5);
  CHECK(small.first <= big.first * (1.0 + 1e-4) + 1e-12);
  CHECK(small.second <= big.second * (1.0 + 1e-4) + 1e-12);
  const auto quad2 = profile_catalog("quadratic", {0.5, 0.5, -1.0});
  const auto qs = quad2.ball_norms(c, 0.8);
  const auto qb = quad2.ball_norms(c, 1.6);
  CHECK(qs.first <= qb.first * (1.0 + 1e-4) + 1e-12);
  CHECK(qs.second <= qb.second * (1.0 + 1e-4) + 1e-12);

  CHECK_THROWS_AS(ball_norms_by_sampling(quad, {0, 0, 0}, -1.0), ConfigError);
  CHECK_THROWS_AS(ball_norms_by_sampling(quad, {0, 0, 0}, 1.0, 4), ConfigError);
}
