#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "slrd/limits.hpp"
#include "slrd/theta.hpp"

using namespace slrd;
using slrd::testing::Gen;

namespace {

std::span<const double> sp(const std::vector<double>& v) { return {v.data(), v.size()}; }

CoefficientModel pure(double beta) {
  IsotropicParams p;
  p.amplitude = IsotropicParams::Amplitude::pure_power;
  return CoefficientModel::isotropic(2, beta, p);
}

CoefficientModel balanced(double beta) { return pure(beta).balanced(); }

// Midpoint grid sum of |y - x|^-beta over the ball of radius r centred at 0.
double ball_grid_oracle(double r, double beta, double x0, double x1, int n) {
  const double h = 2.0 * r / n;
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double y0 = -r + (a + 0.5) * h, y1 = -r + (b + 0.5) * h;
      if (y0 * y0 + y1 * y1 >= r * r) continue;
      s += std::pow(std::hypot(y0 - x0, y1 - x1), -beta);
    }
  return s * h * h;
}

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("G_infty at the ball centre") {
    const auto v = G_infty_at(pure(1.5), RegionPrototype::ball(2, 0.5), std::vector<double>{0.0, 0.0});
    CHECK(v.value == doctest::Approx(4.0 * std::numbers::pi * std::sqrt(0.5)).epsilon(1e-9));
  }

  TEST_CASE("G_infty far from the ball") {
    const auto ball = RegionPrototype::ball(2, 0.5);
    const auto v = G_infty_at(pure(1.5), ball, std::vector<double>{10.0, 0.0});
    CHECK(v.value > 0.0);
    CHECK(v.value <= ball.volume() * std::pow(9.5, -1.5));
    CHECK(v.value >= ball.volume() * std::pow(10.5, -1.5));
  }

  TEST_CASE("G_infty at the cube centre against a polar oracle") {
    constexpr int kN = 200000;
    double s = 0.0;
    for (int k = 0; k < kN; ++k) {
      const double phi = (k + 0.5) * (std::numbers::pi / 4.0) / kN;
      s += 2.0 * std::sqrt(0.5 / std::cos(phi));
    }
    const double oracle = 8.0 * s * (std::numbers::pi / 4.0) / kN;
    const auto v = G_infty_at(pure(1.5), RegionPrototype::cube(2), std::vector<double>{0.0, 0.0});
    CHECK(std::abs(v.value / oracle - 1.0) < 0.01);
    CHECK(v.value == doctest::Approx(oracle).epsilon(1e-8));
  }

  TEST_CASE("G_infty rejects summable decay inside the region") {
    CHECK_THROWS_AS(G_infty_at(balanced(2.2), RegionPrototype::ball(2, 0.5), std::vector<double>{0.0, 0.0}), Error);
    CHECK_THROWS_AS(G_dagger_at(pure(1.5), RegionPrototype::ball(2, 0.5), std::vector<double>{0.0, 0.0}), Error);
  }

  TEST_CASE("G_dagger values") {
    const auto ball = RegionPrototype::ball(2, 0.5);
    const auto m = balanced(2.2);
    CHECK(G_dagger_at(m, ball, std::vector<double>{0.5, 0.0}).value == 0.0);
    CHECK(G_dagger_at(m, RegionPrototype::cube(2), std::vector<double>{0.5, 0.1}).value == 0.0);
    const double centre = 2.0 * std::numbers::pi * std::pow(0.5, -0.2) / 0.2;
    CHECK(G_dagger_at(m, ball, std::vector<double>{0.0, 0.0}).value == doctest::Approx(centre).epsilon(1e-9));
    CHECK(std::abs(centre - 36.084) < 5e-3);
    const double grid = ball_grid_oracle(0.5, 2.2, 2.0, 0.0, 2048);
    CHECK(std::abs(G_dagger_at(m, ball, std::vector<double>{2.0, 0.0}).value / grid - 1.0) < 0.01);
  }

  TEST_CASE("G_infty and G_dagger agree outside the region") {
    Gen g(73);
    const auto m = balanced(2.2);
    for (const auto& p : {RegionPrototype::ball(2, 0.5), RegionPrototype::cube(2),
                          RegionPrototype::polar_star_lobed(0.35, 0.2, 5, 256)}) {
      int tested = 0;
      while (tested < 100) {
        const auto x = g.point(2, -2.0, 2.0);
        if (p.contains(sp(x)) || p.boundary_distance(sp(x)) < 1e-3) continue;
        ++tested;
        const double a = G_infty_at(m, p, sp(x)).value;
        const double b = G_dagger_at(m, p, sp(x)).value;
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
      }
    }
  }

  TEST_CASE("exterior integrals of the two profiles coincide") {
    IntegralOptions ex;
    ex.domain = ProfileDomain::exterior;
    const auto ball = RegionPrototype::ball(2, 0.5);
    const auto m = balanced(2.2);
    const double a = integral_profile_squared(m, ball, ProfileKind::G_dagger, ex).value;
    const double b = integral_profile_squared(m, ball, ProfileKind::G_dagger).value -
                     integral_profile_squared(m, ball, ProfileKind::G_dagger, [] {
                       IntegralOptions in;
                       in.domain = ProfileDomain::interior;
                       return in;
                     }()).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-5));
    CHECK(a > 0.0);
  }

  TEST_CASE("PSD limit variance by quadrature and Monte Carlo") {
    const auto ball = RegionPrototype::ball(2, 0.5);
    const auto q = limit_variance_psd(pure(1.5), ball);
    IntegralOptions mc;
    mc.method = LimitMethod::monte_carlo_integration;
    const auto m = limit_variance_psd(pure(1.5), ball, mc);
    CHECK(q.regime == RegimeLabel::PSD);
    CHECK(q.method == LimitMethod::quadrature);
    CHECK(m.method == LimitMethod::monte_carlo_integration);
    CHECK(std::abs(q.value / m.value - 1.0) < 0.01);
    CHECK(std::abs(q.value - m.value) < 4.0 * m.error_estimate + q.error_estimate);
    CHECK(q.error_estimate >= 0.0);
    CHECK_FALSE(q.provenance.empty());
  }

  TEST_CASE("PSD limit variance is scale free and monotone in the region") {
    const auto big = limit_variance_psd(pure(1.5), RegionPrototype::ball(2, 0.5)).value;
    CHECK(limit_variance_psd(pure(1.5).scaled(3.0), RegionPrototype::ball(2, 0.5)).value ==
          doctest::Approx(big).epsilon(1e-9));
    CHECK(limit_variance_psd(pure(1.5), RegionPrototype::ball(2, 0.25)).value < big);
    CHECK_THROWS_AS(limit_variance_psd(CoefficientModel::delta(2), RegionPrototype::cube(2)), Error);
  }

  TEST_CASE("ND limit variance by quadrature and Monte Carlo") {
    const auto ball = RegionPrototype::ball(2, 0.5);
    const auto q = limit_variance_nd(balanced(2.2), ball);
    IntegralOptions mc;
    mc.method = LimitMethod::monte_carlo_integration;
    const auto m = limit_variance_nd(balanced(2.2), ball, mc);
    CHECK(q.regime == RegimeLabel::ND_NEE);
    CHECK(std::abs(q.value / m.value - 1.0) < 0.02);
    CHECK_THROWS_AS(limit_variance_nd(pure(1.5), ball), Error);
  }

  TEST_CASE("ND limit variance stays finite below the critical exponent") {
    IntegralOptions o;
    o.rel_tol = 1e-3;
    const auto v = limit_variance_nd(balanced(2.45), RegionPrototype::ball(2, 0.5), o);
    CHECK(v.error_estimate < 1e-2 * v.value);
    CHECK(std::isfinite(v.value));
    CHECK(v.value > limit_variance_nd(balanced(2.2), RegionPrototype::ball(2, 0.5)).value);
  }

  TEST_CASE("profile integrals vanish for a vanishing limit profile") {
    const auto sep = CoefficientModel::separable_nd(SeparableParams{});
    CHECK(G_dagger_at(sep, RegionPrototype::cube(2), std::vector<double>{0.1, 0.2}).value == 0.0);
    CHECK(integral_profile_squared(sep, RegionPrototype::cube(2), ProfileKind::G_dagger).value == 0.0);
  }

  TEST_CASE("one-dimensional profiles") {
    IsotropicParams p;
    p.amplitude = IsotropicParams::Amplitude::pure_power;
    const auto m = CoefficientModel::isotropic(1, 0.75, p);
    const auto seg = RegionPrototype::cube(1);
    const double x = 0.1;
    const double closed = (std::pow(0.5 - x, 0.25) + std::pow(0.5 + x, 0.25)) / 0.25;
    CHECK(G_infty_at(m, seg, std::vector<double>{x}).value == doctest::Approx(closed).epsilon(1e-12));
    CHECK(limit_variance_psd(m, seg).value > 0.0);
  }

  TEST_CASE("SRD limits") {
    CHECK(limit_variance_srd(CoefficientModel::delta(2)).value == 1.0);
    const auto t = CoefficientModel::table(2, {{IVec{0, 0, 0}, 1.5}, {IVec{1, 0, 0}, 0.25}, {IVec{0, 1, 0}, 0.25}});
    CHECK(limit_variance_srd(t).value == doctest::Approx(4.0).epsilon(1e-15));
    const auto iso3 = CoefficientModel::isotropic(2, 3.0);
    const auto A = total_sum(iso3, 2000);
    const auto v = limit_variance_srd(iso3);
    CHECK(v.value == doctest::Approx(A.value * A.value).epsilon(1e-9));
    CHECK(v.error_estimate >= 0.0);
    double prev = 1.0;
    for (double l : {128.0, 256.0, 512.0}) {
      const auto sites = enumerate_sites(RegionPrototype::cube(2), l);
      const auto th = theta_fft(iso3, sites, default_window(2, l, 2.0));
      const double gap = std::abs(sigma_sq(th).value / static_cast<double>(sites.count()) / v.value - 1.0);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 0.05);
    CHECK_THROWS_AS(limit_variance_srd(pure(1.5)), Error);
  }

  TEST_CASE("sigma0 for the cubic sequence") {
    const auto s = example42_sigma0(SeparableParams{});
    CHECK(std::abs(s.value - 69.10509362050149) < 1e-6);
    CHECK(s.error < 1e-6);
    CHECK(s.B == doctest::Approx(1.2020569031595942).epsilon(1e-14));
    std::vector<double> vals;
    for (int i = 1; i <= 200000; ++i) vals.push_back(std::pow(static_cast<double>(i), -3.0));
    const auto trunc = example42_sigma0(SeparableParams{1.0, 3.0, vals});
    CHECK(std::abs(trunc.value - s.value) < 1e-3);
    CHECK(trunc.value < s.value);
  }

  TEST_CASE("sigma0 for a single term") {
    CHECK(example42_sigma0(SeparableParams{1.0, 3.0, {1.0}}).value == 32.0);
  }

  TEST_CASE("sigma0 is homogeneous of degree four") {
    Gen g(79);
    for (int k = 0; k < 5; ++k) {
      const double c = g.uniform(0.2, 5.0);
      std::vector<double> b, cb;
      const int n = static_cast<int>(g.integer(1, 40));
      for (int i = 0; i < n; ++i) {
        b.push_back(g.uniform(0.01, 1.0));
        cb.push_back(c * b.back());
      }
      const double v = example42_sigma0(SeparableParams{1.0, 3.0, b}).value;
      CHECK(example42_sigma0(SeparableParams{1.0, 3.0, cb}).value == doctest::Approx(std::pow(c, 4) * v).epsilon(1e-12));
    }
    const double base = example42_sigma0(SeparableParams{1.0, 3.0, {}}).value;
    CHECK(example42_sigma0(SeparableParams{2.0, 3.0, {}}).value == doctest::Approx(16.0 * base).epsilon(1e-12));
  }

  TEST_CASE("sigma0 rejects divergent sequences") {
    CHECK_THROWS_AS(example42_sigma0(SeparableParams{1.0, 1.4, {}}), Error);
    CHECK_THROWS_AS(example42_sigma0(SeparableParams{1.0, 3.0, {1.0, -0.5}}), Error);
  }

  TEST_CASE("edge-effect extrapolation of constant input") {
    const auto v = sigma_EE_extrapolate({{64, 3.25, 4}, {128, 3.25, 4}, {256, 3.25, 5}});
    CHECK(v.value == doctest::Approx(3.25).epsilon(1e-14));
    CHECK(v.error_estimate < 1e-12);
    CHECK(v.method == LimitMethod::extrapolation);
  }

  TEST_CASE("edge-effect extrapolation rejects bad input") {
    CHECK_THROWS_AS(sigma_EE_extrapolate({{64, 1, 4}, {128, 1, 4}}), Error);
    CHECK_THROWS_AS(sigma_EE_extrapolate({{64, 1, 4}, {32, 1, 4}, {128, 1, 4}}), Error);
    CHECK_THROWS_AS(sigma_EE_extrapolate({{64, 1, 4}, {128, 1, 0}, {256, 1, 4}}), Error);
  }

  TEST_CASE("edge-effect extrapolation of delta site counts") {
    const auto cube = RegionPrototype::cube(2);
    const double t = 2.5;
    std::vector<EdgePoint> pts;
    for (double l : {64.0, 128.0, 256.0, 512.0}) {
      const auto sites = enumerate_sites(cube, l);
      const auto c = classify_sites(cube, l, t, enlargement_window(cube, l, t));
      std::size_t count = 0;
      for (const auto& i : sites.sites)
        if (c.labels[c.window.index(i)] == SiteLabel::boundary) ++count;
      CHECK(count == static_cast<std::size_t>(10.0 * l - 25.0));
      const auto th = theta_fft(CoefficientModel::delta(2), sites, default_window(2, l, 2.0));
      const auto d = variance_decompose(th, c);
      CHECK(d.boundary_sum_scaled == doctest::Approx(static_cast<double>(count) / l).epsilon(1e-12));
      pts.push_back({l, d.boundary_sum_scaled, t});
    }
    const auto v = sigma_EE_extrapolate(pts);
    CHECK(v.value == doctest::Approx(10.0).epsilon(1e-9));
  }

  TEST_CASE("edge-effect extrapolation recovers sigma0 for the separable model") {
    const SeparableParams p{};
    const auto m = CoefficientModel::separable_nd(p);
    const auto cube = RegionPrototype::cube(2);
    std::vector<EdgePoint> pts;
    for (double l : {128.0, 256.0, 512.0}) {
      const double t = default_t_n(l);
      const auto th = theta_fft(m, enumerate_sites(cube, l), default_window(2, l, 2.0));
      const auto d = variance_decompose(th, classify_sites(cube, l, t, enlargement_window(cube, l, t)));
      pts.push_back({l, d.boundary_sum_scaled, t});
    }
    const auto v = sigma_EE_extrapolate(pts);
    CHECK(std::abs(v.value / example42_sigma0(p).value - 1.0) < 0.1);
  }

  TEST_CASE("critical combination") {
    LimitVariance ee;
    ee.value = 5.0;
    ee.error_estimate = 0.1;
    LimitVariance nd;
    nd.value = 2.0;
    nd.error_estimate = 0.01;
    CHECK(combine_critical(ee, nd, 0.0).value == 5.0);
    CHECK(combine_critical(ee, nd, 3.0).value == 23.0);
    LimitVariance zero;
    CHECK(combine_critical(zero, nd, 1.0).value == 2.0);
    const auto sep = CoefficientModel::separable_nd(SeparableParams{1.0, 2.5, {}});
    CHECK(classify(sep).label == RegimeLabel::ND_critical);
    CHECK(critical_combined_variance(sep, RegionPrototype::cube(2), 1.0, ee).value == 5.0);
    CHECK(critical_combined_variance(balanced(2.5), RegionPrototype::cube(2), 0.0, ee).value == 5.0);
    CHECK_THROWS_AS(critical_combined_variance(balanced(2.5), RegionPrototype::cube(2), 1.0, ee), Error);
    CHECK_THROWS_AS(critical_combined_variance(balanced(2.2), RegionPrototype::cube(2), 1.0, ee), Error);
  }
}
