#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "slrd/coefficients.hpp"

using namespace slrd;
using slrd::testing::Gen;

namespace {

std::span<const double> sp(const std::vector<double>& v) { return {v.data(), v.size()}; }

CoefficientModel iso(double beta, IsotropicParams::Amplitude a = IsotropicParams::Amplitude::constant, int d = 2) {
  IsotropicParams p;
  p.amplitude = a;
  return CoefficientModel::isotropic(d, beta, p);
}

CoefficientModel orthant() {
  const double c = std::cos(0.3), s = std::sin(0.3);
  return CoefficientModel::anisotropic_orthant(2, AnisotropicParams{{{c, s}, {-s, c}}, {0.8, 0.9}, 0.1});
}

CoefficientModel cones() {
  return CoefficientModel::directional_cones(2, ConesParams{{{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5}, {1.5, 1.8}});
}

double zeta3_oracle() {
  constexpr long kTerms = 1000000;
  double s = 0.0;
  for (long i = kTerms; i >= 1; --i) s += 1.0 / (static_cast<double>(i) * i * i);
  const double n = kTerms;
  return s + 1.0 / (2.0 * n * n) - 1.0 / (2.0 * n * n * n);
}

}  // namespace

TEST_SUITE("coefficients") {
  TEST_CASE("alpha catalogue values") {
    const auto delta = CoefficientModel::delta(2);
    CHECK(delta.alpha(IVec{0, 0, 0}) == 1.0);
    CHECK(delta.alpha(IVec{1, 0, 0}) == 0.0);
    const auto sep = CoefficientModel::separable_nd(SeparableParams{});
    CHECK(sep.alpha(IVec{1, 2, 0}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(sep.alpha(IVec{-1, 2, 0}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(sep.alpha(IVec{3, 0, 0}) == 0.0);
    const double z = zeta3_oracle();
    CHECK(sep.alpha(IVec{0, 0, 0}) == doctest::Approx(-4.0 * z * z).epsilon(1e-12));
    CHECK(sep.b_total() == doctest::Approx(z).epsilon(1e-12));
    CHECK(std::abs(sep.alpha(IVec{0, 0, 0}) + 5.7798) < 1e-4);
  }

  TEST_CASE("isotropic coefficients are radial") {
    const auto m = iso(1.5);
    CHECK(m.alpha(IVec{3, 4, 0}) == doctest::Approx(std::pow(6.0, -1.5)));
    CHECK(m.alpha(IVec{3, 4, 0}) == m.alpha(IVec{-4, 3, 0}));
    const auto pp = iso(1.5, IsotropicParams::Amplitude::pure_power);
    CHECK(pp.alpha(IVec{3, 4, 0}) == doctest::Approx(std::pow(5.0, -1.5)));
  }

  TEST_CASE("override takes precedence and scaling multiplies") {
    const auto m = iso(1.5).with_override({{IVec{0, 0, 0}, -2.0}, {IVec{1, 0, 0}, 7.0}});
    CHECK(m.alpha(IVec{0, 0, 0}) == -2.0);
    CHECK(m.alpha(IVec{1, 0, 0}) == 7.0);
    CHECK(m.alpha(IVec{0, 1, 0}) == doctest::Approx(std::pow(2.0, -1.5)));
    const auto s = m.scaled(-3.0);
    CHECK(s.alpha(IVec{1, 0, 0}) == -21.0);
    CHECK(s.alpha(IVec{2, 2, 0}) == doctest::Approx(-3.0 * m.alpha(IVec{2, 2, 0})));
  }

  TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(CoefficientModel::isotropic(2, 0.9), Error);
    CHECK_THROWS_AS(CoefficientModel::anisotropic_orthant(2, AnisotropicParams{{{1, 0}, {1, 0}}, {1, 1}, 0.1}), Error);
    CHECK_THROWS_AS(CoefficientModel::separable_nd(SeparableParams{1.0, 0.8, {}}), Error);
    CHECK_THROWS_AS(CoefficientModel::table(1, {{IVec{0, 1, 0}, 1.0}}), Error);
  }

  TEST_CASE("gamma of the delta model at sub-unit t") {
    CHECK(gamma(CoefficientModel::delta(2), 0.5).value == 1.0);
  }

  TEST_CASE("gamma bracket for the isotropic model") {
    const auto m = iso(1.5);
    const auto g = gamma(m, 10.0);
    CHECK(g.value >= std::pow(11.0, -1.5));
    CHECK(g.value <= std::pow(11.0 - std::sqrt(2.0), -1.5));
    CHECK(g.upper >= g.value);
    double best = 0.0;
    constexpr int kDirs = 200000;
    for (int k = 0; k < kDirs; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kDirs;
      const IVec i{static_cast<std::int64_t>(std::floor(10.0 * std::cos(phi))),
                   static_cast<std::int64_t>(std::floor(10.0 * std::sin(phi))), 0};
      best = std::max(best, m.alpha(i));
    }
    CHECK(g.value == doctest::Approx(best));
  }

  TEST_CASE("gamma times t^beta tends to c0") {
    const auto m = iso(1.5);
    CHECK(std::abs(std::pow(1e4, 1.5) * gamma(m, 1e4).value - 1.0) < 0.05);
  }

  TEST_CASE("gamma upper bound dominates every coefficient at that radius") {
    Gen g(41);
    for (const auto& m : {iso(1.5), orthant(), cones(), CoefficientModel::separable_nd(SeparableParams{})}) {
      for (int k = 0; k < 200; ++k) {
        const IVec i{g.integer(-60, 60), g.integer(-60, 60), 0};
        const double r = std::hypot(static_cast<double>(i[0]), static_cast<double>(i[1]));
        if (r < 2.0) continue;
        CHECK(std::abs(m.alpha(i)) <= m.envelope(r) * (1.0 + 1e-12));
        CHECK(std::abs(m.alpha(i)) <= gamma(m, r).upper * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("rescaled profile values") {
    const auto m = iso(1.5);
    const double v = g_profile(m, 100.0, std::vector<double>{0.5, 0.0});
    CHECK(std::abs(v / std::pow(2.0, 1.5) - 1.0) < 0.1);
    CHECK(g_profile(CoefficientModel::delta(2), 10.0, std::vector<double>{1.0, 0.0}) == 0.0);
    const double t = 37.0;
    const double g = gamma(m, t).value;
    for (const auto& u : direction_grid(2)) {
      const IVec i{static_cast<std::int64_t>(std::floor(t * u[0])), static_cast<std::int64_t>(std::floor(t * u[1])), 0};
      if (std::abs(m.alpha(i)) == g) {
        CHECK(g_profile(m, t, sp(u)) == doctest::Approx(1.0).epsilon(1e-15));
        break;
      }
    }
    CHECK_THROWS_AS(g_profile(CoefficientModel::table(2, {{IVec{5, 5, 0}, 1.0}}), 1.0, std::vector<double>{5.0, 5.0}),
                    Error);
  }

  TEST_CASE("limit profile values") {
    CHECK(g_limit(iso(1.5), std::vector<double>{2.0, 0.0}) == doctest::Approx(std::pow(2.0, -1.5)));
    const auto o = orthant();
    const double c = std::cos(0.3), s = std::sin(0.3);
    const double phi = std::acos(0.1) + 0.3;
    CHECK(g_limit(o, std::vector<double>{std::cos(phi), std::sin(phi)}) == 0.0);
    CHECK(g_limit(o, std::vector<double>{c, s}) == 0.0);
    CHECK(g_limit(cones(), std::vector<double>{0.0, 1.0}) == 0.0);
    CHECK(g_limit(cones(), std::vector<double>{1.0, 0.0}) > 0.0);
    CHECK(g_limit(CoefficientModel::separable_nd(SeparableParams{}), std::vector<double>{1.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(g_limit(iso(1.5), std::vector<double>{0.0, 0.0}), Error);
  }

  TEST_CASE("limit profile bounded by the radial power") {
    Gen g(43);
    for (const auto& m : {iso(1.5), orthant(), cones(), iso(1.5).scaled(-2.0)}) {
      for (int k = 0; k < 2000; ++k) {
        const auto x = g.point(2, -3.0, 3.0);
        const double r = std::hypot(x[0], x[1]);
        CHECK(std::abs(g_limit(m, sp(x))) <= std::pow(r, -m.beta()) * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("total sum of the delta and separable models") {
    const auto d = total_sum(CoefficientModel::delta(2), 10);
    CHECK(d.value == 1.0);
    CHECK(d.tail_bound == 0.0);
    const auto sep = CoefficientModel::separable_nd(SeparableParams{});
    for (std::int64_t r : {1, 5, 40, 300}) {
      const auto s = total_sum(sep, r);
      CHECK(s.structural_zero);
      CHECK(std::abs(s.value) <= s.tail_bound);
    }
    const auto fin = CoefficientModel::separable_nd(SeparableParams{1.0, 3.0, {0.5, 0.25, 0.125}});
    CHECK(std::abs(total_sum(fin, 3).value) < 1e-15);
    CHECK_THROWS_AS(total_sum(iso(1.5), 10), Error);
  }

  TEST_CASE("isotropic total sum tail bound covers a doubled radius") {
    const auto m = iso(3.0);
    const auto a = total_sum(m, 2000);
    const auto b = total_sum(m, 4000);
    CHECK(std::abs(a.value - b.value) < a.tail_bound);
    CHECK(b.tail_bound < a.tail_bound);
  }

  TEST_CASE("classification examples") {
    const auto psd = classify(iso(1.5));
    CHECK(psd.label == RegimeLabel::PSD);
    CHECK(psd.predicted_variance_exponent == 3.0);
    const auto sep = classify(CoefficientModel::separable_nd(SeparableParams{}));
    CHECK(sep.label == RegimeLabel::ND_EE);
    CHECK(sep.predicted_variance_exponent == 1.0);
    CHECK(sep.requires_A_zero);
    const auto srd = classify(CoefficientModel::delta(2));
    CHECK(srd.label == RegimeLabel::SRD);
    CHECK(srd.predicted_variance_exponent == 2.0);
    const auto nee = classify(iso(2.2).balanced());
    CHECK(nee.label == RegimeLabel::ND_NEE);
    CHECK(nee.predicted_variance_exponent == doctest::Approx(1.6));
    CHECK(classify(iso(2.5).balanced()).label == RegimeLabel::ND_critical);
    CHECK(classify(iso(3.0).balanced()).label == RegimeLabel::ND_EE);
    CHECK(classify(iso(3.0)).label == RegimeLabel::SRD);
  }

  TEST_CASE("classification errors") {
    CHECK_THROWS_AS(classify(iso(2.0)), Error);
    CHECK_THROWS_AS(classify(iso(2.0, IsotropicParams::Amplitude::constant, 1).balanced()), Error);
  }

  TEST_CASE("balanced isotropic sum vanishes") {
    const auto m = iso(2.2).balanced();
    const auto s = total_sum(m, 200);
    CHECK(std::abs(s.value) <= s.tail_bound);
    const auto one = iso(1.8, IsotropicParams::Amplitude::pure_power, 1).balanced();
    const auto t = total_sum(one, 1000000);
    CHECK(std::abs(t.value) <= t.tail_bound);
  }

  TEST_CASE("classification is invariant under rescaling") {
    Gen g(47);
    for (const auto& m : {iso(1.5), iso(3.0), iso(2.2).balanced(), CoefficientModel::delta(2),
                          CoefficientModel::separable_nd(SeparableParams{})}) {
      const auto base = classify(m);
      for (int k = 0; k < 3; ++k) {
        const double c = g.uniform(0.01, 100.0) * (k == 1 ? -1.0 : 1.0);
        const auto other = classify(m.scaled(c));
        CHECK(other.label == base.label);
        CHECK(other.predicted_variance_exponent == base.predicted_variance_exponent);
      }
    }
  }

  TEST_CASE("regular variation diagnostic decreases") {
    const auto m = iso(1.5);
    const double a = regular_variation_diagnostic(m, 1e2, 0.25, 4.0);
    const double b = regular_variation_diagnostic(m, 1e3, 0.25, 4.0);
    const double c = regular_variation_diagnostic(m, 1e4, 0.25, 4.0);
    CHECK(a > b);
    CHECK(b > c);
    CHECK(regular_variation_diagnostic(CoefficientModel::delta(2), 4.0, 0.25, 4.0) == 0.0);
    const auto sep = CoefficientModel::separable_nd(SeparableParams{});
    const double s1 = regular_variation_diagnostic(sep, 16.0, 0.25, 4.0);
    const double s2 = regular_variation_diagnostic(sep, 256.0, 0.25, 4.0);
    CHECK(s2 < s1);
    CHECK_THROWS_AS(regular_variation_diagnostic(m, 10.0, 2.0, 1.0), Error);
  }

  TEST_CASE("square tail bound covers the windowed remainder") {
    const auto m = iso(1.5);
    double direct = 0.0;
    for (std::int64_t a = -400; a <= 400; ++a)
      for (std::int64_t b = -400; b <= 400; ++b)
        if (std::max(std::abs(a), std::abs(b)) > 50) direct += std::pow(m.alpha(IVec{a, b, 0}), 2);
    CHECK(square_tail_bound(m, 50.0) >= direct);
    const auto t = CoefficientModel::table(2, {{IVec{0, 0, 0}, 1.0}, {IVec{3, 0, 0}, 2.0}});
    CHECK(square_tail_bound(t, 2.0) == 4.0);
    CHECK(square_tail_bound(t, 3.0) == 0.0);
  }

  TEST_CASE("table csv round trip") {
    const std::map<IVec, double> e = {{IVec{0, 0, 0}, 1.5}, {IVec{1, 0, 0}, 0.25}, {IVec{0, -1, 0}, -0.125}};
    CHECK(read_table_csv(table_csv(e, 2), 2) == e);
    CHECK(read_table_csv("0,0,1.5\n1,0,0.25\n", 2).size() == 2);
    CHECK_THROWS_AS(read_table_csv("0,1.5\n", 2), Error);
    CHECK_THROWS_AS(read_table_csv("0,x,1.5\n", 2), Error);
  }
}
