#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slrd/limits.hpp"
#include "slrd/quadrature.hpp"
#include "slrd/random.hpp"

namespace slrd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Intervals = std::vector<std::pair<double, double>>;

void check_limit_dim(const CoefficientModel& model, const RegionPrototype& prototype) {
  if (model.dim() != prototype.dim()) fail(ErrorKind::validation, "model and prototype dimensions differ");
  if (model.dim() > 2) fail(ErrorKind::domain, "limit profiles are implemented for d = 1 and d = 2");
}

double span_integral(double r1, double r2, double p) {
  if (r1 == 0.0) return std::pow(r2, p) / p;
  return (std::pow(r2, p) - std::pow(r1, p)) / p;
}

// Radial integral of r^(d - 1 - beta) along x + r u over R0 or, for `complement`, over its complement.
double ray_term(const RegionPrototype& prototype, std::span<const double> x, std::span<const double> u, double p,
                bool complement, Intervals& buf) {
  prototype.ray_intervals(x, u, buf);
  double s = 0.0;
  if (!complement) {
    for (const auto& [r1, r2] : buf) s += span_integral(r1, r2, p);
    return s;
  }
  double prev = 0.0;
  for (const auto& [r1, r2] : buf) {
    if (r1 > prev) s += span_integral(prev, r1, p);
    prev = r2;
  }
  return s + std::pow(prev, p) / -p;
}

struct ProfileEvaluator {
  const CoefficientModel& model;
  const RegionPrototype& prototype;
  bool dagger;
  double rel_tol;
  double p;

  PointValue operator()(std::span<const double> x) const {
    if (model.g_limit_vanishes()) return {};
    const int d = model.dim();
    bool complement = false;
    if (dagger) {
      if (prototype.boundary_distance(x) == 0.0) return {};
      complement = prototype.contains(x);
    }
    Intervals buf;
    if (d == 1) {
      double v = 0.0;
      for (double dir : {-1.0, 1.0}) {
        const double u[1] = {dir};
        const std::span<const double> us(u, 1);
        v += model.g_angular(us) * ray_term(prototype, x, us, p, complement, buf);
      }
      return {v, 0.0};
    }
    std::vector<double> pts = prototype.angular_breakpoints(x);
    for (double b : model.g_breakpoints()) pts.push_back(b);
    pts.push_back(0.0);
    pts.push_back(kTwoPi);
    std::sort(pts.begin(), pts.end());
    auto f = [&](double phi) {
      const double u[2] = {std::cos(phi), std::sin(phi)};
      const std::span<const double> us(u, 2);
      const double a = model.g_angular(us);
      if (a == 0.0) return 0.0;
      return a * ray_term(prototype, x, us, p, complement, buf);
    };
    const QuadResult r = integrate(f, std::span<const double>(pts), {1e-15, rel_tol, 2000});
    return {r.value, r.error};
  }
};

ProfileEvaluator make_evaluator(const CoefficientModel& model, const RegionPrototype& prototype, ProfileKind kind,
                                double rel_tol) {
  check_limit_dim(model, prototype);
  const int d = model.dim();
  const double beta = model.beta();
  if (kind == ProfileKind::G_infty && !(beta > 0 && beta < d))
    fail(ErrorKind::domain, "G_infty needs 0 < beta < d; use G_dagger for beta >= d");
  if (kind == ProfileKind::G_dagger && !(beta > d && std::isfinite(beta)))
    fail(ErrorKind::domain, "G_dagger needs d < beta < infinity");
  return {model, prototype, kind == ProfileKind::G_dagger, rel_tol, d - beta};
}

// Sum of G^2 |J| along a ray from the origin: [0, rb] as rb (1 - (1 - t)^3), [rb, 2 rb] as rb (1 + t^3),
// [2 rb, inf) as 2 rb / w.
QuadResult radial_square(const ProfileEvaluator& G, std::span<const double> u, double rb, ProfileDomain domain,
                         double rel_tol) {
  const int d = G.model.dim();
  double x[2];
  auto at = [&](double s) {
    for (int a = 0; a < d; ++a) x[a] = s * u[a];
    const double g = G(std::span<const double>(x, static_cast<std::size_t>(d))).value;
    return g * g * (d == 2 ? s : 1.0);
  };
  const QuadTolerance tol{1e-300, rel_tol, 400};
  const double unit[2] = {0.0, 1.0};
  const std::span<const double> pts(unit, 2);
  QuadResult total;
  auto add = [&](const QuadResult& r) {
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  };
  if (domain != ProfileDomain::exterior) {
    add(integrate(
        [&](double t) {
          const double w = 1.0 - t;
          return at(rb * (1.0 - w * w * w)) * 3.0 * rb * w * w;
        },
        pts, tol));
  }
  if (domain != ProfileDomain::interior) {
    add(integrate([&](double t) { return at(rb * (1.0 + t * t * t)) * 3.0 * rb * t * t; }, pts, tol));
    add(integrate(
        [&](double w) {
          if (w == 0.0) return 0.0;
          return at(2.0 * rb / w) * 2.0 * rb / (w * w);
        },
        pts, tol));
  }
  return total;
}

LimitVariance quadrature_square(const ProfileEvaluator& G, const IntegralOptions& o) {
  const int d = G.model.dim();
  LimitVariance out;
  out.method = LimitMethod::quadrature;
  if (G.model.g_limit_vanishes()) return out;
  const double inner = o.rel_tol * 0.1;
  if (d == 1) {
    QuadResult total;
    for (double dir : {-1.0, 1.0}) {
      const double u[1] = {dir};
      const std::span<const double> us(u, 1);
      const auto r = radial_square(G, us, G.prototype.radius_along(us), o.domain, inner);
      total.value += r.value;
      total.error += r.error;
    }
    out.value = total.value;
    out.error_estimate = total.error + inner * std::abs(total.value);
    return out;
  }
  const double origin[2] = {0.0, 0.0};
  std::vector<double> pts = G.prototype.angular_breakpoints(std::span<const double>(origin, 2));
  pts.push_back(0.0);
  pts.push_back(kTwoPi);
  std::sort(pts.begin(), pts.end());
  double inner_error = 0.0;
  auto f = [&](double phi) {
    const double u[2] = {std::cos(phi), std::sin(phi)};
    const std::span<const double> us(u, 2);
    const auto r = radial_square(G, us, G.prototype.radius_along(us), o.domain, inner);
    inner_error = std::max(inner_error, r.error / std::max(std::abs(r.value), 1e-300));
    return r.value;
  };
  const QuadResult r = integrate(f, std::span<const double>(pts), {1e-300, o.rel_tol, 400});
  out.value = r.value;
  out.error_estimate = r.error + inner_error * std::abs(r.value);
  if (!r.converged) fail(ErrorKind::numerical, "profile integral did not reach the requested tolerance");
  return out;
}

double unit_sphere_area(int d) { return d == 1 ? 2.0 : kTwoPi; }

// Importance sampling: half uniform on [-1, 1]^d, half radial Pareto |x| = s0 / U with uniform direction.
LimitVariance monte_carlo_square(const ProfileEvaluator& G, const IntegralOptions& o) {
  const int d = G.model.dim();
  LimitVariance out;
  out.method = LimitMethod::monte_carlo_integration;
  if (G.model.g_limit_vanishes()) return out;
  if (o.samples < 2) fail(ErrorKind::validation, "Monte Carlo integration needs at least 2 samples");
  constexpr double kBox = 1.0, kS0 = 0.5;
  const double box_density = 1.0 / std::pow(2.0 * kBox, d);
  const double area = unit_sphere_area(d);
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (o.samples + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks), squares(chunks);
  std::vector<std::uint64_t> counts(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::uint64_t c = 0; c < chunks; ++c) {
    Xoshiro256 rng(stream_seed(o.seed, c));
    const std::uint64_t n = std::min(kChunk, o.samples - c * kChunk);
    CompensatedSum s, q;
    double x[2];
    for (std::uint64_t k = 0; k < n; ++k) {
      if (rng.uniform() < 0.5) {
        for (int a = 0; a < d; ++a) x[a] = kBox * (2.0 * rng.uniform() - 1.0);
      } else {
        const double r = kS0 / (1.0 - rng.uniform());
        if (d == 1) {
          x[0] = rng.uniform() < 0.5 ? -r : r;
        } else {
          const double phi = kTwoPi * rng.uniform();
          x[0] = r * std::cos(phi);
          x[1] = r * std::sin(phi);
        }
      }
      const std::span<const double> xs(x, static_cast<std::size_t>(d));
      double norm = 0.0, cheb = 0.0;
      for (int a = 0; a < d; ++a) {
        norm += x[a] * x[a];
        cheb = std::max(cheb, std::abs(x[a]));
      }
      norm = std::sqrt(norm);
      double density = 0.0;
      if (cheb <= kBox) density += 0.5 * box_density;
      if (norm > kS0) density += 0.5 * kS0 / (area * std::pow(norm, d + 1));
      double v = 0.0;
      const bool inside = G.prototype.contains(xs);
      const bool keep = o.domain == ProfileDomain::whole || (o.domain == ProfileDomain::interior) == inside;
      if (keep) {
        const double g = G(xs).value;
        v = g * g / density;
      }
      s.add(v);
      q.add(v * v);
    }
    sums[c] = s.value();
    squares[c] = q.value();
    counts[c] = n;
  }
  CompensatedSum s, q;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s.add(sums[c]);
    q.add(squares[c]);
  }
  const auto n = static_cast<double>(o.samples);
  const double mean = s.value() / n;
  const double var = std::max(0.0, (q.value() / n - mean * mean) * n / (n - 1.0));
  out.value = mean;
  out.error_estimate = std::sqrt(var / n);
  return out;
}

std::string format_note(const char* text, double a, double b) {
  std::ostringstream os;
  os.precision(6);
  os << text << " slope=" << a << " rms_residual=" << b;
  return os.str();
}

}  // namespace

const char* limit_method_name(LimitMethod method) {
  switch (method) {
    case LimitMethod::quadrature: return "quadrature";
    case LimitMethod::monte_carlo_integration: return "monte-carlo-integration";
    case LimitMethod::truncated_series: return "truncated-series";
    case LimitMethod::extrapolation: return "extrapolation";
  }
  return "unknown";
}

PointValue G_infty_at(const CoefficientModel& model, const RegionPrototype& prototype, std::span<const double> x,
                      double rel_tol) {
  if (static_cast<int>(x.size()) != prototype.dim()) fail(ErrorKind::validation, "point dimension mismatch");
  check_limit_dim(model, prototype);
  const double beta = model.beta();
  if (beta >= model.dim() && std::isfinite(beta) && !prototype.contains(x) && prototype.boundary_distance(x) > 0.0)
    return ProfileEvaluator{model, prototype, false, rel_tol, model.dim() - beta}(x);
  return make_evaluator(model, prototype, ProfileKind::G_infty, rel_tol)(x);
}

PointValue G_dagger_at(const CoefficientModel& model, const RegionPrototype& prototype, std::span<const double> x,
                       double rel_tol) {
  if (static_cast<int>(x.size()) != prototype.dim()) fail(ErrorKind::validation, "point dimension mismatch");
  return make_evaluator(model, prototype, ProfileKind::G_dagger, rel_tol)(x);
}

LimitVariance integral_profile_squared(const CoefficientModel& model, const RegionPrototype& prototype,
                                       ProfileKind profile, const IntegralOptions& options) {
  if (!(options.rel_tol > 0 && options.rel_tol < 1)) fail(ErrorKind::validation, "rel_tol must be in (0, 1)");
  const bool mc = options.method == LimitMethod::monte_carlo_integration;
  if (!mc && options.method != LimitMethod::quadrature)
    fail(ErrorKind::validation, "profile integrals use quadrature or Monte Carlo integration");
  const double point_tol = mc ? 1e-6 : std::max(1e-12, options.rel_tol * 1e-3);
  const ProfileEvaluator G = make_evaluator(model, prototype, profile, point_tol);
  if (profile == ProfileKind::G_dagger && model.beta() >= model.dim() + 0.5 && !model.g_limit_vanishes())
    fail(ErrorKind::domain, "G_dagger is not square integrable near the boundary for beta >= d + 1/2");
  LimitVariance out = mc ? monte_carlo_square(G, options) : quadrature_square(G, options);
  out.regime = profile == ProfileKind::G_infty ? RegimeLabel::PSD : RegimeLabel::ND_NEE;
  out.provenance = profile == ProfileKind::G_infty ? "integral of G_infty^2" : "integral of G_dagger^2";
  return out;
}

LimitVariance limit_variance_psd(const CoefficientModel& model, const RegionPrototype& prototype,
                                 const IntegralOptions& options) {
  if (classify(model).label != RegimeLabel::PSD) fail(ErrorKind::domain, "limit_variance_psd needs a PSD model");
  LimitVariance out = integral_profile_squared(model, prototype, ProfileKind::G_infty, options);
  out.provenance = "PSD limit: integral of G_infty^2 over R^d";
  return out;
}

LimitVariance limit_variance_nd(const CoefficientModel& model, const RegionPrototype& prototype,
                                const IntegralOptions& options) {
  if (classify(model).label != RegimeLabel::ND_NEE)
    fail(ErrorKind::domain, "limit_variance_nd needs an ND model without edge effect (A = 0, d < beta < d + 1/2)");
  LimitVariance out = integral_profile_squared(model, prototype, ProfileKind::G_dagger, options);
  out.provenance = "ND limit without edge effect: integral of G_dagger^2 over R^d";
  return out;
}

LimitVariance limit_variance_srd(const CoefficientModel& model) {
  if (classify(model).label != RegimeLabel::SRD) fail(ErrorKind::domain, "limit_variance_srd needs an SRD model");
  const int d = model.dim();
  std::int64_t radius = d == 1 ? (std::int64_t{1} << 22) : (d == 2 ? 2000 : 128);
  if (model.support_radius() < std::numeric_limits<double>::infinity())
    radius = std::min(radius, static_cast<std::int64_t>(std::ceil(model.support_radius())));
  const SumEstimate A = total_sum(model, radius);
  if (!(std::abs(A.value) > A.tail_bound))
    fail(ErrorKind::numerical, "total sum A is indistinguishable from 0 at the achievable tail bound");
  LimitVariance out;
  out.regime = RegimeLabel::SRD;
  out.method = LimitMethod::truncated_series;
  out.value = A.value * A.value;
  out.error_estimate = 2.0 * std::abs(A.value) * A.tail_bound + A.tail_bound * A.tail_bound;
  out.provenance = "SRD limit: square of the total coefficient sum A";
  return out;
}

LimitVariance sigma_EE_extrapolate(const std::vector<EdgePoint>& points) {
  if (points.size() < 3) fail(ErrorKind::validation, "sigma_EE extrapolation needs at least 3 lambda values");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    if (!(p.lambda > 0) || !std::isfinite(p.boundary_sum_scaled))
      fail(ErrorKind::validation, "extrapolation points need positive lambda and finite values");
    if (!(p.t_n > 0)) fail(ErrorKind::validation, "each extrapolation point must record its t_n");
    if (k > 0 && !(p.lambda > points[k - 1].lambda))
      fail(ErrorKind::validation, "lambda values must be strictly increasing");
  }
  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += 1.0 / p.lambda;
    my += p.boundary_sum_scaled;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, sx2 = 0.0;
  for (const auto& p : points) {
    const double x = 1.0 / p.lambda;
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (p.boundary_sum_scaled - my);
    sx2 += x * x;
  }
  const double b = sxy / sxx;
  const double a = my - b * mx;
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = p.boundary_sum_scaled - a - b / p.lambda;
    rss += r * r;
  }
  const double s2 = rss / (n - 2.0);
  LimitVariance out;
  out.regime = RegimeLabel::ND_EE;
  out.method = LimitMethod::extrapolation;
  out.value = a;
  out.error_estimate = std::sqrt(s2 * sx2 / (n * sxx));
  out.provenance = format_note("edge-effect constant: a + b / lambda fit of the scaled boundary sum;", b,
                               std::sqrt(rss / n));
  if (a < 0) fail(ErrorKind::numerical, "extrapolated edge-effect constant is negative");
  return out;
}

Sigma0 example42_sigma0(const SeparableParams& b) {
  Sigma0 out;
  if (!b.values.empty()) {
    for (double v : b.values)
      if (!(v > 0) || !std::isfinite(v)) fail(ErrorKind::validation, "b(i) must be positive and finite");
    const std::size_t K = b.values.size();
    std::vector<long double> T(K + 1, 0.0L);
    for (std::size_t k = K; k >= 1; --k) T[k - 1] = T[k] + b.values[k - 1];
    CompensatedSum sq;
    for (std::size_t k = K; k >= 1; --k) sq.add(static_cast<double>(T[k - 1] * T[k - 1]));
    out.B = static_cast<double>(T[0]);
    out.value = 32.0 * out.B * out.B * sq.value();
    out.error = 1e-15 * out.value * static_cast<double>(K);
    return out;
  }
  const double c = b.scale, p = b.power;
  if (!(c > 0) || !std::isfinite(c)) fail(ErrorKind::validation, "b scale must be positive");
  if (!(p > 1.5)) fail(ErrorKind::domain, "divergent: sum of squared tails needs b(i) ~ i^-p with p > 3/2");
  constexpr std::int64_t K = std::int64_t{1} << 20;
  const double Kd = static_cast<double>(K);
  // Euler-Maclaurin for sum_{i >= K} i^-p.
  const long double tailK = std::pow(Kd, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(Kd, -p) +
                            p * std::pow(Kd, -p - 1.0) / 12.0 -
                            p * (p + 1.0) * (p + 2.0) * std::pow(Kd, -p - 3.0) / 720.0;
  const double em_error = p * (p + 1) * (p + 2) * (p + 3) * (p + 4) * std::pow(Kd, -p - 5.0) / 30240.0;
  long double T = tailK;
  CompensatedSum sq;
  sq.add(static_cast<double>(T * T));
  for (std::int64_t k = K - 1; k >= 1; --k) {
    T += std::pow(static_cast<long double>(k), -static_cast<long double>(p));
    sq.add(static_cast<double>(T * T));
  }
  const double lower = std::pow(Kd + 1.0, 3.0 - 2.0 * p) / ((p - 1.0) * (p - 1.0) * (2.0 * p - 3.0));
  const double upper = std::pow(Kd - 1.0, 3.0 - 2.0 * p) / ((p - 1.0) * (p - 1.0) * (2.0 * p - 3.0));
  const double B1 = static_cast<double>(T);
  const double sum_sq = sq.value() + 0.5 * (lower + upper);
  const double sum_err = 0.5 * (upper - lower) + 2.0 * B1 * em_error * Kd + 1e-15 * sum_sq;
  out.B = c * B1;
  out.value = 32.0 * std::pow(c, 4) * B1 * B1 * sum_sq;
  out.error = 32.0 * std::pow(c, 4) * B1 * B1 * sum_err + 64.0 * std::pow(c, 4) * B1 * em_error * sum_sq;
  return out;
}

LimitVariance combine_critical(const LimitVariance& sigma_ee, const LimitVariance& nd_integral, double c0) {
  if (!std::isfinite(c0)) fail(ErrorKind::validation, "c0 must be finite");
  if (sigma_ee.value < 0 || nd_integral.value < 0) fail(ErrorKind::validation, "components must be non-negative");
  LimitVariance out;
  out.regime = RegimeLabel::ND_critical;
  out.method = sigma_ee.method;
  out.value = sigma_ee.value + c0 * c0 * nd_integral.value;
  out.error_estimate = sigma_ee.error_estimate + c0 * c0 * nd_integral.error_estimate;
  out.provenance = "critical ND limit: edge-effect constant plus c0^2 times the integral of G_dagger^2";
  return out;
}

LimitVariance critical_combined_variance(const CoefficientModel& model, const RegionPrototype& prototype, double c0,
                                         const LimitVariance& sigma_ee, const IntegralOptions& options) {
  if (classify(model).label != RegimeLabel::ND_critical)
    fail(ErrorKind::domain, "critical_combined_variance needs A = 0 and beta = d + 1/2");
  check_limit_dim(model, prototype);
  (void)options;
  LimitVariance nd;
  nd.regime = RegimeLabel::ND_critical;
  if (c0 != 0.0 && !model.g_limit_vanishes())
    fail(ErrorKind::domain, "G_dagger is not square integrable at beta = d + 1/2 for a nonzero limit profile");
  return combine_critical(sigma_ee, nd, c0);
}

}  // namespace slrd
