#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "slrd/montecarlo.hpp"
#include "slrd/random.hpp"

namespace slrd {

namespace {

class InnovationSource {
 public:
  InnovationSource(Innovation kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  double operator()() {
    switch (kind_) {
      case Innovation::gaussian: return normal_(rng_);
      case Innovation::rademacher: {
        if (bits_left_ == 0) {
          bits_ = rng_();
          bits_left_ = 64;
        }
        const double v = (bits_ & 1u) ? 1.0 : -1.0;
        bits_ >>= 1;
        --bits_left_;
        return v;
      }
      case Innovation::centered_exponential: return exponential_(rng_) - 1.0;
      case Innovation::shifted_uniform: return kSqrt3 * (2.0 * rng_.uniform() - 1.0);
    }
    return 0.0;
  }

  double normal() { return normal_(rng_); }

 private:
  static constexpr double kSqrt3 = 1.7320508075688772;
  Innovation kind_;
  Xoshiro256 rng_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(K > c) for the Kolmogorov limit law.
double kolmogorov_survival(double c) {
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * c * c);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace

const char* innovation_name(Innovation innovation) {
  switch (innovation) {
    case Innovation::gaussian: return "gaussian";
    case Innovation::rademacher: return "rademacher";
    case Innovation::centered_exponential: return "centered-exponential";
    case Innovation::shifted_uniform: return "shifted-uniform";
  }
  return "unknown";
}

Innovation parse_innovation(const std::string& name) {
  for (Innovation i : {Innovation::gaussian, Innovation::rademacher, Innovation::centered_exponential,
                       Innovation::shifted_uniform})
    if (name == innovation_name(i)) return i;
  fail(ErrorKind::validation, "unknown innovation '" + name + "'");
}

double simulate_sum(const ThetaField& theta, InnovationSpec innovation, std::uint64_t seed) {
  InnovationSource eps(innovation.distribution, seed);
  double s = 0.0;
  for (double v : theta.values) s += v * eps();
  return s;
}

double omitted_tail_sd(const ThetaField& theta) { return std::sqrt(theta.tail_bound); }

SimulationPlan make_plan(const ThetaField& theta, std::size_t max_exact) {
  SimulationPlan plan;
  CompensatedSum total;
  for (double v : theta.values) total.add(v * v);
  plan.total_variance = total.value();
  const std::size_t n = theta.values.size();
  if (max_exact == 0 || max_exact >= n) {
    plan.exact = theta.values;
    return plan;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& v = theta.values;
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_exact), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double x = std::abs(v[a]), y = std::abs(v[b]);
                     return x != y ? x > y : a < b;
                   });
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_exact));
  plan.exact.reserve(max_exact);
  for (std::size_t k = 0; k < max_exact; ++k) plan.exact.push_back(v[order[k]]);
  CompensatedSum rest;
  for (std::size_t k = max_exact; k < n; ++k) rest.add(v[order[k]] * v[order[k]]);
  plan.aggregated_variance = rest.value();
  return plan;
}

double simulate_plan(const SimulationPlan& plan, InnovationSpec innovation, std::uint64_t seed) {
  InnovationSource eps(innovation.distribution, seed);
  double s = 0.0;
  for (double v : plan.exact) s += v * eps();
  if (plan.aggregated_variance > 0) s += std::sqrt(plan.aggregated_variance) * eps.normal();
  return s;
}

std::vector<double> sample_sums(const ThetaField& theta, InnovationSpec innovation, std::size_t replicates,
                                std::uint64_t base_seed) {
  if (replicates < 1) fail(ErrorKind::validation, "replicates must be at least 1");
  std::vector<double> out(replicates);
  const auto n = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] =
        simulate_sum(theta, innovation, stream_seed(base_seed, static_cast<std::uint64_t>(k)));
  return out;
}

std::vector<double> sample_sums(const SimulationPlan& plan, InnovationSpec innovation, std::size_t replicates,
                                std::uint64_t base_seed) {
  if (replicates < 1) fail(ErrorKind::validation, "replicates must be at least 1");
  std::vector<double> out(replicates);
  const auto n = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] =
        simulate_plan(plan, innovation, stream_seed(base_seed, static_cast<std::uint64_t>(k)));
  return out;
}

double kolmogorov_critical_value(double alpha) {
  if (!(alpha > 0 && alpha < 1)) fail(ErrorKind::validation, "alpha must be in (0, 1)");
  double lo = 0.2, hi = 6.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_threshold(std::size_t n, double alpha) {
  if (n == 0) fail(ErrorKind::validation, "KS threshold needs n > 0");
  const double r = std::sqrt(static_cast<double>(n));
  return kolmogorov_critical_value(alpha) / (r + 0.12 + 0.11 / r);
}

double ks_statistic_normal(std::vector<double> z) {
  if (z.empty()) fail(ErrorKind::validation, "KS statistic needs samples");
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

CltReport normality_test(const std::vector<double>& samples, double predicted_scale, const std::string& scale_source) {
  if (samples.empty()) fail(ErrorKind::validation, "normality test needs samples");
  if (samples.size() < 100) fail(ErrorKind::validation, "normality test needs at least 100 replicates");
  if (!(predicted_scale > 0) || !std::isfinite(predicted_scale))
    fail(ErrorKind::validation, "predicted scale must be positive");
  CltReport r;
  r.replicate_count = samples.size();
  r.predicted_scale = predicted_scale;
  r.scale_source = scale_source;
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = samples[i] / predicted_scale;
  const auto n = static_cast<double>(z.size());
  CompensatedSum s1;
  for (double v : z) s1.add(v);
  const double mean = s1.value() / n;
  CompensatedSum s2, s3, s4;
  for (double v : z) {
    const double c = v - mean;
    s2.add(c * c);
    s3.add(c * c * c);
    s4.add(c * c * c * c);
  }
  const double m2 = s2.value() / n;
  r.sample_mean = mean;
  r.sample_variance = s2.value() / (n - 1.0);
  r.ks_threshold = ks_threshold(z.size());
  if (!(m2 > 0)) {
    r.degenerate = true;
    r.ks_statistic = 1.0;
    r.pass = false;
    return r;
  }
  r.skewness = s3.value() / n / std::pow(m2, 1.5);
  r.excess_kurtosis = s4.value() / n / (m2 * m2) - 3.0;
  r.ks_statistic = ks_statistic_normal(std::move(z));
  r.pass = r.ks_statistic < r.ks_threshold;
  return r;
}

GrowthFit growth_regression(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4) fail(ErrorKind::validation, "growth regression needs at least 4 lambda values");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!(pairs[k].first > 0)) fail(ErrorKind::validation, "lambda values must be positive");
    if (!(pairs[k].second > 0) || !std::isfinite(pairs[k].second))
      fail(ErrorKind::validation, "sigma^2 values must be positive and finite");
    if (k > 0 && !(pairs[k].first > pairs[k - 1].first))
      fail(ErrorKind::validation, "lambda values must be strictly increasing");
  }
  if (pairs.back().first < 8.0 * pairs.front().first)
    fail(ErrorKind::validation, "lambda values must span a factor of at least 8");
  const auto n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [l, s] : pairs) {
    mx += std::log(l);
    my += std::log(s);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [l, s] : pairs) {
    const double x = std::log(l) - mx;
    sxx += x * x;
    sxy += x * (std::log(s) - my);
  }
  GrowthFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [l, s] : pairs) {
    const double r = std::log(s) - fit.intercept - fit.slope * std::log(l);
    rss += r * r;
  }
  const boost::math::students_t dist(n - 2.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.confidence_halfwidth = t * std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

Histogram histogram(const std::vector<double>& samples, std::size_t bins) {
  if (samples.empty()) fail(ErrorKind::validation, "histogram needs samples");
  if (bins == 0) fail(ErrorKind::validation, "histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double v : samples) {
    auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) os << h.edges[k] << "," << h.edges[k + 1] << "," << h.counts[k] << "\n";
  return os.str();
}

}  // namespace slrd
