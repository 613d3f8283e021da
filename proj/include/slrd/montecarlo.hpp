#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slrd/theta.hpp"

namespace slrd {

enum class Innovation { gaussian, rademacher, centered_exponential, shifted_uniform };

const char* innovation_name(Innovation innovation);
Innovation parse_innovation(const std::string& name);

/// Mean 0, variance 1 by construction.
struct InnovationSpec {
  Innovation distribution = Innovation::gaussian;
};

/// One draw of sum_{i in W} theta(i) eps(i); deterministic in the seed.
double simulate_sum(const ThetaField& theta, InnovationSpec innovation, std::uint64_t seed);

/// Standard deviation of the omitted sum outside the window, bounded through the tail bound.
double omitted_tail_sd(const ThetaField& theta);

/// Cells kept exactly and the Gaussian block standing in for the rest.
struct SimulationPlan {
  std::vector<double> exact;
  double aggregated_variance = 0.0;
  double total_variance = 0.0;
};

/// Keeps the `max_exact` cells of largest |theta| (all if 0); the others become one Gaussian block.
SimulationPlan make_plan(const ThetaField& theta, std::size_t max_exact = 0);

double simulate_plan(const SimulationPlan& plan, InnovationSpec innovation, std::uint64_t seed);

/// Replicate k uses stream_seed(base_seed, k).
std::vector<double> sample_sums(const ThetaField& theta, InnovationSpec innovation, std::size_t replicates,
                                std::uint64_t base_seed);
std::vector<double> sample_sums(const SimulationPlan& plan, InnovationSpec innovation, std::size_t replicates,
                                std::uint64_t base_seed);

struct CltReport {
  std::size_t replicate_count = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_statistic = 0.0;
  double ks_threshold = 0.0;
  bool pass = false;
  bool degenerate = false;
  double predicted_scale = 0.0;
  std::string scale_source;
};

/// Critical value of the Kolmogorov distribution: P(K > c) = alpha.
double kolmogorov_critical_value(double alpha);
/// Level-alpha KS threshold with the finite-sample correction c / (sqrt n + 0.12 + 0.11 / sqrt n).
double ks_threshold(std::size_t n, double alpha = 0.01);
double ks_statistic_normal(std::vector<double> standardized);

CltReport normality_test(const std::vector<double>& samples, double predicted_scale,
                         const std::string& scale_source = "computed sigma_n");

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double confidence_halfwidth = 0.0;
};

/// Least squares of log sigma^2 on log lambda with a 95% t half-width.
GrowthFit growth_regression(const std::vector<std::pair<double, double>>& pairs);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

Histogram histogram(const std::vector<double>& samples, std::size_t bins);
std::string histogram_csv(const Histogram& h);

}  // namespace slrd
