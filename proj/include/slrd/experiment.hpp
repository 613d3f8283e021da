#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slrd/coefficients.hpp"
#include "slrd/geometry.hpp"
#include "slrd/limits.hpp"
#include "slrd/montecarlo.hpp"
#include "slrd/theta.hpp"

namespace slrd {

enum class TnRule { log, sqrt, fixed };

/// Boundary shell half-width as a function of lambda.
struct TnSpec {
  TnRule rule = TnRule::log;
  double value = 0.0;

  double at(double lambda) const;
  bool operator==(const TnSpec&) const = default;
};

std::string tn_spec_string(const TnSpec& spec);
TnSpec parse_tn_spec(const std::string& text);

enum class ThetaMethod { fft, direct };

struct ExperimentSettings {
  std::vector<double> lambda_grid;
  double rho = 4.0;
  TnSpec t_n;
  InnovationSpec innovation;
  /// 0 skips the CLT report.
  std::size_t replicates = 2000;
  std::uint64_t base_seed = 0;
  /// Cells simulated exactly per replicate; the rest form one Gaussian block (0 keeps all).
  std::size_t max_exact = std::size_t{1} << 18;
  ThetaMethod theta_method = ThetaMethod::fft;
  IntegralOptions limit_options;
};

struct LambdaRow {
  double lambda = 0.0;
  std::size_t site_count = 0;
  double sigma_sq = 0.0;
  double tail_bound = 0.0;
  double tail_estimate = 0.0;
  double lindeberg_ratio = 0.0;
  VarianceDecomposition decomposition;
  /// tail_bound below 1% of sigma_sq.
  bool valid = false;
  /// Theorem scale squared; 0 when unavailable.
  double predicted_sq = 0.0;
  /// (sigma_sq + tail_estimate) / predicted_sq.
  double ratio = 0.0;
};

struct ExperimentReport {
  DependenceClass dependence;
  std::vector<LambdaRow> rows;
  std::optional<GrowthFit> growth;
  std::optional<LimitVariance> limit;
  std::string scale_description;
  std::optional<CltReport> clt;
  std::optional<CltReport> clt_theorem_scale;
  double aggregated_variance_fraction = 0.0;
  std::vector<double> samples;
};

/// Variance scan, decomposition, growth fit, limit comparison and CLT check at the largest lambda.
ExperimentReport regime_experiment(const CoefficientModel& model, const RegionPrototype& prototype,
                                   const ExperimentSettings& settings);

/// Theta over the default window by the chosen method.
ThetaField compute_theta(const CoefficientModel& model, const SiteSet& sites, double rho, ThetaMethod method);

}  // namespace slrd
