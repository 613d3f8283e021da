#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "slrd/coefficients.hpp"
#include "slrd/common.hpp"
#include "slrd/geometry.hpp"

namespace slrd {

/// theta(i) = sum_{j in D_n} alpha(j - i) on a finite window.
struct ThetaField {
  IntBox window;
  std::vector<double> values;
  double rho = 0.0;
  double lambda = 1.0;
  std::size_t site_count = 0;
  /// Rigorous upper bound on the sum of theta^2 outside the window.
  double tail_bound = 0.0;
  /// Far-field quadrature estimate of the same sum.
  double tail_estimate = 0.0;

  double at(const IVec& i) const { return window.contains(i) ? values[window.index(i)] : 0.0; }
};

/// [-ceil(rho lambda), ceil(rho lambda)]^d.
IntBox default_window(int dim, double lambda, double rho);

/// Serial double loop; reference implementation.
ThetaField theta_direct(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);
/// Same summation order as theta_direct, rows distributed over threads.
ThetaField theta_direct_parallel(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);

struct FftOptions {
  /// Per-axis transform size; zero selects the smallest 7-smooth size that avoids wrap-around.
  std::array<std::size_t, kMaxDim> size{};
  /// Reject sizes below the no-wrap minimum before transforming.
  bool enforce_padding = true;
};

ThetaField theta_fft(const CoefficientModel& model, const SiteSet& sites, const IntBox& window,
                     const FftOptions& options = {});

/// Smallest 2^a 3^b 5^c 7^d not below n.
std::size_t next_smooth_size(std::size_t n);

double theta_tail_bound(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);
double theta_tail_estimate(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);

struct SigmaSq {
  double value = 0.0;
  double tail_bound = 0.0;
  double tail_estimate = 0.0;
};

SigmaSq sigma_sq(const ThetaField& theta);
double lindeberg_ratio(const ThetaField& theta);

struct VarianceDecomposition {
  double sigma_sq_total = 0.0;
  double interior_sum = 0.0;
  double exterior_sum = 0.0;
  double boundary_sum = 0.0;
  double boundary_sum_scaled = 0.0;
  /// Window sum of theta^2 outside the classification window.
  double unclassified_sum = 0.0;
  double t_n = 0.0;
  double tail_bound = 0.0;
};

VarianceDecomposition variance_decompose(const ThetaField& theta, const BoundaryClassification& classification);

std::string theta_csv(const ThetaField& theta);
std::vector<char> theta_binary(const ThetaField& theta);

}  // namespace slrd
