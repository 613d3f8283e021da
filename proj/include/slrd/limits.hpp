#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slrd/coefficients.hpp"
#include "slrd/geometry.hpp"

namespace slrd {

enum class LimitMethod { quadrature, monte_carlo_integration, truncated_series, extrapolation };

const char* limit_method_name(LimitMethod method);

struct LimitVariance {
  RegimeLabel regime = RegimeLabel::SRD;
  double value = 0.0;
  LimitMethod method = LimitMethod::quadrature;
  double error_estimate = 0.0;
  std::string provenance;
};

struct PointValue {
  double value = 0.0;
  double error = 0.0;
};

/// Integral of g_infinity(y - x) over R0; needs beta < d unless x lies outside the closure.
PointValue G_infty_at(const CoefficientModel& model, const RegionPrototype& prototype, std::span<const double> x,
                      double rel_tol = 1e-10);

/// Region integral outside the closure, complement integral inside, zero on the boundary; needs beta > d.
PointValue G_dagger_at(const CoefficientModel& model, const RegionPrototype& prototype, std::span<const double> x,
                       double rel_tol = 1e-10);

enum class ProfileDomain { whole, interior, exterior };

struct IntegralOptions {
  LimitMethod method = LimitMethod::quadrature;
  ProfileDomain domain = ProfileDomain::whole;
  double rel_tol = 1e-6;
  std::uint64_t samples = 400000;
  std::uint64_t seed = 20240601;
};

enum class ProfileKind { G_infty, G_dagger };

/// Integral of the squared profile over R^d, R0 or its complement (d = 1 or 2).
LimitVariance integral_profile_squared(const CoefficientModel& model, const RegionPrototype& prototype,
                                       ProfileKind profile, const IntegralOptions& options = {});

LimitVariance limit_variance_psd(const CoefficientModel& model, const RegionPrototype& prototype,
                                 const IntegralOptions& options = {});
LimitVariance limit_variance_nd(const CoefficientModel& model, const RegionPrototype& prototype,
                                const IntegralOptions& options = {});
LimitVariance limit_variance_srd(const CoefficientModel& model);

struct EdgePoint {
  double lambda = 0.0;
  double boundary_sum_scaled = 0.0;
  double t_n = 0.0;
};

/// Fit a + b / lambda and report a.
LimitVariance sigma_EE_extrapolate(const std::vector<EdgePoint>& points);

struct Sigma0 {
  double value = 0.0;
  double error = 0.0;
  double B = 0.0;
};

/// 16 B^2 [B^2 + sum_k T_k^2 + sum_k T_{k+1}^2] with T_k = sum_{j >= k} b(j).
Sigma0 example42_sigma0(const SeparableParams& b);

/// sigma_EE + c0^2 times the complement-profile integral.
LimitVariance combine_critical(const LimitVariance& sigma_ee, const LimitVariance& nd_integral, double c0);
LimitVariance critical_combined_variance(const CoefficientModel& model, const RegionPrototype& prototype, double c0,
                                         const LimitVariance& sigma_ee, const IntegralOptions& options = {});

}  // namespace slrd
