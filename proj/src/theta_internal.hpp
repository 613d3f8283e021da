#pragma once

#include "slrd/theta.hpp"

namespace slrd::detail {

void check_theta_inputs(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);
/// Zero-filled field with metadata and tail terms set.
ThetaField make_theta_field(const CoefficientModel& model, const SiteSet& sites, const IntBox& window);

}  // namespace slrd::detail
