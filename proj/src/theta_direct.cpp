#include <algorithm>
#include <cmath>

#include "slrd/theta.hpp"
#include "theta_internal.hpp"

namespace slrd {

namespace {

struct OffsetTable {
  IntBox k_box;
  std::vector<double> alpha;
  std::vector<std::ptrdiff_t> site_offsets;
  std::array<std::ptrdiff_t, kMaxDim> stride{};
};

// alpha over K = sites - window, flattened so that alpha(j - i) = alpha[site_offsets[j] + cell_offset(i)].
OffsetTable build_table(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  const int d = window.dim;
  const IntBox& s = sites.bounding_window;
  OffsetTable t;
  t.k_box.dim = d;
  for (int a = 0; a < d; ++a) {
    t.k_box.lo[a] = s.lo[a] - window.hi[a];
    t.k_box.hi[a] = s.hi[a] - window.lo[a];
  }
  std::ptrdiff_t st = 1;
  for (int a = d - 1; a >= 0; --a) {
    t.stride[a] = st;
    st *= static_cast<std::ptrdiff_t>(t.k_box.extent(a));
  }
  const std::size_t n = t.k_box.cell_count();
  t.alpha.resize(n);
  const IntBox kb = t.k_box;
#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < n; ++idx) t.alpha[idx] = model.alpha(kb.point(idx));
  t.site_offsets.reserve(sites.sites.size());
  for (const auto& j : sites.sites) {
    std::ptrdiff_t o = 0;
    for (int a = 0; a < d; ++a) o += static_cast<std::ptrdiff_t>(j[a] - s.lo[a]) * t.stride[a];
    t.site_offsets.push_back(o);
  }
  return t;
}

std::ptrdiff_t cell_offset(const OffsetTable& t, const IntBox& window, const IVec& i) {
  std::ptrdiff_t o = 0;
  for (int a = 0; a < window.dim; ++a) o += static_cast<std::ptrdiff_t>(window.hi[a] - i[a]) * t.stride[a];
  return o;
}

double cell_sum(const OffsetTable& t, std::ptrdiff_t base) {
  double acc = 0.0;
  for (const auto o : t.site_offsets) acc += t.alpha[static_cast<std::size_t>(o + base)];
  return acc;
}

}  // namespace

ThetaField theta_direct(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  detail::check_theta_inputs(model, sites, window);
  const OffsetTable t = build_table(model, sites, window);
  ThetaField f = detail::make_theta_field(model, sites, window);
  const std::size_t n = window.cell_count();
  for (std::size_t idx = 0; idx < n; ++idx) f.values[idx] = cell_sum(t, cell_offset(t, window, window.point(idx)));
  return f;
}

ThetaField theta_direct_parallel(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  detail::check_theta_inputs(model, sites, window);
  const OffsetTable t = build_table(model, sites, window);
  ThetaField f = detail::make_theta_field(model, sites, window);
  const std::size_t n = window.cell_count();
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t idx = 0; idx < n; ++idx) f.values[idx] = cell_sum(t, cell_offset(t, window, window.point(idx)));
  return f;
}

}  // namespace slrd
