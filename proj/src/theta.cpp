#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>

#include "slrd/theta.hpp"
#include "theta_internal.hpp"

namespace slrd {

namespace detail {

void check_theta_inputs(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  if (sites.dim != model.dim() || window.dim != model.dim())
    fail(ErrorKind::validation, "window, sites and model must share a dimension");
  if (sites.sites.empty()) fail(ErrorKind::domain, "empty site set: lambda too small for the region");
  if (window.cell_count() == 0) fail(ErrorKind::validation, "empty window");
}

ThetaField make_theta_field(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  ThetaField f;
  f.window = window;
  f.lambda = sites.lambda;
  f.site_count = sites.sites.size();
  std::int64_t w = 0;
  for (int a = 0; a < window.dim; ++a) w = std::max({w, -window.lo[a], window.hi[a]});
  f.rho = static_cast<double>(w) / sites.lambda;
  f.values.assign(window.cell_count(), 0.0);
  f.tail_bound = theta_tail_bound(model, sites, window);
  f.tail_estimate = theta_tail_estimate(model, sites, window);
  return f;
}

}  // namespace detail

IntBox default_window(int dim, double lambda, double rho) {
  if (!(rho > 0)) fail(ErrorKind::validation, "rho must be positive");
  return IntBox::cube(dim, static_cast<std::int64_t>(std::ceil(rho * lambda)));
}

double theta_tail_bound(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  const int d = window.dim;
  std::int64_t inner = std::numeric_limits<std::int64_t>::max();
  std::int64_t reach = 0;
  for (int a = 0; a < d; ++a) {
    inner = std::min({inner, -window.lo[a], window.hi[a]});
    reach = std::max({reach, -sites.bounding_window.lo[a], sites.bounding_window.hi[a]});
  }
  inner = std::max<std::int64_t>(inner, -1);
  const double n = static_cast<double>(sites.sites.size());
  // Outside the window |i|_inf > inner, so |j - i| >= |i|_inf - reach for every site j.
  const double h = static_cast<double>(reach);
  const double sum = lattice_shell_tail(d, static_cast<double>(inner), [&](double m) {
    const double e = model.envelope(std::max(m - h, 0.0));
    return e * e;
  });
  return n * n * sum;
}

namespace {

struct SiteBlock {
  double count;
  double centroid[kMaxDim];
};

std::vector<SiteBlock> site_blocks(const SiteSet& sites, int per_axis) {
  const int d = sites.dim;
  const IntBox& b = sites.bounding_window;
  std::int64_t side = 1;
  for (int a = 0; a < d; ++a) side = std::max(side, (b.extent(a) + per_axis - 1) / per_axis);
  std::map<IVec, SiteBlock> blocks;
  for (const auto& j : sites.sites) {
    IVec key{};
    for (int a = 0; a < d; ++a) key[a] = (j[a] - b.lo[a]) / side;
    auto& blk = blocks[key];
    blk.count += 1.0;
    for (int a = 0; a < d; ++a) blk.centroid[a] += static_cast<double>(j[a]);
  }
  std::vector<SiteBlock> out;
  out.reserve(blocks.size());
  for (auto& [key, blk] : blocks) {
    for (int a = 0; a < d; ++a) blk.centroid[a] /= blk.count;
    out.push_back(blk);
  }
  return out;
}

// Sum over the box [lo, hi] of theta^2, tiled into sub-boxes of side about `stride`.
double box_far_sum(const CoefficientModel& model, const std::vector<SiteBlock>& blocks, int d,
                   const std::array<std::int64_t, kMaxDim>& lo, const std::array<std::int64_t, kMaxDim>& hi,
                   std::int64_t stride) {
  std::int64_t parts[kMaxDim] = {1, 1, 1};
  for (int a = 0; a < d; ++a) {
    if (hi[a] < lo[a]) return 0.0;
    parts[a] = std::max<std::int64_t>(1, (hi[a] - lo[a] + stride) / stride);
  }
  const std::int64_t tiles = parts[0] * (d > 1 ? parts[1] : 1) * (d > 2 ? parts[2] : 1);
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(dynamic)
  for (std::int64_t t = 0; t < tiles; ++t) {
    std::int64_t rem = t;
    double centre[kMaxDim];
    double cells = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const std::int64_t p = rem % parts[a];
      rem /= parts[a];
      const std::int64_t len = hi[a] - lo[a] + 1;
      const std::int64_t a0 = lo[a] + p * len / parts[a];
      const std::int64_t a1 = lo[a] + (p + 1) * len / parts[a] - 1;
      centre[a] = 0.5 * static_cast<double>(a0 + a1);
      cells *= static_cast<double>(a1 - a0 + 1);
    }
    double theta = 0.0;
    for (const auto& blk : blocks) {
      IVec k{};
      for (int a = 0; a < d; ++a) k[a] = std::llround(blk.centroid[a] - centre[a]);
      theta += blk.count * model.alpha(k);
    }
    total += cells * theta * theta;
  }
  return total;
}

}  // namespace

double theta_tail_estimate(const CoefficientModel& model, const SiteSet& sites, const IntBox& window) {
  const int d = window.dim;
  const int per_axis = d == 3 ? 8 : 16;
  const std::int64_t tiles_half = d == 3 ? 8 : 24;
  const auto blocks = site_blocks(sites, per_axis);
  std::int64_t half = 1;
  for (int a = 0; a < d; ++a) half = std::max(half, (window.extent(a) + 1) / 2);
  constexpr int kShells = 10;
  std::vector<double> shell_sums;
  std::int64_t e_in = 0;
  for (int k = 0; k < kShells; ++k) {
    const std::int64_t e_out = half * ((std::int64_t{2} << k) - 1);
    const std::int64_t stride = std::max<std::int64_t>(1, (half + e_out) / tiles_half);
    double shell = 0.0;
    // Slab decomposition of outer box minus inner box.
    for (int a = 0; a < d; ++a) {
      for (int side = 0; side < 2; ++side) {
        std::array<std::int64_t, kMaxDim> lo{}, hi{};
        for (int b = 0; b < d; ++b) {
          if (b < a) {
            lo[b] = window.lo[b] - e_in;
            hi[b] = window.hi[b] + e_in;
          } else if (b > a) {
            lo[b] = window.lo[b] - e_out;
            hi[b] = window.hi[b] + e_out;
          } else if (side == 0) {
            lo[b] = window.lo[b] - e_out;
            hi[b] = window.lo[b] - e_in - 1;
          } else {
            lo[b] = window.hi[b] + e_in + 1;
            hi[b] = window.hi[b] + e_out;
          }
        }
        shell += box_far_sum(model, blocks, d, lo, hi, stride);
      }
    }
    shell_sums.push_back(shell);
    e_in = e_out;
  }
  double total = 0.0;
  for (double s : shell_sums) total += s;
  const double last = shell_sums[kShells - 1], prev = shell_sums[kShells - 2];
  if (last == 0.0) return total;
  const double q = last / prev;
  if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
  return total + last * q / (1.0 - q);
}

SigmaSq sigma_sq(const ThetaField& theta) {
  CompensatedSum s;
  for (double v : theta.values) s.add(v * v);
  return {s.value(), theta.tail_bound, theta.tail_estimate};
}

double lindeberg_ratio(const ThetaField& theta) {
  const double sigma2 = sigma_sq(theta).value;
  if (!(sigma2 > 0)) fail(ErrorKind::numerical, "sigma_n = 0: Lindeberg ratio undefined");
  double peak = 0.0;
  for (double v : theta.values) peak = std::max(peak, std::abs(v));
  return peak / std::sqrt(sigma2);
}

VarianceDecomposition variance_decompose(const ThetaField& theta, const BoundaryClassification& classification) {
  if (!theta.window.contains(classification.window))
    fail(ErrorKind::validation, "classification window is not inside the theta window");
  CompensatedSum in, out, bd, rest, all;
  const IntBox& cw = classification.window;
  const std::size_t n = theta.window.cell_count();
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double v = theta.values[idx] * theta.values[idx];
    all.add(v);
    const IVec p = theta.window.point(idx);
    if (!cw.contains(p)) {
      rest.add(v);
      continue;
    }
    switch (classification.labels[cw.index(p)]) {
      case SiteLabel::interior: in.add(v); break;
      case SiteLabel::exterior: out.add(v); break;
      case SiteLabel::boundary: bd.add(v); break;
    }
  }
  VarianceDecomposition r;
  r.sigma_sq_total = all.value();
  r.interior_sum = in.value();
  r.exterior_sum = out.value();
  r.boundary_sum = bd.value();
  r.unclassified_sum = rest.value();
  r.boundary_sum_scaled = r.boundary_sum / std::pow(theta.lambda, theta.window.dim - 1);
  r.t_n = classification.t_n;
  r.tail_bound = theta.tail_bound;
  return r;
}

std::string theta_csv(const ThetaField& theta) {
  std::ostringstream os;
  os.precision(17);
  const int d = theta.window.dim;
  for (int a = 0; a < d; ++a) os << "i" << (a + 1) << ",";
  os << "theta\n";
  for (std::size_t idx = 0; idx < theta.values.size(); ++idx) {
    const IVec p = theta.window.point(idx);
    for (int a = 0; a < d; ++a) os << p[a] << ",";
    os << theta.values[idx] << "\n";
  }
  return os.str();
}

std::vector<char> theta_binary(const ThetaField& theta) {
  std::vector<char> out;
  auto put = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    out.insert(out.end(), c, c + n);
  };
  put("SLRDTHT1", 8);
  const std::int32_t d = theta.window.dim;
  put(&d, sizeof d);
  for (int a = 0; a < d; ++a) put(&theta.window.lo[a], sizeof(std::int64_t));
  for (int a = 0; a < d; ++a) put(&theta.window.hi[a], sizeof(std::int64_t));
  put(&theta.lambda, sizeof(double));
  put(&theta.rho, sizeof(double));
  put(theta.values.data(), theta.values.size() * sizeof(double));
  return out;
}

}  // namespace slrd
