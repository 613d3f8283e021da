#include "slrd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "slrd/random.hpp"

namespace slrd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  return phi < 0 ? phi + kTwoPi : phi;
}

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double ex = bx - ax, ey = by - ay;
  const double len2 = ex * ex + ey * ey;
  double s = len2 > 0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(px - (ax + s * ex), py - (ay + s * ey));
}

// Closest-point distance to an axis-aligned ellipsoid, axes sorted descending, y >= 0.
double ellipsoid_root_distance(const double* e, const double* y, int n) {
  double z[kMaxDim], r[kMaxDim];
  double g = -1.0;
  for (int i = 0; i < n; ++i) {
    z[i] = y[i] / e[i];
    g += z[i] * z[i];
  }
  if (g == 0.0) return 0.0;
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = (e[i] / e[n - 1]) * (e[i] / e[n - 1]);
    norm += (r[i] * z[i]) * (r[i] * z[i]);
  }
  double s0 = z[n - 1] - 1.0;
  double s1 = g < 0 ? 0.0 : std::sqrt(norm) - 1.0;
  double s = 0.0;
  for (int it = 0; it < 2000; ++it) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    double f = -1.0;
    for (int i = 0; i < n; ++i) {
      const double q = r[i] * z[i] / (s + r[i]);
      f += q * q;
    }
    if (f > 0)
      s0 = s;
    else if (f < 0)
      s1 = s;
    else
      break;
  }
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = r[i] * y[i] / (s + r[i]);
    d2 += (xi - y[i]) * (xi - y[i]);
  }
  return std::sqrt(d2);
}

double ellipsoid_sorted_distance(const double* e, const double* y, int n) {
  if (n == 1) return std::abs(y[0] - e[0]);
  double ep[kMaxDim], yp[kMaxDim];
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (y[i] > 0) {
      ep[m] = e[i];
      yp[m] = y[i];
      ++m;
    }
  if (y[n - 1] > 0) {
    if (m == n) return ellipsoid_root_distance(e, y, n);
    return ellipsoid_sorted_distance(ep, yp, m);
  }
  if (m == 0) return e[n - 1];
  const double en2 = e[n - 1] * e[n - 1];
  bool pole = true;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double denom = ep[k] * ep[k] - en2;
    if (denom <= 0) {
      pole = false;
      break;
    }
    const double q = ep[k] * yp[k] / denom;
    sum += q * q;
  }
  if (pole && sum < 1.0) {
    double d2 = 0.0;
    for (int k = 0; k < m; ++k) {
      const double xk = ep[k] * ep[k] * yp[k] / (ep[k] * ep[k] - en2);
      d2 += (xk - yp[k]) * (xk - yp[k]);
    }
    const double xn = e[n - 1] * std::sqrt(1.0 - sum);
    return std::sqrt(d2 + xn * xn);
  }
  return ellipsoid_sorted_distance(ep, yp, m);
}

double ellipsoid_distance(const std::vector<double>& axes, std::span<const double> x) {
  const int n = static_cast<int>(axes.size());
  int order[kMaxDim];
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order, order + n, [&](int a, int b) { return axes[a] > axes[b]; });
  double e[kMaxDim], y[kMaxDim];
  for (int i = 0; i < n; ++i) {
    e[i] = axes[order[i]];
    y[i] = std::abs(x[order[i]]);
  }
  return ellipsoid_sorted_distance(e, y, n);
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

}  // namespace

// Star polygon with a bucket grid over its edges for distance queries.
class StarPolygon {
 public:
  explicit StarPolygon(std::vector<double> radii) : radii_(std::move(radii)) {
    n_ = static_cast<int>(radii_.size());
    step_ = kTwoPi / n_;
    vx_.resize(n_ + 1);
    vy_.resize(n_ + 1);
    for (int k = 0; k < n_; ++k) {
      vx_[k] = radii_[k] * std::cos(k * step_);
      vy_[k] = radii_[k] * std::sin(k * step_);
    }
    vx_[n_] = vx_[0];
    vy_[n_] = vy_[0];
    for (int k = 0; k < n_; ++k) {
      hx_ = std::max(hx_, std::abs(vx_[k]));
      hy_ = std::max(hy_, std::abs(vy_[k]));
      rmax_ = std::max(rmax_, radii_[k]);
    }
    cell_ = 1.0 / kGrid;
    buckets_.assign(kGrid * kGrid, {});
    for (int k = 0; k < n_; ++k) {
      const int cx0 = cell_of(std::min(vx_[k], vx_[k + 1]));
      const int cx1 = cell_of(std::max(vx_[k], vx_[k + 1]));
      const int cy0 = cell_of(std::min(vy_[k], vy_[k + 1]));
      const int cy1 = cell_of(std::max(vy_[k], vy_[k + 1]));
      for (int cx = cx0; cx <= cx1; ++cx)
        for (int cy = cy0; cy <= cy1; ++cy) buckets_[cx * kGrid + cy].push_back(k);
    }
  }

  bool contains(double x, double y) const {
    if (x == 0.0 && y == 0.0) return true;
    const int k = sector(x, y);
    return cross2(vx_[k + 1] - vx_[k], vy_[k + 1] - vy_[k], x - vx_[k], y - vy_[k]) > 0;
  }

  double distance(double x, double y) const {
    const double px = std::clamp(x, -0.5, 0.5), py = std::clamp(y, -0.5, 0.5);
    const double out2 = (x - px) * (x - px) + (y - py) * (y - py);
    const int cx = cell_of(px), cy = cell_of(py);
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= kGrid; ++ring) {
      const double reach = std::max(0, ring - 1) * cell_;
      if (best <= std::sqrt(reach * reach + out2)) break;
      for (int ix = cx - ring; ix <= cx + ring; ++ix) {
        if (ix < 0 || ix >= kGrid) continue;
        const bool edge_x = (ix == cx - ring || ix == cx + ring);
        for (int iy = cy - ring; iy <= cy + ring; ++iy) {
          if (iy < 0 || iy >= kGrid) continue;
          if (!edge_x && iy != cy - ring && iy != cy + ring) continue;
          for (int k : buckets_[ix * kGrid + iy])
            best = std::min(best, segment_distance(x, y, vx_[k], vy_[k], vx_[k + 1], vy_[k + 1]));
        }
      }
    }
    return best;
  }

  double radius_along(double ux, double uy) const {
    const int k = sector(ux, uy);
    const double ex = vx_[k + 1] - vx_[k], ey = vy_[k + 1] - vy_[k];
    return cross2(vx_[k], vy_[k], ex, ey) / cross2(ux, uy, ex, ey);
  }

  void ray_intervals(double x, double y, double ux, double uy,
                     std::vector<std::pair<double, double>>& out) const {
    std::vector<double> hits;
    for (int k = 0; k < n_; ++k) {
      const double ex = vx_[k + 1] - vx_[k], ey = vy_[k + 1] - vy_[k];
      const double den = cross2(ux, uy, ex, ey);
      if (den == 0.0) continue;
      const double wx = vx_[k] - x, wy = vy_[k] - y;
      const double r = cross2(wx, wy, ex, ey) / den;
      const double s = cross2(wx, wy, ux, uy) / den;
      if (r > 0 && s >= 0 && s < 1) hits.push_back(r);
    }
    std::sort(hits.begin(), hits.end());
    std::size_t k = 0;
    if (contains(x, y)) {
      if (hits.empty()) return;
      out.emplace_back(0.0, hits[0]);
      k = 1;
    }
    for (; k + 1 < hits.size(); k += 2) out.emplace_back(hits[k], hits[k + 1]);
  }

  double area() const {
    double a = 0.0;
    for (int k = 0; k < n_; ++k) a += cross2(vx_[k], vy_[k], vx_[k + 1], vy_[k + 1]);
    return 0.5 * a;
  }

  double half_extent(int axis) const { return axis == 0 ? hx_ : hy_; }
  double max_radius() const { return rmax_; }

 private:
  static constexpr int kGrid = 64;

  int cell_of(double c) const {
    return std::clamp(static_cast<int>(std::floor((c + 0.5) / cell_)), 0, kGrid - 1);
  }

  int sector(double x, double y) const {
    const double phi = wrap_angle(std::atan2(y, x));
    int k = static_cast<int>(phi / step_);
    return std::clamp(k, 0, n_ - 1);
  }

  std::vector<double> radii_;
  int n_ = 0;
  double step_ = 0.0;
  std::vector<double> vx_, vy_;
  double hx_ = 0.0, hy_ = 0.0, rmax_ = 0.0;
  double cell_ = 0.0;
  std::vector<std::vector<int>> buckets_;
};

const char* region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::cube: return "cube";
    case RegionKind::ball: return "ball";
    case RegionKind::ellipsoid: return "ellipsoid";
    case RegionKind::polar_star: return "polar-star";
  }
  return "unknown";
}

RegionPrototype RegionPrototype::cube(int dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "region dimension must be in 1..3");
  RegionPrototype p;
  p.kind_ = RegionKind::cube;
  p.dim_ = dim;
  return p;
}

RegionPrototype RegionPrototype::ball(int dim, double radius) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "region dimension must be in 1..3");
  if (!(radius > 0 && radius <= 0.5)) fail(ErrorKind::validation, "ball radius must be in (0, 0.5]");
  RegionPrototype p;
  p.kind_ = RegionKind::ball;
  p.dim_ = dim;
  p.params_ = {radius};
  return p;
}

RegionPrototype RegionPrototype::ellipsoid(std::vector<double> semi_axes) {
  const int dim = static_cast<int>(semi_axes.size());
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "ellipsoid needs 1..3 semi-axes");
  for (double a : semi_axes)
    if (!(a > 0 && a <= 0.5)) fail(ErrorKind::validation, "ellipsoid semi-axes must be in (0, 0.5]");
  RegionPrototype p;
  p.kind_ = RegionKind::ellipsoid;
  p.dim_ = dim;
  p.params_ = std::move(semi_axes);
  return p;
}

RegionPrototype RegionPrototype::polar_star(std::vector<double> radii) {
  if (radii.size() < 3) fail(ErrorKind::validation, "polar-star needs at least 3 radii");
  const double step = kTwoPi / static_cast<double>(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0)) fail(ErrorKind::validation, "polar-star radii must be positive");
    const double c = radii[k] * std::cos(k * step), s = radii[k] * std::sin(k * step);
    if (std::abs(c) > 0.5 || std::abs(s) > 0.5)
      fail(ErrorKind::validation, "polar-star vertex leaves (-1/2, 1/2]^2");
  }
  RegionPrototype p;
  p.kind_ = RegionKind::polar_star;
  p.dim_ = 2;
  p.params_ = radii;
  p.star_ = std::make_shared<const StarPolygon>(std::move(radii));
  return p;
}

RegionPrototype RegionPrototype::polar_star_lobed(double r0, double amplitude, int lobes,
                                                  int directions) {
  if (directions < 3) fail(ErrorKind::validation, "polar-star needs at least 3 directions");
  if (!(amplitude >= 0 && amplitude < 1)) fail(ErrorKind::validation, "polar-star amplitude must be in [0, 1)");
  std::vector<double> radii(static_cast<std::size_t>(directions));
  for (int k = 0; k < directions; ++k)
    radii[k] = r0 * (1.0 + amplitude * std::cos(lobes * kTwoPi * k / directions));
  return polar_star(std::move(radii));
}

void RegionPrototype::check_dim(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    fail(ErrorKind::validation, "point dimension does not match region dimension");
}

bool RegionPrototype::contains(std::span<const double> x) const {
  check_dim(x);
  switch (kind_) {
    case RegionKind::cube:
      for (double c : x)
        if (!(c > -0.5 && c <= 0.5)) return false;
      return true;
    case RegionKind::ball: {
      double s = 0.0;
      for (double c : x) s += c * c;
      return s < params_[0] * params_[0];
    }
    case RegionKind::ellipsoid: {
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) s += (x[a] / params_[a]) * (x[a] / params_[a]);
      return s < 1.0;
    }
    case RegionKind::polar_star:
      return star_->contains(x[0], x[1]);
  }
  return false;
}

bool RegionPrototype::contains_scaled(std::span<const double> y, double lambda) const {
  check_dim(y);
  switch (kind_) {
    case RegionKind::cube: {
      const double h = 0.5 * lambda;
      for (double c : y)
        if (!(c > -h && c <= h)) return false;
      return true;
    }
    case RegionKind::ball: {
      double s = 0.0;
      for (double c : y) s += c * c;
      const double r = params_[0] * lambda;
      return s < r * r;
    }
    case RegionKind::ellipsoid: {
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) {
        const double q = y[a] / (params_[a] * lambda);
        s += q * q;
      }
      return s < 1.0;
    }
    case RegionKind::polar_star:
      return star_->contains(y[0] / lambda, y[1] / lambda);
  }
  return false;
}

double RegionPrototype::boundary_distance(std::span<const double> x) const {
  check_dim(x);
  switch (kind_) {
    case RegionKind::cube: {
      bool inside = true;
      double in = 0.5, out2 = 0.0;
      for (double c : x) {
        const double e = std::abs(c) - 0.5;
        if (e > 0) {
          inside = false;
          out2 += e * e;
        }
        in = std::min(in, -e);
      }
      return inside ? in : std::sqrt(out2);
    }
    case RegionKind::ball: {
      double s = 0.0;
      for (double c : x) s += c * c;
      return std::abs(params_[0] - std::sqrt(s));
    }
    case RegionKind::ellipsoid:
      return ellipsoid_distance(params_, x);
    case RegionKind::polar_star:
      return star_->distance(x[0], x[1]);
  }
  return 0.0;
}

double RegionPrototype::scaled_boundary_distance(std::span<const double> y, double lambda) const {
  check_dim(y);
  switch (kind_) {
    case RegionKind::cube: {
      const double h = 0.5 * lambda;
      bool inside = true;
      double in = h, out2 = 0.0;
      for (double c : y) {
        const double e = std::abs(c) - h;
        if (e > 0) {
          inside = false;
          out2 += e * e;
        }
        in = std::min(in, -e);
      }
      return inside ? in : std::sqrt(out2);
    }
    case RegionKind::ball: {
      double s = 0.0;
      for (double c : y) s += c * c;
      return std::abs(params_[0] * lambda - std::sqrt(s));
    }
    default: {
      double x[kMaxDim];
      for (int a = 0; a < dim_; ++a) x[a] = y[a] / lambda;
      return lambda * boundary_distance(std::span<const double>(x, static_cast<std::size_t>(dim_)));
    }
  }
}

double RegionPrototype::half_extent(int axis) const {
  switch (kind_) {
    case RegionKind::cube: return 0.5;
    case RegionKind::ball: return params_[0];
    case RegionKind::ellipsoid: return params_[axis];
    case RegionKind::polar_star: return star_->half_extent(axis);
  }
  return 0.5;
}

double RegionPrototype::max_radius() const {
  switch (kind_) {
    case RegionKind::cube: return 0.5 * std::sqrt(static_cast<double>(dim_));
    case RegionKind::ball: return params_[0];
    case RegionKind::ellipsoid: return *std::max_element(params_.begin(), params_.end());
    case RegionKind::polar_star: return star_->max_radius();
  }
  return 0.0;
}

double RegionPrototype::volume() const {
  switch (kind_) {
    case RegionKind::cube: return 1.0;
    case RegionKind::ball: return unit_ball_volume(dim_) * std::pow(params_[0], dim_);
    case RegionKind::ellipsoid: {
      double v = unit_ball_volume(dim_);
      for (double a : params_) v *= a;
      return v;
    }
    case RegionKind::polar_star: return star_->area();
  }
  return 0.0;
}

double RegionPrototype::radius_along(std::span<const double> u) const {
  check_dim(u);
  switch (kind_) {
    case RegionKind::cube: {
      double m = 0.0;
      for (double c : u) m = std::max(m, std::abs(c));
      return 0.5 / m;
    }
    case RegionKind::ball: return params_[0];
    case RegionKind::ellipsoid: {
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) s += (u[a] / params_[a]) * (u[a] / params_[a]);
      return 1.0 / std::sqrt(s);
    }
    case RegionKind::polar_star: return star_->radius_along(u[0], u[1]);
  }
  return 0.0;
}

void RegionPrototype::ray_intervals(std::span<const double> x, std::span<const double> u,
                                    std::vector<std::pair<double, double>>& out) const {
  out.clear();
  switch (kind_) {
    case RegionKind::cube: {
      double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
      for (int a = 0; a < dim_; ++a) {
        if (u[a] == 0.0) {
          if (!(x[a] > -0.5 && x[a] < 0.5)) return;
          continue;
        }
        double ta = (-0.5 - x[a]) / u[a], tb = (0.5 - x[a]) / u[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      }
      if (t1 > t0) out.emplace_back(t0, t1);
      return;
    }
    case RegionKind::ball:
    case RegionKind::ellipsoid: {
      double qa = 0.0, qb = 0.0, qc = -1.0;
      for (int a = 0; a < dim_; ++a) {
        const double s = kind_ == RegionKind::ball ? params_[0] : params_[a];
        const double ua = u[a] / s, xa = x[a] / s;
        qa += ua * ua;
        qb += 2.0 * ua * xa;
        qc += xa * xa;
      }
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc <= 0) return;
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
      double r0 = q / qa, r1 = qc / q;
      if (r0 > r1) std::swap(r0, r1);
      r0 = std::max(r0, 0.0);
      if (r1 > r0) out.emplace_back(r0, r1);
      return;
    }
    case RegionKind::polar_star:
      star_->ray_intervals(x[0], x[1], u[0], u[1], out);
      return;
  }
}

std::vector<double> RegionPrototype::angular_breakpoints(std::span<const double> x) const {
  std::vector<double> out;
  if (dim_ != 2) return out;
  if (kind_ == RegionKind::cube) {
    for (double cx : {-0.5, 0.5})
      for (double cy : {-0.5, 0.5})
        if (cx != x[0] || cy != x[1]) out.push_back(wrap_angle(std::atan2(cy - x[1], cx - x[0])));
  } else if (kind_ == RegionKind::ball) {
    const double r = std::hypot(x[0], x[1]);
    if (r > params_[0]) {
      const double c = std::atan2(x[1], x[0]) + std::numbers::pi;
      const double w = std::asin(params_[0] / r);
      out.push_back(wrap_angle(c - w));
      out.push_back(wrap_angle(c + w));
    }
  }
  return out;
}

double RegionPrototype::distance_error_bound() const {
  if (kind_ == RegionKind::ellipsoid) return 1e-12;
  return 0.0;
}

bool membership(const RegionPrototype& prototype, std::span<const double> x) {
  return prototype.contains(x);
}

double boundary_distance(const RegionPrototype& prototype, std::span<const double> x) {
  return prototype.boundary_distance(x);
}

bool InflatedRegion::contains(const IVec& i) const {
  double y[kMaxDim];
  for (int a = 0; a < prototype.dim(); ++a) y[a] = static_cast<double>(i[a]);
  return prototype.contains_scaled(std::span<const double>(y, static_cast<std::size_t>(prototype.dim())),
                                   lambda);
}

bool InflatedRegion::contains(std::span<const double> x) const {
  return prototype.contains_scaled(x, lambda);
}

SiteSet enumerate_sites(const RegionPrototype& prototype, double lambda) {
  if (!(lambda >= 1.0)) fail(ErrorKind::validation, "lambda must be at least 1");
  const int d = prototype.dim();
  IntBox scan;
  scan.dim = d;
  for (int a = 0; a < d; ++a) {
    const auto h = static_cast<std::int64_t>(std::ceil(lambda * prototype.half_extent(a)));
    scan.lo[a] = -h;
    scan.hi[a] = h;
  }
  const InflatedRegion region{prototype, lambda};
  const std::int64_t rows = scan.extent(0);
  const std::size_t per_row = scan.cell_count() / static_cast<std::size_t>(rows);
  std::vector<std::vector<IVec>> found(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < rows; ++r) {
    auto& out = found[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < per_row; ++c) {
      const IVec p = scan.point(static_cast<std::size_t>(r) * per_row + c);
      if (region.contains(p)) out.push_back(p);
    }
  }
  SiteSet s;
  s.dim = d;
  s.lambda = lambda;
  for (auto& row : found) s.sites.insert(s.sites.end(), row.begin(), row.end());
  s.bounding_window.dim = d;
  for (int a = 0; a < d; ++a) {
    s.bounding_window.lo[a] = std::numeric_limits<std::int64_t>::max();
    s.bounding_window.hi[a] = std::numeric_limits<std::int64_t>::min();
  }
  for (const auto& p : s.sites)
    for (int a = 0; a < d; ++a) {
      s.bounding_window.lo[a] = std::min(s.bounding_window.lo[a], p[a]);
      s.bounding_window.hi[a] = std::max(s.bounding_window.hi[a], p[a]);
    }
  if (s.sites.empty()) fail(ErrorKind::domain, "no lattice sites inside the inflated region");
  return s;
}

SiteSet translate(const SiteSet& sites, const IVec& shift) {
  SiteSet out = sites;
  for (auto& p : out.sites)
    for (int a = 0; a < sites.dim; ++a) p[a] += shift[a];
  for (int a = 0; a < sites.dim; ++a) {
    out.bounding_window.lo[a] += shift[a];
    out.bounding_window.hi[a] += shift[a];
  }
  return out;
}

std::vector<IVec> BoundaryClassification::sites_with(SiteLabel label) const {
  std::vector<IVec> out;
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == label) out.push_back(window.point(k));
  return out;
}

double default_t_n(double lambda) { return std::max(2.0, std::floor(std::log(lambda))); }

IntBox enlargement_window(const RegionPrototype& prototype, double lambda, double t) {
  IntBox b;
  b.dim = prototype.dim();
  for (int a = 0; a < b.dim; ++a) {
    const double h = lambda * prototype.half_extent(a) + t;
    b.lo[a] = static_cast<std::int64_t>(std::ceil(-h));
    b.hi[a] = static_cast<std::int64_t>(std::floor(h));
  }
  return b;
}

BoundaryClassification classify_sites(const RegionPrototype& prototype, double lambda, double t_n,
                                      const IntBox& window) {
  if (!(t_n > 0 && t_n < lambda)) fail(ErrorKind::validation, "t_n must satisfy 0 < t_n < lambda");
  if (window.dim != prototype.dim()) fail(ErrorKind::validation, "window dimension mismatch");
  const IntBox need = enlargement_window(prototype, lambda, t_n);
  if (!window.contains(need))
    fail(ErrorKind::validation, "classification window does not cover the t_n-enlargement of the region");
  BoundaryClassification c;
  c.window = window;
  c.t_n = t_n;
  c.lambda = lambda;
  const std::size_t n = window.cell_count();
  c.labels.assign(n, SiteLabel::exterior);
  const int d = window.dim;
  std::size_t n_in = 0, n_out = 0, n_bd = 0;
#pragma omp parallel for schedule(static) reduction(+ : n_in, n_out, n_bd)
  for (std::size_t k = 0; k < n; ++k) {
    const IVec p = window.point(k);
    if (!need.contains(p)) {
      ++n_out;
      continue;
    }
    double y[kMaxDim];
    for (int a = 0; a < d; ++a) y[a] = static_cast<double>(p[a]);
    const std::span<const double> ys(y, static_cast<std::size_t>(d));
    const bool inside = prototype.contains_scaled(ys, lambda);
    const double dist = prototype.scaled_boundary_distance(ys, lambda);
    SiteLabel label = SiteLabel::boundary;
    if (dist > t_n) label = inside ? SiteLabel::interior : SiteLabel::exterior;
    c.labels[k] = label;
    if (label == SiteLabel::interior)
      ++n_in;
    else if (label == SiteLabel::exterior)
      ++n_out;
    else
      ++n_bd;
  }
  c.interior_count = n_in;
  c.exterior_count = n_out;
  c.boundary_count = n_bd;
  return c;
}

namespace {

template <class F>
MeasureEstimate enlargement_mc(const RegionPrototype& prototype, double epsilon, std::uint64_t samples,
                               std::uint64_t seed, F weight) {
  if (!(epsilon > 0 && epsilon < 0.25)) fail(ErrorKind::validation, "epsilon must be in (0, 1/4)");
  if (samples == 0) fail(ErrorKind::validation, "samples must be positive");
  const int d = prototype.dim();
  double half[kMaxDim];
  double vol = 1.0;
  for (int a = 0; a < d; ++a) {
    half[a] = prototype.half_extent(a) + epsilon;
    vol *= 2.0 * half[a];
  }
  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> s1(chunks), s2(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::uint64_t c = 0; c < chunks; ++c) {
    Xoshiro256 rng(stream_seed(seed, c));
    const std::uint64_t m = std::min(kChunk, samples - c * kChunk);
    double a1 = 0.0, a2 = 0.0;
    double x[kMaxDim];
    for (std::uint64_t k = 0; k < m; ++k) {
      for (int a = 0; a < d; ++a) x[a] = (2.0 * rng.uniform() - 1.0) * half[a];
      const double dist = prototype.boundary_distance(std::span<const double>(x, static_cast<std::size_t>(d)));
      if (dist < epsilon) {
        const double w = weight(dist);
        a1 += w;
        a2 += w * w;
      }
    }
    s1[c] = a1;
    s2[c] = a2;
  }
  double t1 = 0.0, t2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    t1 += s1[c];
    t2 += s2[c];
  }
  const double n = static_cast<double>(samples);
  const double mean = t1 / n;
  const double var = std::max(0.0, t2 / n - mean * mean);
  return {vol * mean, vol * std::sqrt(var / n)};
}

}  // namespace

MeasureEstimate enlargement_measure(const RegionPrototype& prototype, double epsilon, std::uint64_t samples,
                                    std::uint64_t seed) {
  return enlargement_mc(prototype, epsilon, samples, seed, [](double) { return 1.0; });
}

MeasureEstimate enlargement_weighted(const RegionPrototype& prototype, double epsilon, double b,
                                     std::uint64_t samples, std::uint64_t seed) {
  if (!(b >= 0 && b < 1)) fail(ErrorKind::validation, "weight exponent must be in [0, 1)");
  return enlargement_mc(prototype, epsilon, samples, seed,
                        [b](double dist) { return dist > 0 ? std::pow(dist, -b) : 0.0; });
}

std::string sites_csv(const SiteSet& sites) {
  std::ostringstream os;
  for (int a = 0; a < sites.dim; ++a) os << (a ? ",i" : "i") << (a + 1);
  os << '\n';
  for (const auto& p : sites.sites) {
    for (int a = 0; a < sites.dim; ++a) os << (a ? "," : "") << p[a];
    os << '\n';
  }
  return os.str();
}

}  // namespace slrd
