#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slrd/common.hpp"

namespace slrd {

enum class RegionKind { cube, ball, ellipsoid, polar_star };

const char* region_kind_name(RegionKind kind);

class StarPolygon;

/// Prototype region R0 inside (-1/2, 1/2]^d containing the origin.
///
/// The cube is the half-open box (-1/2, 1/2]^d; the other kinds are open sets.
/// A polar star is the star polygon through the sampled radial vertices.
class RegionPrototype {
 public:
  static RegionPrototype cube(int dim);
  static RegionPrototype ball(int dim, double radius);
  static RegionPrototype ellipsoid(std::vector<double> semi_axes);
  /// Vertices at angles 2 pi k / n with the given radii.
  static RegionPrototype polar_star(std::vector<double> radii);
  /// r(phi) = r0 (1 + amplitude cos(lobes phi)) sampled on `directions` angles.
  static RegionPrototype polar_star_lobed(double r0, double amplitude, int lobes, int directions = 4096);

  RegionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<double>& parameters() const { return params_; }

  bool contains(std::span<const double> x) const;
  /// Membership of y / lambda evaluated in scaled coordinates.
  bool contains_scaled(std::span<const double> y, double lambda) const;
  double boundary_distance(std::span<const double> x) const;
  /// lambda * boundary_distance(y / lambda).
  double scaled_boundary_distance(std::span<const double> y, double lambda) const;

  /// Half extent of the bounding box along an axis.
  double half_extent(int axis) const;
  double max_radius() const;
  double volume() const;
  /// Distance from the origin to the boundary along the unit direction u.
  double radius_along(std::span<const double> u) const;
  /// Parameter intervals r > 0 with x + r u inside, sorted and disjoint.
  void ray_intervals(std::span<const double> x, std::span<const double> u,
                     std::vector<std::pair<double, double>>& out) const;
  /// Polar angles in d = 2, seen from x, where the ray geometry changes.
  std::vector<double> angular_breakpoints(std::span<const double> x) const;
  /// Upper bound on the error of boundary_distance.
  double distance_error_bound() const;

 private:
  RegionPrototype() = default;
  void check_dim(std::span<const double> x) const;

  RegionKind kind_ = RegionKind::cube;
  int dim_ = 0;
  std::vector<double> params_;
  std::shared_ptr<const StarPolygon> star_;
};

bool membership(const RegionPrototype& prototype, std::span<const double> x);
double boundary_distance(const RegionPrototype& prototype, std::span<const double> x);

struct InflatedRegion {
  RegionPrototype prototype;
  double lambda = 1.0;

  bool contains(const IVec& i) const;
  bool contains(std::span<const double> x) const;
};

struct SiteSet {
  int dim = 0;
  double lambda = 1.0;
  std::vector<IVec> sites;
  IntBox bounding_window;

  std::size_t count() const { return sites.size(); }
};

SiteSet enumerate_sites(const RegionPrototype& prototype, double lambda);
SiteSet translate(const SiteSet& sites, const IVec& shift);

enum class SiteLabel : std::uint8_t { interior = 0, exterior = 1, boundary = 2 };

struct BoundaryClassification {
  IntBox window;
  double t_n = 0.0;
  double lambda = 1.0;
  std::vector<SiteLabel> labels;
  std::size_t interior_count = 0;
  std::size_t exterior_count = 0;
  std::size_t boundary_count = 0;

  std::vector<IVec> sites_with(SiteLabel label) const;
};

/// Default shell half-width max(2, floor(log lambda)).
double default_t_n(double lambda);

/// Smallest symmetric-per-axis box covering the t-enlargement of lambda R0.
IntBox enlargement_window(const RegionPrototype& prototype, double lambda, double t);

BoundaryClassification classify_sites(const RegionPrototype& prototype, double lambda, double t_n,
                                      const IntBox& window);

struct MeasureEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo measure of the epsilon-neighbourhood of the boundary.
MeasureEstimate enlargement_measure(const RegionPrototype& prototype, double epsilon,
                                    std::uint64_t samples = 1u << 20, std::uint64_t seed = 1);

/// Monte Carlo integral of d(x, boundary)^(-b) over the epsilon-neighbourhood, b in [0, 1).
MeasureEstimate enlargement_weighted(const RegionPrototype& prototype, double epsilon, double b,
                                     std::uint64_t samples = 1u << 20, std::uint64_t seed = 1);

std::string sites_csv(const SiteSet& sites);

}  // namespace slrd
