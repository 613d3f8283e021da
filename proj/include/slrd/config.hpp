#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slrd/coefficients.hpp"
#include "slrd/experiment.hpp"
#include "slrd/geometry.hpp"

namespace slrd {

enum class Command { scan, decompose, limits, mc, report };

const char* command_name(Command command);
Command parse_command(const std::string& name);

struct ModelConfig {
  std::string kind = "delta";
  int dim = 2;
  double scale = 1.0;
  std::map<IVec, double> override_values;
  // isotropic
  double beta = 1.5;
  double c0 = 1.0;
  double log_power = 0.0;
  std::string amplitude = "constant";
  bool balanced = false;
  // anisotropic-orthant
  std::vector<std::vector<double>> rows;
  double delta = 0.1;
  // directional-cones
  std::vector<std::vector<double>> directions;
  std::vector<double> widths;
  // both
  std::vector<double> exponents;
  // separable-nd
  double b_scale = 1.0;
  double b_power = 3.0;
  std::vector<double> b_values;
  // table
  std::map<IVec, double> entries;

  bool operator==(const ModelConfig&) const = default;
};

struct RegionConfig {
  std::string kind = "cube";
  int dim = 2;
  double radius = 0.5;
  std::vector<double> semi_axes;
  std::vector<double> radii;
  double r0 = 0.35;
  double amplitude = 0.2;
  int lobes = 5;
  int directions = 4096;

  bool operator==(const RegionConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  RegionConfig region;
  Command command = Command::report;
  std::vector<double> lambda_grid;
  double rho = 4.0;
  TnSpec t_n;
  Innovation innovation = Innovation::gaussian;
  std::size_t replicates = 2000;
  std::uint64_t base_seed = 0;
  std::string output = "out";
  std::size_t max_exact = std::size_t{1} << 18;
  ThetaMethod theta_method = ThetaMethod::fft;
  LimitMethod limit_method = LimitMethod::quadrature;
  std::uint64_t limit_samples = 400000;
  double limit_rel_tol = 1e-6;
  std::size_t histogram_bins = 40;

  bool operator==(const RunConfig&) const = default;
};

/// Sections [model], [region], [experiment]; unknown or inapplicable keys are errors.
/// `base_dir` resolves a relative model.table_file.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");

/// Every applicable key with 17 significant digits; parse_config inverts it.
std::string serialize_config(const RunConfig& config);

CoefficientModel build_model(const ModelConfig& config);
RegionPrototype build_region(const RegionConfig& config);
ExperimentSettings build_settings(const RunConfig& config);

}  // namespace slrd
