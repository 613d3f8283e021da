#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slrd/common.hpp"

namespace slrd {

enum class ModelKind { isotropic, anisotropic_orthant, directional_cones, separable_nd, delta, table };

const char* model_kind_name(ModelKind kind);

/// alpha(k) = c0 a(|k|) (1 + |k|)^-beta (log(e + |k|))^p.
/// `constant` takes a = 1; `pure_power` takes a(t) = ((1 + t) / t)^beta, so alpha(k) = c0 |k|^-beta.
struct IsotropicParams {
  enum class Amplitude { constant, pure_power };
  double c0 = 1.0;
  double log_power = 0.0;
  Amplitude amplitude = Amplitude::constant;
};

/// alpha(k) = prod |o_i' k|^-a_i over the cone where every |o_i' k| / |k| > delta.
struct AnisotropicParams {
  std::vector<std::vector<double>> rows;
  std::vector<double> exponents;
  double delta = 0.1;
};

/// alpha(k) = sum_i 1(|o_i' k| / |k| > delta_i) / (1 + |k|^a_i).
struct ConesParams {
  std::vector<std::vector<double>> directions;
  std::vector<double> widths;
  std::vector<double> exponents;
};

/// alpha(i, j) = b(i) b(j) off the axes, 0 on the axes, -4 B^2 at the origin.
/// b(i) = scale |i|^-power unless `values` lists b(1), b(2), ... explicitly.
struct SeparableParams {
  double scale = 1.0;
  double power = 3.0;
  std::vector<double> values;
};

struct DeltaParams {};

struct TableParams {
  std::map<IVec, double> entries;
};

using ModelParams =
    std::variant<IsotropicParams, AnisotropicParams, ConesParams, SeparableParams, DeltaParams, TableParams>;

enum class RegimeLabel { PSD, SRD, ND_NEE, ND_EE, ND_critical };

const char* regime_name(RegimeLabel label);

struct DependenceClass {
  RegimeLabel label = RegimeLabel::SRD;
  double predicted_variance_exponent = 0.0;
  bool requires_A_zero = false;
};

struct SumEstimate {
  double value = 0.0;
  double tail_bound = 0.0;
  bool structural_zero = false;
};

/// Bracket for gamma(t): grid maximum and an upper bound over all directions.
struct GammaValue {
  double value = 0.0;
  double upper = 0.0;
};

class CoefficientModel {
 public:
  static CoefficientModel isotropic(int dim, double beta, IsotropicParams p = {});
  static CoefficientModel anisotropic_orthant(int dim, AnisotropicParams p);
  static CoefficientModel directional_cones(int dim, ConesParams p);
  /// beta is the exponent of b; only d = 2.
  static CoefficientModel separable_nd(SeparableParams p);
  static CoefficientModel delta(int dim);
  static CoefficientModel table(int dim, std::map<IVec, double> entries);

  /// Override values on a finite neighbourhood of the origin.
  CoefficientModel with_override(std::map<IVec, double> values) const;
  /// Sets alpha(0) so that the coefficients sum to zero (isotropic only).
  CoefficientModel balanced() const;
  CoefficientModel scaled(double c) const;

  ModelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double beta() const { return beta_; }
  const ModelParams& params() const { return params_; }
  const std::map<IVec, double>& override_values() const { return override_; }
  bool is_balanced() const { return balanced_; }
  double scale_factor() const { return scale_; }

  double alpha(const IVec& k) const;
  /// Upper bound on |alpha(k)| for every k with |k| >= r.
  double envelope(double r) const;
  /// Decay exponent of the envelope; infinity for finite support.
  double envelope_exponent() const;
  /// Largest |k| with alpha(k) != 0 for finite-support models, else infinity.
  double support_radius() const;

  /// Limit profile g_infinity(x), x != 0.
  double g_limit(std::span<const double> x) const;
  /// Angular factor a(u) with g_infinity(r u) = r^-beta a(u) for |u| = 1.
  double g_angular(std::span<const double> u) const;
  bool g_limit_vanishes() const;
  /// Polar angles in d = 2 where g_angular jumps.
  std::vector<double> g_breakpoints() const;

  /// Constant c0 in gamma(t) ~ c0 t^-beta L(t).
  double gamma_constant() const { return gamma_const_; }
  /// b(i) for i >= 1 (separable models).
  double b(std::int64_t i) const;
  /// B = sum_{i >= 1} b(i) (separable models).
  double b_total() const { return b_total_; }

 private:
  CoefficientModel() = default;
  double raw_alpha(const IVec& k) const;
  void finalize();

  ModelKind kind_ = ModelKind::delta;
  int dim_ = 0;
  double beta_ = 0.0;
  ModelParams params_;
  std::map<IVec, double> override_;
  bool balanced_ = false;
  double center_ = 0.0;
  double scale_ = 1.0;
  double gamma_const_ = 1.0;
  double b_total_ = 0.0;
};

GammaValue gamma(const CoefficientModel& model, double t);
/// alpha(floor(t x)) / gamma(t); zero where both vanish.
double g_profile(const CoefficientModel& model, double t, std::span<const double> x);
double g_limit(const CoefficientModel& model, std::span<const double> x);
SumEstimate total_sum(const CoefficientModel& model, std::int64_t radius);
DependenceClass classify(const CoefficientModel& model);
/// L^b distance between g_t and g_infinity over delta <= |x| <= R.
double regular_variation_diagnostic(const CoefficientModel& model, double t, double delta, double R);

/// Sum of alpha(k)^2 over |k|_inf > R bounded through the envelope.
double square_tail_bound(const CoefficientModel& model, double R);

/// Upper bound on sum_{m > m0} shell(m) h(m) over Chebyshev shells, h non-increasing.
double lattice_shell_tail(int dim, double m0, const std::function<double(double)>& h);

/// Unit direction grid: 8192 points on the circle in d = 2, Fibonacci sphere in d = 3, +-1 in d = 1.
const std::vector<std::vector<double>>& direction_grid(int dim);

std::map<IVec, double> read_table_csv(const std::string& text, int dim);
std::string table_csv(const std::map<IVec, double>& entries, int dim);

}  // namespace slrd
