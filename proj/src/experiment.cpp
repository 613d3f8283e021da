#include <cmath>
#include <sstream>

#include "slrd/experiment.hpp"

namespace slrd {

double TnSpec::at(double lambda) const {
  switch (rule) {
    case TnRule::log: return default_t_n(lambda);
    case TnRule::sqrt: return std::max(2.0, std::floor(std::sqrt(lambda)));
    case TnRule::fixed: return value;
  }
  return value;
}

std::string tn_spec_string(const TnSpec& spec) {
  switch (spec.rule) {
    case TnRule::log: return "log";
    case TnRule::sqrt: return "sqrt";
    case TnRule::fixed: {
      std::ostringstream os;
      os.precision(17);
      os << "fixed(" << spec.value << ")";
      return os.str();
    }
  }
  return "log";
}

TnSpec parse_tn_spec(const std::string& text) {
  if (text == "log") return {TnRule::log, 0.0};
  if (text == "sqrt") return {TnRule::sqrt, 0.0};
  if (text.rfind("fixed(", 0) == 0 && text.size() > 7 && text.back() == ')') {
    const std::string inner = text.substr(6, text.size() - 7);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != inner.size() || !(v > 0) || !std::isfinite(v))
      fail(ErrorKind::validation, "t_n: fixed(v) needs a positive number, got '" + text + "'");
    return {TnRule::fixed, v};
  }
  fail(ErrorKind::validation, "t_n: expected log, sqrt or fixed(v), got '" + text + "'");
}

ThetaField compute_theta(const CoefficientModel& model, const SiteSet& sites, double rho, ThetaMethod method) {
  const IntBox window = default_window(model.dim(), sites.lambda, rho);
  return method == ThetaMethod::fft ? theta_fft(model, sites, window) : theta_direct_parallel(model, sites, window);
}

namespace {

bool example_separable(const CoefficientModel& model, const RegionPrototype& prototype) {
  return model.kind() == ModelKind::separable_nd && prototype.kind() == RegionKind::cube &&
         model.override_values().empty();
}

}  // namespace

ExperimentReport regime_experiment(const CoefficientModel& model, const RegionPrototype& prototype,
                                   const ExperimentSettings& s) {
  const int d = model.dim();
  if (prototype.dim() != d) fail(ErrorKind::validation, "model and region dimensions differ");
  if (s.lambda_grid.empty()) fail(ErrorKind::validation, "lambda_grid must not be empty");
  for (std::size_t k = 0; k < s.lambda_grid.size(); ++k) {
    if (!(s.lambda_grid[k] >= 1.0)) fail(ErrorKind::validation, "lambda_grid values must be at least 1");
    if (k > 0 && !(s.lambda_grid[k] > s.lambda_grid[k - 1]))
      fail(ErrorKind::validation, "lambda_grid must be strictly increasing");
  }
  if (!(s.rho >= 2.0)) fail(ErrorKind::validation, "rho must be at least 2");
  if (s.replicates != 0 && s.replicates < 100) fail(ErrorKind::validation, "replicates must be 0 or at least 100");

  ExperimentReport rep;
  rep.dependence = classify(model);
  const RegimeLabel label = rep.dependence.label;

  try {
    switch (label) {
      case RegimeLabel::PSD: rep.limit = limit_variance_psd(model, prototype, s.limit_options); break;
      case RegimeLabel::ND_NEE: rep.limit = limit_variance_nd(model, prototype, s.limit_options); break;
      case RegimeLabel::SRD: rep.limit = limit_variance_srd(model); break;
      case RegimeLabel::ND_EE:
        if (example_separable(model, prototype) && d == 2) {
          const Sigma0 s0 = example42_sigma0(std::get<SeparableParams>(model.params()));
          const double c2 = model.scale_factor() * model.scale_factor();
          LimitVariance lv;
          lv.regime = label;
          lv.value = c2 * s0.value;
          lv.method = LimitMethod::truncated_series;
          lv.error_estimate = c2 * s0.error;
          lv.provenance = "edge-effect constant of the separable model on the cube (closed series)";
          rep.limit = lv;
        }
        break;
      case RegimeLabel::ND_critical: break;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::domain) throw;
    rep.scale_description = std::string("limit unavailable: ") + e.what();
  }

  ThetaField last;
  for (double lambda : s.lambda_grid) {
    const SiteSet sites = enumerate_sites(prototype, lambda);
    ThetaField theta = compute_theta(model, sites, s.rho, s.theta_method);
    const SigmaSq sg = sigma_sq(theta);
    LambdaRow row;
    row.lambda = lambda;
    row.site_count = sites.count();
    row.sigma_sq = sg.value;
    row.tail_bound = sg.tail_bound;
    row.tail_estimate = sg.tail_estimate;
    row.lindeberg_ratio = lindeberg_ratio(theta);
    const double t = s.t_n.at(lambda);
    if (!(t < lambda)) fail(ErrorKind::validation, "t_n must be smaller than lambda");
    row.decomposition = variance_decompose(theta, classify_sites(prototype, lambda, t, theta.window));
    row.valid = sg.tail_bound < 0.01 * sg.value;
    rep.rows.push_back(row);
    last = std::move(theta);
  }

  if (rep.rows.size() >= 4 && s.lambda_grid.back() >= 8.0 * s.lambda_grid.front()) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : rep.rows) pairs.emplace_back(r.lambda, r.sigma_sq + r.tail_estimate);
    rep.growth = growth_regression(pairs);
  }

  if ((label == RegimeLabel::ND_EE || label == RegimeLabel::ND_critical) && !rep.limit && rep.rows.size() >= 3) {
    std::vector<EdgePoint> pts;
    for (const auto& r : rep.rows) pts.push_back({r.lambda, r.decomposition.boundary_sum_scaled, r.decomposition.t_n});
    LimitVariance ee = sigma_EE_extrapolate(pts);
    if (label == RegimeLabel::ND_critical) {
      if (model.g_limit_vanishes()) rep.limit = combine_critical(ee, LimitVariance{}, 0.0);
      else rep.scale_description = "critical exponent with a nonzero limit profile: no closed-form scale";
    } else {
      rep.limit = ee;
    }
  }

  auto predicted = [&](const LambdaRow& r) -> double {
    if (!rep.limit) return 0.0;
    const double v = rep.limit->value;
    switch (label) {
      case RegimeLabel::PSD:
      case RegimeLabel::ND_NEE: {
        const double g = gamma(model, r.lambda).value;
        return std::pow(r.lambda, 3.0 * d) * g * g * v;
      }
      case RegimeLabel::SRD: return static_cast<double>(r.site_count) * v;
      case RegimeLabel::ND_EE:
      case RegimeLabel::ND_critical: return std::pow(r.lambda, d - 1.0) * v;
    }
    return 0.0;
  };
  if (rep.limit && rep.scale_description.empty()) {
    switch (label) {
      case RegimeLabel::PSD: rep.scale_description = "lambda^(3d) gamma(lambda)^2 integral of G_infty^2"; break;
      case RegimeLabel::ND_NEE: rep.scale_description = "lambda^(3d) gamma(lambda)^2 integral of G_dagger^2"; break;
      case RegimeLabel::SRD: rep.scale_description = "N_n A^2"; break;
      case RegimeLabel::ND_EE:
      case RegimeLabel::ND_critical: rep.scale_description = "lambda^(d-1) times the edge-effect constant"; break;
    }
  }
  for (auto& r : rep.rows) {
    r.predicted_sq = predicted(r);
    r.ratio = r.predicted_sq > 0 ? (r.sigma_sq + r.tail_estimate) / r.predicted_sq : 0.0;
  }

  if (s.replicates > 0) {
    const SimulationPlan plan = make_plan(last, s.max_exact);
    rep.aggregated_variance_fraction = plan.total_variance > 0 ? plan.aggregated_variance / plan.total_variance : 0.0;
    rep.samples = sample_sums(plan, s.innovation, s.replicates, s.base_seed);
    rep.clt = normality_test(rep.samples, std::sqrt(plan.total_variance), "computed sigma_n over the window");
    const double p = rep.rows.back().predicted_sq;
    if (p > 0) rep.clt_theorem_scale = normality_test(rep.samples, std::sqrt(p), rep.scale_description);
  }
  return rep;
}

}  // namespace slrd
