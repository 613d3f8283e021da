#include <sstream>

#include "slrd/output.hpp"

namespace slrd {

Json to_json(const LimitVariance& v) {
  return Json{{"regime", regime_name(v.regime)},
              {"value", v.value},
              {"method", limit_method_name(v.method)},
              {"error_estimate", v.error_estimate},
              {"provenance", v.provenance}};
}

Json to_json(const CltReport& r) {
  return Json{{"replicate_count", r.replicate_count},
              {"sample_mean", r.sample_mean},
              {"sample_variance", r.sample_variance},
              {"skewness", r.skewness},
              {"excess_kurtosis", r.excess_kurtosis},
              {"ks_statistic", r.ks_statistic},
              {"ks_threshold", r.ks_threshold},
              {"pass", r.pass},
              {"degenerate", r.degenerate},
              {"predicted_scale", r.predicted_scale},
              {"scale_source", r.scale_source}};
}

Json to_json(const GrowthFit& g) {
  return Json{{"slope", g.slope}, {"intercept", g.intercept}, {"confidence_halfwidth", g.confidence_halfwidth}};
}

Json to_json(const VarianceDecomposition& v) {
  return Json{{"t_n", v.t_n},
              {"sigma_sq_total", v.sigma_sq_total},
              {"interior_sum", v.interior_sum},
              {"exterior_sum", v.exterior_sum},
              {"boundary_sum", v.boundary_sum},
              {"boundary_sum_scaled", v.boundary_sum_scaled},
              {"unclassified_sum", v.unclassified_sum},
              {"tail_bound", v.tail_bound}};
}

Json to_json(const LambdaRow& row) {
  return Json{{"lambda", row.lambda},
              {"N_n", row.site_count},
              {"sigma_sq", row.sigma_sq},
              {"tail_bound", row.tail_bound},
              {"tail_estimate", row.tail_estimate},
              {"lindeberg_ratio", row.lindeberg_ratio},
              {"valid", row.valid},
              {"predicted_sq", row.predicted_sq},
              {"ratio", row.ratio},
              {"decomposition", to_json(row.decomposition)}};
}

std::string json_document(const RunConfig& config, const Json& body) {
  Json doc;
  doc["version"] = SLRD_VERSION;
  doc["config"] = serialize_config(config);
  doc["result"] = body;
  return doc.dump(2) + "\n";
}

std::string csv_document(const RunConfig& config, const std::string& csv) {
  std::ostringstream os;
  os << "# spatial-lrd " << SLRD_VERSION << "\n";
  std::istringstream cfg(serialize_config(config));
  std::string line;
  while (std::getline(cfg, line)) os << "# " << line << "\n";
  os << csv;
  return os.str();
}

std::string scan_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,N_n,sigma_sq,tail_bound,tail_estimate,lindeberg_ratio,interior_sum,exterior_sum,boundary_sum_scaled,"
        "valid\n";
  for (const auto& r : report.rows) {
    os << r.lambda << "," << r.site_count << "," << r.sigma_sq << "," << r.tail_bound << "," << r.tail_estimate << ","
       << r.lindeberg_ratio << "," << r.decomposition.interior_sum << "," << r.decomposition.exterior_sum << ","
       << r.decomposition.boundary_sum_scaled << "," << (r.valid ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string decomposition_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,t_n,sigma_sq_total,interior_sum,exterior_sum,boundary_sum,boundary_sum_scaled,unclassified_sum,"
        "tail_bound\n";
  for (const auto& r : report.rows) {
    const auto& d = r.decomposition;
    os << r.lambda << "," << d.t_n << "," << d.sigma_sq_total << "," << d.interior_sum << "," << d.exterior_sum << ","
       << d.boundary_sum << "," << d.boundary_sum_scaled << "," << d.unclassified_sum << "," << d.tail_bound << "\n";
  }
  return os.str();
}

}  // namespace slrd
