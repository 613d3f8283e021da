#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "slrd/output.hpp"
#include "slrd/pipeline.hpp"

namespace slrd {

namespace {

namespace fs = std::filesystem;

std::string write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + p.string());
  out << content;
  if (!out) fail(ErrorKind::io, "write failed for " + p.string());
  return p.string();
}

Json dependence_json(const DependenceClass& c) {
  return Json{{"regime", regime_name(c.label)},
              {"predicted_variance_exponent", c.predicted_variance_exponent},
              {"requires_A_zero", c.requires_A_zero}};
}

Json growth_json(const ExperimentReport& rep) {
  Json j = dependence_json(rep.dependence);
  j["fit"] = rep.growth ? to_json(*rep.growth) : Json(nullptr);
  return j;
}

Json limits_json(const ExperimentReport& rep) {
  Json j = dependence_json(rep.dependence);
  j["limit"] = rep.limit ? to_json(*rep.limit) : Json(nullptr);
  j["scale"] = rep.scale_description;
  return j;
}

Json clt_json(const RunConfig& c, const ExperimentReport& rep) {
  Json j;
  j["lambda"] = rep.rows.back().lambda;
  j["innovation"] = innovation_name(c.innovation);
  j["aggregated_variance_fraction"] = rep.aggregated_variance_fraction;
  j["omitted_tail_bound"] = rep.rows.back().tail_bound;
  j["valid"] = rep.rows.back().valid;
  j["computed_scale"] = rep.clt ? to_json(*rep.clt) : Json(nullptr);
  j["theorem_scale"] = rep.clt_theorem_scale ? to_json(*rep.clt_theorem_scale) : Json(nullptr);
  return j;
}

Json summary_json(const ExperimentReport& rep) {
  Json j = dependence_json(rep.dependence);
  if (rep.growth) {
    j["measured_slope"] = rep.growth->slope;
    j["slope_confidence_halfwidth"] = rep.growth->confidence_halfwidth;
    j["slope_minus_prediction"] = rep.growth->slope - rep.dependence.predicted_variance_exponent;
  } else {
    j["measured_slope"] = nullptr;
  }
  j["limit"] = rep.limit ? to_json(*rep.limit) : Json(nullptr);
  j["scale"] = rep.scale_description;
  Json ratios = Json::array();
  for (const auto& r : rep.rows)
    ratios.push_back(Json{{"lambda", r.lambda}, {"ratio", r.ratio}, {"valid", r.valid}});
  j["limit_ratios"] = ratios;
  j["largest_lambda_ratio_minus_one"] = rep.rows.back().ratio > 0 ? Json(rep.rows.back().ratio - 1.0) : Json(nullptr);
  j["clt_pass"] = rep.clt ? Json(rep.clt->pass) : Json(nullptr);
  j["note"] = "finite-lambda tolerances are engineering choices; the limits are asymptotic";
  Json rows = Json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  j["rows"] = rows;
  return j;
}

}  // namespace

std::vector<std::string> run(const RunConfig& c) {
  const CoefficientModel model = build_model(c.model);
  const RegionPrototype region = build_region(c.region);
  ExperimentSettings s = build_settings(c);
  if (c.command == Command::mc && c.replicates < 100) fail(ErrorKind::validation, "mc needs at least 100 replicates");
  if (c.command != Command::mc && c.command != Command::report) s.replicates = 0;
  if (c.command == Command::mc) s.lambda_grid = {c.lambda_grid.back()};

  const ExperimentReport rep = regime_experiment(model, region, s);

  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + dir.string());
  std::vector<std::string> written;
  const bool all = c.command == Command::report;
  if (c.command == Command::scan || all) {
    written.push_back(write_file(dir, "scan.csv", csv_document(c, scan_csv(rep))));
    written.push_back(write_file(dir, "growth.json", json_document(c, growth_json(rep))));
  }
  if (c.command == Command::decompose || all)
    written.push_back(write_file(dir, "decomposition.csv", csv_document(c, decomposition_csv(rep))));
  if (c.command == Command::limits || all)
    written.push_back(write_file(dir, "limits.json", json_document(c, limits_json(rep))));
  if ((c.command == Command::mc || all) && rep.clt) {
    written.push_back(write_file(dir, "clt.json", json_document(c, clt_json(c, rep))));
    written.push_back(
        write_file(dir, "histogram.csv", csv_document(c, histogram_csv(histogram(rep.samples, c.histogram_bins)))));
  }
  if (all) written.push_back(write_file(dir, "summary.json", json_document(c, summary_json(rep))));
  return written;
}

int run_command_line(const CommandLine& cli) {
  std::string out_dir = cli.out.value_or("out");
  try {
    std::ifstream in(cli.config_path);
    if (!in) fail(ErrorKind::io, "cannot read config file " + cli.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig c = parse_config(ss.str(), fs::path(cli.config_path).parent_path().string());
    c.command = cli.command;
    if (cli.out) c.output = *cli.out;
    if (cli.seed) c.base_seed = *cli.seed;
    out_dir = c.output;
    if (cli.threads < 0) fail(ErrorKind::validation, "--threads must be non-negative");
    if (cli.threads > 0) omp_set_num_threads(cli.threads);
    for (const auto& p : run(c)) std::cout << p << "\n";
    return exit_ok;
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    const bool validation = err && err->kind() == ErrorKind::validation;
    const int code = validation ? exit_validation : exit_runtime;
    std::cerr << "spatial-lrd: " << (err ? error_kind_name(err->kind()) : "runtime") << " error: " << e.what() << "\n";
    Json j;
    j["version"] = SLRD_VERSION;
    j["error"] = Json{{"kind", err ? error_kind_name(err->kind()) : "runtime"}, {"message", e.what()}};
    j["exit_status"] = code;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream f(fs::path(out_dir) / "error.json", std::ios::trunc);
    if (f) f << j.dump(2) << "\n";
    return code;
  }
}

}  // namespace slrd
