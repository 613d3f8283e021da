#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "slrd/config.hpp"
#include "slrd/experiment.hpp"
#include "slrd/pipeline.hpp"
#include "slrd/random.hpp"

using namespace slrd;
namespace fs = std::filesystem;

namespace {

constexpr double kFftRelTol = 1e-9;
constexpr double kSrdSlopeTol = 0.05;
constexpr double kSrdVarianceTol = 0.05;
constexpr double kPsdSlopeTol = 0.15;
constexpr double kPsdRatioLo = 0.85;
constexpr double kPsdRatioHi = 1.15;
constexpr double kDualMethodTol = 0.01;
constexpr double kEeSlopeTol = 0.2;
constexpr double kEeConstantTol = 0.10;
constexpr double kEeBulkFraction = 0.10;
constexpr double kNeeSlopeTol = 0.25;
constexpr double kNeeRatioLo = 0.8;
constexpr double kNeeRatioHi = 1.2;
constexpr double kKsAlpha = 0.01;
constexpr std::size_t kCltReplicates = 2000;
constexpr int kGaussianRuns = 100;
constexpr int kGaussianPassesNeeded = 99;
constexpr std::uint64_t kCltSeed = 12345;
constexpr std::size_t kGaussianMaxExact = 4096;
constexpr double kLindebergMax = 0.05;
constexpr double kInvariantRelTol = 1e-12;
constexpr double kProfileAgreementTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Regime {
  std::string name;
  CoefficientModel model;
  RegionPrototype region;
  std::vector<double> grid;
  double limit_rel_tol = 1e-6;
  ExperimentReport report;
};

ExperimentSettings settings_for(const Regime& r) {
  ExperimentSettings s;
  s.lambda_grid = r.grid;
  s.replicates = 0;
  s.limit_options.rel_tol = r.limit_rel_tol;
  return s;
}

CoefficientModel srd_table() {
  return CoefficientModel::table(2, {{IVec{0, 0}, 1.5}, {IVec{1, 0}, 0.25}, {IVec{0, 1}, 0.25}});
}

CoefficientModel pure_power(double beta, bool balanced) {
  IsotropicParams p;
  p.amplitude = IsotropicParams::Amplitude::pure_power;
  CoefficientModel m = CoefficientModel::isotropic(2, beta, p);
  return balanced ? m.balanced() : m;
}

std::vector<Regime> regimes() {
  std::vector<Regime> out;
  const std::vector<double> srd_grid{16, 32, 64, 128, 256};
  const std::vector<double> psd_grid{32, 64, 128, 256, 512};
  const std::vector<double> nd_grid{64, 128, 256, 512};
  out.push_back({"srd-delta", CoefficientModel::delta(2), RegionPrototype::cube(2), srd_grid});
  out.push_back({"srd-table", srd_table(), RegionPrototype::cube(2), srd_grid});
  out.push_back({"psd-cube", pure_power(1.5, false), RegionPrototype::cube(2), psd_grid});
  out.push_back({"psd-ball", pure_power(1.5, false), RegionPrototype::ball(2, 0.5), psd_grid});
  out.push_back({"nd-edge", CoefficientModel::separable_nd({}), RegionPrototype::cube(2), nd_grid});
  out.push_back({"nd-no-edge", pure_power(2.2, true), RegionPrototype::cube(2), nd_grid, 1e-4});
  return out;
}

Outcome criterion_fft() {
  Outcome o;
  const std::vector<std::pair<std::string, CoefficientModel>> models = {
      {"delta", CoefficientModel::delta(2)},
      {"iso1.5", CoefficientModel::isotropic(2, 1.5)},
      {"iso2.2", CoefficientModel::isotropic(2, 2.2)},
      {"iso3", CoefficientModel::isotropic(2, 3.0)},
      {"separable", CoefficientModel::separable_nd({})}};
  const std::vector<std::pair<std::string, RegionPrototype>> regions = {
      {"cube", RegionPrototype::cube(2)},
      {"ball", RegionPrototype::ball(2, 0.5)},
      {"star", RegionPrototype::polar_star({0.45, 0.2, 0.4, 0.25, 0.45, 0.2})}};
  const std::vector<std::pair<int, int>> picks = {{0, 0}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1},
                                                  {2, 2}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 2}};
  const double lambdas[] = {32.0, 24.0, 17.5};
  double worst = 0.0;
  int k = 0;
  for (const auto& [mi, ri] : picks) {
    const double lambda = lambdas[k++ % 3];
    const SiteSet sites = enumerate_sites(regions[static_cast<std::size_t>(ri)].second, lambda);
    const IntBox w = default_window(2, lambda, 2.0);
    const auto& m = models[static_cast<std::size_t>(mi)].second;
    const ThetaField a = theta_direct(m, sites, w);
    const ThetaField b = theta_fft(m, sites, w);
    double scale = 0.0, dev = 0.0;
    for (std::size_t q = 0; q < a.values.size(); ++q) {
      scale = std::max(scale, std::abs(a.values[q]));
      dev = std::max(dev, std::abs(a.values[q] - b.values[q]));
    }
    worst = std::max(worst, dev / scale);
  }
  o.require(picks.size() == 12, "configurations " + std::to_string(picks.size()));
  o.require(worst < kFftRelTol, "max relative deviation " + fmt("%.2e", worst));
  return o;
}

Outcome criterion_srd(const std::vector<Regime>& rs) {
  Outcome o;
  for (const auto& r : rs) {
    if (r.name.rfind("srd", 0) != 0) continue;
    const auto& rep = r.report;
    const double a2 = r.model.kind() == ModelKind::delta ? 1.0 : 4.0;
    const double slope = rep.growth ? rep.growth->slope : NAN;
    o.require(std::abs(slope - 2.0) <= kSrdSlopeTol, r.name + " slope " + fmt("%.4f", slope));
    const auto& last = rep.rows.back();
    const double v = last.sigma_sq / static_cast<double>(last.site_count);
    o.require(std::abs(v / a2 - 1.0) <= kSrdVarianceTol, r.name + " sigma^2/N " + fmt("%.4f", v));
  }
  return o;
}

Outcome criterion_psd(const std::vector<Regime>& rs) {
  Outcome o;
  for (const auto& r : rs) {
    if (r.name.rfind("psd", 0) != 0) continue;
    const auto& rep = r.report;
    const double slope = rep.growth ? rep.growth->slope : NAN;
    o.require(std::abs(slope - 3.0) <= kPsdSlopeTol, r.name + " slope " + fmt("%.4f", slope));
    const double ratio = rep.rows.back().ratio;
    o.require(ratio >= kPsdRatioLo && ratio <= kPsdRatioHi, r.name + " ratio " + fmt("%.4f", ratio));
    IntegralOptions mc;
    mc.method = LimitMethod::monte_carlo_integration;
    const double q = rep.limit ? rep.limit->value : NAN;
    const double m = limit_variance_psd(r.model, r.region, mc).value;
    o.require(std::abs(q / m - 1.0) <= kDualMethodTol, r.name + " quadrature/mc " + fmt("%.4f", q / m));
  }
  return o;
}

Outcome criterion_edge(const std::vector<Regime>& rs) {
  Outcome o;
  for (const auto& r : rs) {
    if (r.name != "nd-edge") continue;
    const auto& rep = r.report;
    const double slope = rep.growth ? rep.growth->slope : NAN;
    o.require(std::abs(slope - 1.0) <= kEeSlopeTol, "slope " + fmt("%.4f", slope));
    const auto& last = rep.rows.back();
    const double s0 = example42_sigma0(std::get<SeparableParams>(r.model.params())).value;
    const double v = last.sigma_sq / last.lambda;
    o.require(std::abs(v / s0 - 1.0) <= kEeConstantTol, "sigma^2/lambda over sigma0^2 " + fmt("%.4f", v / s0));
    const auto& d = last.decomposition;
    const double frac = (d.interior_sum + d.exterior_sum) / d.boundary_sum;
    o.require(frac < kEeBulkFraction, "(interior+exterior)/boundary " + fmt("%.4f", frac));
  }
  return o;
}

Outcome criterion_no_edge(const std::vector<Regime>& rs) {
  Outcome o;
  for (const auto& r : rs) {
    if (r.name != "nd-no-edge") continue;
    const auto& rep = r.report;
    o.require(rep.dependence.label == RegimeLabel::ND_NEE, std::string("regime ") + regime_name(rep.dependence.label));
    const double slope = rep.growth ? rep.growth->slope : NAN;
    o.require(std::abs(slope - 1.6) <= kNeeSlopeTol, "slope " + fmt("%.4f", slope));
    const double ratio = rep.rows.back().ratio;
    o.require(ratio >= kNeeRatioLo && ratio <= kNeeRatioHi, "ratio " + fmt("%.4f", ratio));
  }
  return o;
}

Outcome criterion_clt(const std::vector<Regime>& rs) {
  Outcome o;
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    const Regime& r = rs[ri];
    const std::uint64_t seed = stream_seed(kCltSeed, ri);
    const double lambda = r.grid.back();
    const ThetaField theta = compute_theta(r.model, enumerate_sites(r.region, lambda), 4.0, ThetaMethod::fft);
    const SimulationPlan plan = make_plan(theta, std::size_t{1} << 18);
    const double scale = std::sqrt(plan.total_variance);
    for (Innovation i : {Innovation::rademacher, Innovation::centered_exponential}) {
      const auto x = sample_sums(plan, {i}, kCltReplicates, seed);
      const CltReport c = normality_test(x, scale);
      if (c.ks_threshold != ks_threshold(kCltReplicates, kKsAlpha)) o.require(false, "KS level");
      o.require(c.pass, r.name + " " + innovation_name(i) + " D " + fmt("%.4f", c.ks_statistic));
    }
    const SimulationPlan gplan = make_plan(theta, kGaussianMaxExact);
    int passes = 0;
    for (int run = 0; run < kGaussianRuns; ++run) {
      const auto x = sample_sums(gplan, {Innovation::gaussian}, kCltReplicates,
                                 stream_seed(seed, static_cast<std::uint64_t>(run)));
      passes += normality_test(x, scale).pass;
    }
    o.require(passes >= kGaussianPassesNeeded, r.name + " gaussian " + std::to_string(passes) + "/" +
                                                   std::to_string(kGaussianRuns));
  }
  return o;
}

Outcome criterion_lindeberg(const std::vector<Regime>& rs) {
  Outcome o;
  for (const auto& r : rs) {
    bool decreasing = true;
    for (std::size_t k = 1; k < r.report.rows.size(); ++k)
      decreasing = decreasing && r.report.rows[k].lindeberg_ratio < r.report.rows[k - 1].lindeberg_ratio;
    const double last = r.report.rows.back().lindeberg_ratio;
    o.require(decreasing && last < kLindebergMax, r.name + " " + fmt("%.4f", last));
  }
  return o;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_invariants() {
  Outcome o;
  const CoefficientModel iso = CoefficientModel::isotropic(2, 1.5);
  const RegionPrototype star = RegionPrototype::polar_star_lobed(0.35, 0.2, 5, 256);

  {
    bool ok = true;
    for (double lambda : {12.0, 20.0, 33.0}) {
      const SiteSet sites = enumerate_sites(star, lambda);
      const ThetaField th = theta_fft(iso, sites, default_window(2, lambda, 3.0));
      const auto cls = classify_sites(star, lambda, default_t_n(lambda), th.window);
      ok = ok && cls.interior_count + cls.exterior_count + cls.boundary_count == cls.labels.size();
      const auto d = variance_decompose(th, cls);
      ok = ok && close(d.interior_sum + d.exterior_sum + d.boundary_sum + d.unclassified_sum, sigma_sq(th).value,
                       kInvariantRelTol);
    }
    o.require(ok, "partition identities");
  }
  {
    const SiteSet sites = enumerate_sites(star, 15.0);
    const IntBox w = default_window(2, 15.0, 2.0);
    const IVec v{5, -3, 0};
    IntBox ws = w;
    for (int a = 0; a < 2; ++a) {
      ws.lo[a] += v[a];
      ws.hi[a] += v[a];
    }
    o.require(theta_direct(iso, sites, w).values == theta_direct(iso, translate(sites, v), ws).values,
              "translation covariance");
  }
  {
    const std::map<IVec, double> e1 = {{IVec{0, 0, 0}, 0.7}, {IVec{2, 1, 0}, -0.3}};
    const std::map<IVec, double> e2 = {{IVec{0, 0, 0}, -0.2}, {IVec{0, -2, 0}, 0.4}};
    std::map<IVec, double> both = e1;
    for (const auto& [k, x] : e2) both[k] += x;
    const SiteSet sites = enumerate_sites(star, 21.0);
    const IntBox w = default_window(2, 21.0, 2.0);
    const auto a = theta_direct(CoefficientModel::table(2, e1), sites, w);
    const auto b = theta_direct(CoefficientModel::table(2, e2), sites, w);
    const auto c = theta_direct(CoefficientModel::table(2, both), sites, w);
    bool ok = true;
    for (std::size_t q = 0; q < c.values.size(); ++q) ok = ok && close(c.values[q], a.values[q] + b.values[q], kInvariantRelTol);
    o.require(ok, "linearity");
  }
  {
    const SiteSet sites = enumerate_sites(RegionPrototype::cube(2), 14.0);
    const IntBox w = default_window(2, 14.0, 2.0);
    const auto base = theta_direct(iso, sites, w);
    const auto s = theta_direct(iso.scaled(-2.5), sites, w);
    bool ok = close(sigma_sq(s).value, 6.25 * sigma_sq(base).value, kInvariantRelTol);
    for (std::size_t q = 0; q < s.values.size(); ++q) ok = ok && close(s.values[q], -2.5 * base.values[q], kInvariantRelTol);
    o.require(ok, "scaling");
  }
  {
    const CoefficientModel m = pure_power(2.2, true);
    Xoshiro256 rng(91);
    bool ok = true;
    int tested = 0;
    for (const auto& p : {RegionPrototype::ball(2, 0.5), RegionPrototype::cube(2), star}) {
      for (int k = 0; k < 20;) {
        const std::vector<double> x{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        if (p.contains(x) || p.boundary_distance(x) < 1e-3) continue;
        ++k;
        ++tested;
        const double a = G_infty_at(m, p, x).value;
        const double b = G_dagger_at(m, p, x).value;
        ok = ok && std::abs(a - b) <= kProfileAgreementTol * std::max(1.0, std::abs(a));
      }
    }
    o.require(ok, "exterior profile agreement at " + std::to_string(tested) + " points");
  }
  {
    const double base = example42_sigma0({}).value;
    bool ok = true;
    for (double c : {0.5, 2.0, 3.0}) ok = ok && close(example42_sigma0({c, 3.0, {}}).value, std::pow(c, 4) * base, 1e-9);
    o.require(ok, "sigma0 homogeneity");
  }
  {
    const std::string text =
        "[model]\nkind = directional-cones\ndirections = 1, 0; 0, 1\nwidths = 0.5, 0.5\nexponents = 1.5, 1.8\n"
        "override = 0,0:0.3\n\n[region]\nkind = polar-star-lobed\nlobes = 3\n\n[experiment]\n"
        "lambda_grid = 8, 16.5, 40\nt_n = fixed(2.5)\ninnovation = shifted-uniform\nbase_seed = 99\n";
    const RunConfig c = parse_config(text);
    const std::string s = serialize_config(c);
    o.require(parse_config(s) == c && serialize_config(parse_config(s)) == s, "config round trip");
  }
  {
    const fs::path dir = fs::temp_directory_path() / "slrd_acceptance_rerun";
    fs::remove_all(dir);
    RunConfig c = parse_config(
        "[model]\nkind = isotropic\nbeta = 2.5\n\n[region]\nkind = ball\n\n[experiment]\nlambda_grid = 8, 16, 32, 64\n"
        "replicates = 200\nbase_seed = 5\n");
    c.output = dir.string();
    std::vector<std::string> first;
    for (const auto& p : run(c)) first.push_back(slurp(p));
    const auto paths = run(c);
    bool ok = paths.size() == first.size() && !first.empty();
    for (std::size_t k = 0; ok && k < paths.size(); ++k) ok = slurp(paths[k]) == first[k];
    o.require(ok, "byte-identical reruns of " + std::to_string(paths.size()) + " files");
    fs::remove_all(dir);
  }
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int k, const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::printf("criterion %d %-28s %s  (%.1f s)  %s\n", k, name.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "fft-direct-equivalence", criterion_fft);

  std::vector<Regime> rs = regimes();
  const auto t0 = std::chrono::steady_clock::now();
  for (auto& r : rs) r.report = regime_experiment(r.model, r.region, settings_for(r));
  std::printf("regime scans  (%.1f s)\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  report(2, "srd-rate-and-variance", [&] { return criterion_srd(rs); });
  report(3, "psd-rate-and-limit", [&] { return criterion_psd(rs); });
  report(4, "nd-edge-effect", [&] { return criterion_edge(rs); });
  report(5, "nd-without-edge-effect", [&] { return criterion_no_edge(rs); });
  report(6, "clt-normality", [&] { return criterion_clt(rs); });
  report(7, "lindeberg", [&] { return criterion_lindeberg(rs); });
  report(8, "invariants", criterion_invariants);
  return all ? 0 : 1;
}
