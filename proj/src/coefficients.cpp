#include "slrd/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slrd/quadrature.hpp"

namespace slrd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_of(const IVec& k, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += static_cast<double>(k[a]) * static_cast<double>(k[a]);
  return std::sqrt(s);
}

double dot(const std::vector<double>& o, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t a = 0; a < o.size(); ++a) s += o[a] * x[a];
  return s;
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// C-infinity step: 1 on [0, 1/2], 0 on [1, inf).
double smooth_cutoff(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double x = 2.0 * (s - 0.5);
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return b / (a + b);
}

double isotropic_radial(const IsotropicParams& p, double beta, double r) {
  double v;
  if (p.amplitude == IsotropicParams::Amplitude::pure_power)
    v = r > 0 ? std::pow(r, -beta) : 1.0;
  else
    v = std::pow(1.0 + r, -beta);
  if (p.log_power != 0.0) v *= std::pow(std::log(std::numbers::e + r), p.log_power);
  return p.c0 * v;
}

// Sum over integers m > m0 of shell(m) h(m) for non-increasing h, bounded by integral comparison.
template <class H>
double shell_tail(int d, double m0, H h) {
  auto shell = [d](double x) { return std::pow(2.0 * x + 1.0, d) - std::pow(2.0 * x - 1.0, d); };
  double total = 0.0;
  const double start = std::floor(m0);
  const double direct_end = start + 2048.0;
  for (double m = start + 1.0; m <= direct_end; m += 1.0) total += shell(m) * h(m);
  double lo = direct_end;
  QuadTolerance tol{0.0, 1e-6, 200};
  double last = 0.0;
  for (int block = 0; block < 80; ++block) {
    const double hi = 2.0 * lo;
    const auto r = integrate([&](double x) { return shell(x + 1.0) * h(x); }, lo, hi, tol);
    total += r.value + r.error;
    last = r.value;
    lo = hi;
    if (last <= 1e-17 * total) break;
  }
  return total + last;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::isotropic: return "isotropic";
    case ModelKind::anisotropic_orthant: return "anisotropic-orthant";
    case ModelKind::directional_cones: return "directional-cones";
    case ModelKind::separable_nd: return "separable-nd";
    case ModelKind::delta: return "delta";
    case ModelKind::table: return "table";
  }
  return "unknown";
}

const char* regime_name(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::PSD: return "PSD";
    case RegimeLabel::SRD: return "SRD";
    case RegimeLabel::ND_NEE: return "ND-NEE";
    case RegimeLabel::ND_EE: return "ND-EE";
    case RegimeLabel::ND_critical: return "ND-critical";
  }
  return "unknown";
}

const std::vector<std::vector<double>>& direction_grid(int dim) {
  static const std::vector<std::vector<double>> grids[3] = {
      {{1.0}, {-1.0}},
      [] {
        std::vector<std::vector<double>> g;
        constexpr int n = 8192;
        for (int k = 0; k < n; ++k) {
          const double phi = kTwoPi * k / n;
          g.push_back({std::cos(phi), std::sin(phi)});
        }
        return g;
      }(),
      [] {
        std::vector<std::vector<double>> g;
        constexpr int n = 8192;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < n; ++k) {
          const double z = 1.0 - 2.0 * (k + 0.5) / n;
          const double r = std::sqrt(1.0 - z * z);
          g.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
        }
        return g;
      }()};
  if (dim < 1 || dim > 3) fail(ErrorKind::validation, "dimension must be in 1..3");
  return grids[dim - 1];
}

CoefficientModel CoefficientModel::isotropic(int dim, double beta, IsotropicParams p) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "model dimension must be in 1..3");
  if (!(beta > 0.5 * dim)) fail(ErrorKind::validation, "beta must exceed d/2");
  if (p.c0 == 0.0) fail(ErrorKind::validation, "isotropic c0 must be nonzero");
  CoefficientModel m;
  m.kind_ = ModelKind::isotropic;
  m.dim_ = dim;
  m.beta_ = beta;
  m.params_ = p;
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::anisotropic_orthant(int dim, AnisotropicParams p) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "model dimension must be in 1..3");
  if (static_cast<int>(p.rows.size()) != dim || static_cast<int>(p.exponents.size()) != dim)
    fail(ErrorKind::validation, "anisotropic-orthant needs d rows and d exponents");
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(p.rows[i].size()) != dim) fail(ErrorKind::validation, "anisotropic row has wrong length");
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += p.rows[i][a] * p.rows[j][a];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-9)
        fail(ErrorKind::validation, "anisotropic rows must be orthonormal");
    }
    if (p.exponents[i] < 0) fail(ErrorKind::validation, "anisotropic exponents must be non-negative");
  }
  if (!(p.delta > 0 && p.delta < 1.0 / std::sqrt(static_cast<double>(dim))))
    fail(ErrorKind::validation, "anisotropic delta must be in (0, 1/sqrt(d))");
  double beta = 0.0;
  for (double a : p.exponents) beta += a;
  if (!(beta > 0.5 * dim)) fail(ErrorKind::validation, "sum of anisotropic exponents must exceed d/2");
  CoefficientModel m;
  m.kind_ = ModelKind::anisotropic_orthant;
  m.dim_ = dim;
  m.beta_ = beta;
  m.params_ = std::move(p);
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::directional_cones(int dim, ConesParams p) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "model dimension must be in 1..3");
  const std::size_t n = p.directions.size();
  if (n == 0 || p.widths.size() != n || p.exponents.size() != n)
    fail(ErrorKind::validation, "directional-cones needs matching directions, widths and exponents");
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(p.directions[i].size()) != dim)
      fail(ErrorKind::validation, "cone direction has wrong length");
    double s = 0.0;
    for (double c : p.directions[i]) s += c * c;
    if (std::abs(s - 1.0) > 1e-9) fail(ErrorKind::validation, "cone directions must be unit vectors");
    if (!(p.widths[i] > 0 && p.widths[i] < 1)) fail(ErrorKind::validation, "cone widths must be in (0, 1)");
    if (!(p.exponents[i] > 0)) fail(ErrorKind::validation, "cone exponents must be positive");
  }
  const double a0 = *std::min_element(p.exponents.begin(), p.exponents.end());
  if (!(a0 > 0.5 * dim)) fail(ErrorKind::validation, "smallest cone exponent must exceed d/2");
  CoefficientModel m;
  m.kind_ = ModelKind::directional_cones;
  m.dim_ = dim;
  m.beta_ = a0;
  m.params_ = std::move(p);
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::separable_nd(SeparableParams p) {
  double beta = kInf;
  if (p.values.empty()) {
    if (!(p.power > 1.0)) fail(ErrorKind::validation, "separable power must exceed 1");
    if (!(p.scale > 0)) fail(ErrorKind::validation, "separable scale must be positive");
    beta = p.power;
  } else {
    for (double v : p.values)
      if (!(v > 0)) fail(ErrorKind::validation, "separable b values must be positive");
  }
  CoefficientModel m;
  m.kind_ = ModelKind::separable_nd;
  m.dim_ = 2;
  m.beta_ = beta;
  m.params_ = std::move(p);
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::delta(int dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "model dimension must be in 1..3");
  CoefficientModel m;
  m.kind_ = ModelKind::delta;
  m.dim_ = dim;
  m.beta_ = kInf;
  m.params_ = DeltaParams{};
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::table(int dim, std::map<IVec, double> entries) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::validation, "model dimension must be in 1..3");
  for (const auto& [k, v] : entries)
    for (int a = dim; a < kMaxDim; ++a)
      if (k[a] != 0) fail(ErrorKind::validation, "table entry has extra coordinates");
  CoefficientModel m;
  m.kind_ = ModelKind::table;
  m.dim_ = dim;
  m.beta_ = kInf;
  m.params_ = TableParams{std::move(entries)};
  m.finalize();
  return m;
}

CoefficientModel CoefficientModel::with_override(std::map<IVec, double> values) const {
  CoefficientModel m = *this;
  for (const auto& [k, v] : values) {
    for (int a = dim_; a < kMaxDim; ++a)
      if (k[a] != 0) fail(ErrorKind::validation, "override entry has extra coordinates");
    m.override_[k] = v;
  }
  if (m.balanced_) m = CoefficientModel(m).balanced();
  return m;
}

CoefficientModel CoefficientModel::scaled(double c) const {
  if (c == 0.0) fail(ErrorKind::validation, "scale factor must be nonzero");
  CoefficientModel m = *this;
  m.scale_ *= c;
  return m;
}

CoefficientModel CoefficientModel::balanced() const {
  if (kind_ != ModelKind::isotropic) fail(ErrorKind::validation, "center balancing is available for isotropic models");
  if (!(beta_ > dim_)) fail(ErrorKind::validation, "center balancing needs beta > d");
  const auto& p = std::get<IsotropicParams>(params_);
  const double R = dim_ == 1 ? 4096.0 : (dim_ == 2 ? 128.0 : 32.0);
  const auto reach = static_cast<std::int64_t>(R);
  // Lattice sum of f w(|k|/R) plus the integral of f (1 - w); the remainder is a smooth lattice error.
  CompensatedSum inner;
  IntBox box = IntBox::cube(dim_, reach);
  const std::size_t n = box.cell_count();
  for (std::size_t idx = 0; idx < n; ++idx) {
    const IVec k = box.point(idx);
    const double r = norm_of(k, dim_);
    if (r == 0.0 || r >= R) continue;
    inner.add(isotropic_radial(p, beta_, r) * smooth_cutoff(r / R));
  }
  const double area = sphere_area(dim_);
  QuadTolerance tol{0.0, 1e-14, 2000};
  const auto near = integrate(
      [&](double r) { return isotropic_radial(p, beta_, r) * (1.0 - smooth_cutoff(r / R)) * std::pow(r, dim_ - 1); },
      0.5 * R, R, tol);
  const double q = beta_ - dim_;
  // r = R u^(-1/q) maps [R, inf) to (0, 1].
  const auto far = integrate(
      [&](double u) {
        if (u <= 0) return 0.0;
        const double r = R * std::pow(u, -1.0 / q);
        return isotropic_radial(p, beta_, r) * std::pow(r, dim_ - 1) * (R / q) * std::pow(u, -1.0 / q - 1.0);
      },
      0.0, 1.0, tol);
  double sum = inner.value() + area * (near.value + far.value);
  for (const auto& [k, v] : override_) {
    const double r = norm_of(k, dim_);
    if (r == 0.0) continue;
    sum += v - isotropic_radial(p, beta_, r);
  }
  CoefficientModel m = *this;
  m.override_.erase(IVec{});
  m.balanced_ = true;
  m.center_ = -sum;
  return m;
}

void CoefficientModel::finalize() {
  switch (kind_) {
    case ModelKind::isotropic:
      gamma_const_ = std::abs(std::get<IsotropicParams>(params_).c0);
      break;
    case ModelKind::anisotropic_orthant: {
      const auto& p = std::get<AnisotropicParams>(params_);
      auto value = [&](std::span<const double> u) {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) {
          const double phi = std::abs(dot(p.rows[i], u));
          if (phi < p.delta) return 0.0;
          v *= std::pow(phi, -p.exponents[i]);
        }
        return v;
      };
      double best = 0.0;
      if (dim_ == 2) {
        for (int i = 0; i < 2; ++i) {
          const double w = std::atan2(p.rows[i][1], p.rows[i][0]);
          const double ac = std::acos(p.delta);
          for (double off : {ac, -ac, std::numbers::pi - ac, std::numbers::pi + ac}) {
            const double u[2] = {std::cos(w + off), std::sin(w + off)};
            double v = 1.0;
            bool ok = true;
            for (int j = 0; j < 2; ++j) {
              const double phi = j == i ? p.delta : std::abs(dot(p.rows[j], std::span<const double>(u, 2)));
              if (phi < p.delta * (1 - 1e-12)) ok = false;
              v *= std::pow(std::max(phi, p.delta), -p.exponents[j]);
            }
            if (ok) best = std::max(best, v);
          }
        }
      }
      for (const auto& u : direction_grid(dim_)) best = std::max(best, value(u));
      if (dim_ == 1) best = 1.0;
      gamma_const_ = best;
      break;
    }
    case ModelKind::directional_cones: {
      const auto& p = std::get<ConesParams>(params_);
      const double a0 = beta_;
      auto value = [&](std::span<const double> u) {
        double v = 0.0;
        for (std::size_t i = 0; i < p.directions.size(); ++i) {
          if (p.exponents[i] != a0) continue;
          const double phi = std::abs(dot(p.directions[i], u));
          if (phi > p.widths[i]) v += phi;
        }
        return v;
      };
      double best = 0.0;
      for (const auto& u : direction_grid(dim_)) best = std::max(best, value(u));
      for (const auto& o : p.directions) best = std::max(best, value(o));
      gamma_const_ = best;
      break;
    }
    case ModelKind::separable_nd: {
      const auto& p = std::get<SeparableParams>(params_);
      if (p.values.empty()) {
        b_total_ = p.scale * std::riemann_zeta(p.power);
      } else {
        double s = 0.0;
        for (auto it = p.values.rbegin(); it != p.values.rend(); ++it) s += *it;
        b_total_ = s;
      }
      center_ = -4.0 * b_total_ * b_total_;
      gamma_const_ = b(1) * (p.values.empty() ? p.scale : 0.0);
      break;
    }
    case ModelKind::delta:
    case ModelKind::table:
      gamma_const_ = 1.0;
      break;
  }
}

double CoefficientModel::b(std::int64_t i) const {
  const auto& p = std::get<SeparableParams>(params_);
  if (i < 0) i = -i;
  if (i == 0) return 0.0;
  if (p.values.empty()) return p.scale * std::pow(static_cast<double>(i), -p.power);
  return i <= static_cast<std::int64_t>(p.values.size()) ? p.values[static_cast<std::size_t>(i - 1)] : 0.0;
}

double CoefficientModel::raw_alpha(const IVec& k) const {
  bool origin = true;
  for (int a = 0; a < dim_; ++a)
    if (k[a] != 0) origin = false;
  switch (kind_) {
    case ModelKind::isotropic: {
      if (origin && balanced_) return center_;
      return isotropic_radial(std::get<IsotropicParams>(params_), beta_, norm_of(k, dim_));
    }
    case ModelKind::anisotropic_orthant: {
      if (origin) return 0.0;
      const auto& p = std::get<AnisotropicParams>(params_);
      const double r = norm_of(k, dim_);
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) {
        double proj = 0.0;
        for (int a = 0; a < dim_; ++a) proj += p.rows[i][a] * static_cast<double>(k[a]);
        proj = std::abs(proj);
        if (!(proj > p.delta * r)) return 0.0;
        v *= std::pow(proj, -p.exponents[i]);
      }
      return v;
    }
    case ModelKind::directional_cones: {
      if (origin) return 0.0;
      const auto& p = std::get<ConesParams>(params_);
      const double r = norm_of(k, dim_);
      double v = 0.0;
      for (std::size_t i = 0; i < p.directions.size(); ++i) {
        double proj = 0.0;
        for (int a = 0; a < dim_; ++a) proj += p.directions[i][a] * static_cast<double>(k[a]);
        const double phi = std::abs(proj) / r;
        if (phi > p.widths[i]) v += phi / (1.0 + std::pow(r, p.exponents[i]));
      }
      return v;
    }
    case ModelKind::separable_nd:
      if (origin) return center_;
      if (k[0] == 0 || k[1] == 0) return 0.0;
      return b(k[0]) * b(k[1]);
    case ModelKind::delta:
      return origin ? 1.0 : 0.0;
    case ModelKind::table: {
      const auto& e = std::get<TableParams>(params_).entries;
      const auto it = e.find(k);
      return it == e.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double CoefficientModel::alpha(const IVec& k) const {
  if (!override_.empty()) {
    const auto it = override_.find(k);
    if (it != override_.end()) return scale_ * it->second;
  }
  return scale_ * raw_alpha(k);
}

double CoefficientModel::envelope(double r) const {
  double env = 0.0;
  for (const auto& [k, v] : override_)
    if (norm_of(k, dim_) >= r) env = std::max(env, std::abs(v));
  if (r <= 0.0) env = std::max(env, std::abs(raw_alpha(IVec{})));
  const double rr = std::max(r, 1.0);
  switch (kind_) {
    case ModelKind::isotropic: {
      const auto& p = std::get<IsotropicParams>(params_);
      const double knee = p.log_power > 0 ? std::max(0.0, std::exp(p.log_power / beta_) - std::numbers::e) : 0.0;
      env = std::max(env, std::abs(isotropic_radial(p, beta_, std::max(rr, knee))));
      break;
    }
    case ModelKind::anisotropic_orthant:
      env = std::max(env, gamma_const_ * std::pow(rr, -beta_));
      break;
    case ModelKind::directional_cones: {
      const auto& p = std::get<ConesParams>(params_);
      double s = 0.0;
      for (double a : p.exponents) s += 1.0 / (1.0 + std::pow(rr, a));
      env = std::max(env, s);
      break;
    }
    case ModelKind::separable_nd: {
      const auto& p = std::get<SeparableParams>(params_);
      const auto m = static_cast<std::int64_t>(std::ceil(rr / std::sqrt(2.0)));
      double tail = 0.0;
      if (p.values.empty())
        tail = b(m);
      else
        for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(m, 1)); i <= p.values.size(); ++i)
          tail = std::max(tail, p.values[i - 1]);
      double b_max = 0.0;
      if (p.values.empty())
        b_max = b(1);
      else
        b_max = *std::max_element(p.values.begin(), p.values.end());
      env = std::max(env, b_max * tail);
      break;
    }
    case ModelKind::delta:
      break;
    case ModelKind::table:
      for (const auto& [k, v] : std::get<TableParams>(params_).entries)
        if (norm_of(k, dim_) >= r) env = std::max(env, std::abs(v));
      break;
  }
  return std::abs(scale_) * env;
}

double CoefficientModel::envelope_exponent() const {
  if (support_radius() < kInf) return kInf;
  return beta_;
}

double CoefficientModel::support_radius() const {
  double r = 0.0;
  for (const auto& [k, v] : override_) r = std::max(r, norm_of(k, dim_));
  switch (kind_) {
    case ModelKind::delta: return r;
    case ModelKind::table:
      for (const auto& [k, v] : std::get<TableParams>(params_).entries) r = std::max(r, norm_of(k, dim_));
      return r;
    case ModelKind::separable_nd: {
      const auto& p = std::get<SeparableParams>(params_);
      if (p.values.empty()) return kInf;
      return std::max(r, std::sqrt(2.0) * static_cast<double>(p.values.size()));
    }
    default: return kInf;
  }
}

double CoefficientModel::g_angular(std::span<const double> u) const {
  const double sign = scale_ < 0 ? -1.0 : 1.0;
  switch (kind_) {
    case ModelKind::isotropic:
      return sign * (std::get<IsotropicParams>(params_).c0 > 0 ? 1.0 : -1.0);
    case ModelKind::anisotropic_orthant: {
      const auto& p = std::get<AnisotropicParams>(params_);
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) {
        const double phi = std::abs(dot(p.rows[i], u));
        if (!(phi > p.delta)) return 0.0;
        v *= std::pow(phi, -p.exponents[i]);
      }
      return sign * v / gamma_const_;
    }
    case ModelKind::directional_cones: {
      const auto& p = std::get<ConesParams>(params_);
      double v = 0.0;
      for (std::size_t i = 0; i < p.directions.size(); ++i) {
        if (p.exponents[i] != beta_) continue;
        const double phi = std::abs(dot(p.directions[i], u));
        if (phi > p.widths[i]) v += phi;
      }
      return sign * v / gamma_const_;
    }
    default:
      return 0.0;
  }
}

bool CoefficientModel::g_limit_vanishes() const {
  return kind_ == ModelKind::separable_nd || kind_ == ModelKind::delta || kind_ == ModelKind::table;
}

double CoefficientModel::g_limit(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) fail(ErrorKind::validation, "point dimension does not match model");
  double r = 0.0;
  for (double c : x) r += c * c;
  r = std::sqrt(r);
  if (r == 0.0) fail(ErrorKind::domain, "g_limit is undefined at the origin");
  if (g_limit_vanishes()) return 0.0;
  double u[kMaxDim];
  for (int a = 0; a < dim_; ++a) u[a] = x[a] / r;
  return std::pow(r, -beta_) * g_angular(std::span<const double>(u, static_cast<std::size_t>(dim_)));
}

std::vector<double> CoefficientModel::g_breakpoints() const {
  std::vector<double> out;
  if (dim_ != 2) return out;
  auto add = [&](const std::vector<double>& o, double width) {
    const double w = std::atan2(o[1], o[0]);
    const double ac = std::acos(width);
    for (double off : {ac, -ac, std::numbers::pi - ac, std::numbers::pi + ac}) {
      double phi = std::fmod(w + off, kTwoPi);
      if (phi < 0) phi += kTwoPi;
      out.push_back(phi);
    }
  };
  if (kind_ == ModelKind::anisotropic_orthant) {
    const auto& p = std::get<AnisotropicParams>(params_);
    for (const auto& o : p.rows) add(o, p.delta);
  } else if (kind_ == ModelKind::directional_cones) {
    const auto& p = std::get<ConesParams>(params_);
    for (std::size_t i = 0; i < p.directions.size(); ++i)
      if (p.exponents[i] == beta_) add(p.directions[i], p.widths[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double lattice_shell_tail(int dim, double m0, const std::function<double(double)>& h) {
  return shell_tail(dim, m0, h);
}

GammaValue gamma(const CoefficientModel& model, double t) {
  if (!(t > 0)) fail(ErrorKind::validation, "gamma needs t > 0");
  const int d = model.dim();
  const auto& grid = direction_grid(d);
  const std::size_t n = grid.size();
  double best = 0.0;
#pragma omp parallel for reduction(max : best)
  for (std::size_t g = 0; g < n; ++g) {
    IVec k{};
    for (int a = 0; a < d; ++a) k[a] = static_cast<std::int64_t>(std::floor(grid[g][a] * t));
    best = std::max(best, std::abs(model.alpha(k)));
  }
  const double upper = std::max(best, model.envelope(std::max(0.0, t - std::sqrt(static_cast<double>(d)))));
  return {best, upper};
}

double g_profile(const CoefficientModel& model, double t, std::span<const double> x) {
  if (!(t > 0)) fail(ErrorKind::validation, "g_profile needs t > 0");
  if (static_cast<int>(x.size()) != model.dim()) fail(ErrorKind::validation, "point dimension does not match model");
  const double g = gamma(model, t).value;
  IVec k{};
  for (int a = 0; a < model.dim(); ++a) k[a] = static_cast<std::int64_t>(std::floor(t * x[a]));
  const double v = model.alpha(k);
  if (g == 0.0) {
    if (v == 0.0) return 0.0;
    fail(ErrorKind::numerical, "gamma(t) vanishes; rescaled profile undefined");
  }
  return v / g;
}

double g_limit(const CoefficientModel& model, std::span<const double> x) { return model.g_limit(x); }

double square_tail_bound(const CoefficientModel& model, double R) {
  if (model.support_radius() < kInf) {
    double s = 0.0;
    const auto reach = static_cast<std::int64_t>(std::ceil(model.support_radius()));
    if (R >= static_cast<double>(reach)) return 0.0;
    IntBox box = IntBox::cube(model.dim(), reach);
    for (std::size_t idx = 0; idx < box.cell_count(); ++idx) {
      const IVec k = box.point(idx);
      std::int64_t inf_norm = 0;
      for (int a = 0; a < model.dim(); ++a) inf_norm = std::max<std::int64_t>(inf_norm, std::abs(k[a]));
      if (static_cast<double>(inf_norm) > R) s += model.alpha(k) * model.alpha(k);
    }
    return s;
  }
  return shell_tail(model.dim(), R, [&](double m) {
    const double e = model.envelope(m);
    return e * e;
  });
}

SumEstimate total_sum(const CoefficientModel& model, std::int64_t radius) {
  const int d = model.dim();
  if (!(model.beta() > d)) fail(ErrorKind::domain, "total_sum needs beta > d: absolute summability not guaranteed");
  if (radius < 0) fail(ErrorKind::validation, "radius must be non-negative");
  SumEstimate out;
  const IntBox box = IntBox::cube(d, radius);
  CompensatedSum s;
  for (std::size_t idx = 0; idx < box.cell_count(); ++idx) s.add(model.alpha(box.point(idx)));
  out.value = s.value();
  if (model.support_radius() < kInf) {
    if (static_cast<double>(radius) < model.support_radius()) {
      CompensatedSum rest;
      const auto reach = static_cast<std::int64_t>(std::ceil(model.support_radius()));
      const IntBox outer = IntBox::cube(d, reach);
      for (std::size_t idx = 0; idx < outer.cell_count(); ++idx) {
        const IVec k = outer.point(idx);
        if (!box.contains(k)) rest.add(std::abs(model.alpha(k)));
      }
      out.tail_bound = rest.value();
    }
  } else {
    out.tail_bound = shell_tail(d, static_cast<double>(radius), [&](double m) { return model.envelope(m); });
  }
  out.structural_zero = model.kind() == ModelKind::separable_nd || model.is_balanced();
  return out;
}

DependenceClass classify(const CoefficientModel& model) {
  const int d = model.dim();
  const double beta = model.beta();
  if (!(beta > 0.5 * d)) fail(ErrorKind::validation, "beta must exceed d/2");
  DependenceClass c;
  if (beta < d) {
    c.label = RegimeLabel::PSD;
    c.predicted_variance_exponent = 3.0 * d - 2.0 * beta;
    return c;
  }
  const std::int64_t radius = d == 1 ? 100000 : (d == 2 ? 256 : 32);
  const SumEstimate A = total_sum(model, radius);
  const bool zero = A.structural_zero || std::abs(A.value) <= A.tail_bound;
  if (!zero) {
    if (beta == d) {
      double p = 0.0;
      if (model.kind() == ModelKind::isotropic) p = std::get<IsotropicParams>(model.params()).log_power;
      if (!(p < -1.0))
        fail(ErrorKind::domain, "unclassified: integral of t^(d-1) gamma(t) diverges at beta = d");
    }
    c.label = RegimeLabel::SRD;
    c.predicted_variance_exponent = d;
    return c;
  }
  c.requires_A_zero = true;
  const double crit = d + 0.5;
  if (beta < crit) {
    c.label = RegimeLabel::ND_NEE;
    c.predicted_variance_exponent = 3.0 * d - 2.0 * beta;
  } else if (beta == crit) {
    c.label = RegimeLabel::ND_critical;
    c.predicted_variance_exponent = d - 1.0;
  } else {
    if (d < 2) fail(ErrorKind::domain, "unclassified: A = 0 with beta > d + 1/2 needs d >= 2");
    c.label = RegimeLabel::ND_EE;
    c.predicted_variance_exponent = d - 1.0;
  }
  return c;
}

double regular_variation_diagnostic(const CoefficientModel& model, double t, double delta, double R) {
  if (!(delta > 0 && delta < R)) fail(ErrorKind::validation, "shell needs 0 < delta < R");
  if (!(t > 0)) fail(ErrorKind::validation, "t must be positive");
  const int d = model.dim();
  const double b = model.beta() <= d ? 2.0 : 1.0;
  const double g = gamma(model, t).value;
  if (g == 0.0) {
    if (model.g_limit_vanishes()) return 0.0;
    fail(ErrorKind::numerical, "gamma(t) vanishes; rescaled profile undefined");
  }
  const auto& grid = direction_grid(d);
  const double dir_weight = d == 1 ? 1.0 : sphere_area(d) / static_cast<double>(grid.size());
  constexpr int kRadial = 512;
  const double dr = (R - delta) / kRadial;
  std::vector<double> acc(kRadial, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int ir = 0; ir < kRadial; ++ir) {
    const double r = delta + (ir + 0.5) * dr;
    double s = 0.0;
    for (const auto& u : grid) {
      double x[kMaxDim];
      IVec k{};
      for (int a = 0; a < d; ++a) {
        x[a] = r * u[a];
        k[a] = static_cast<std::int64_t>(std::floor(t * x[a]));
      }
      const double gt = model.alpha(k) / g;
      const double gl = model.g_limit(std::span<const double>(x, static_cast<std::size_t>(d)));
      s += std::pow(std::abs(gt - gl), b);
    }
    acc[ir] = s * std::pow(r, d - 1) * dr * dir_weight;
  }
  double total = 0.0;
  for (double v : acc) total += v;
  return total;
}

std::map<IVec, double> read_table_csv(const std::string& text, int dim) {
  std::map<IVec, double> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (lineno == 1 && !cells.empty() && !cells[0].empty() && std::isalpha(static_cast<unsigned char>(cells[0][0])))
      continue;
    if (static_cast<int>(cells.size()) != dim + 1)
      fail(ErrorKind::validation, "table row " + std::to_string(lineno) + " needs d integers and a value");
    IVec k{};
    try {
      for (int a = 0; a < dim; ++a) k[a] = std::stoll(cells[a]);
      out[k] = std::stod(cells[dim]);
    } catch (const std::exception&) {
      fail(ErrorKind::validation, "table row " + std::to_string(lineno) + " is not numeric");
    }
  }
  return out;
}

std::string table_csv(const std::map<IVec, double>& entries, int dim) {
  std::ostringstream os;
  os.precision(17);
  for (int a = 0; a < dim; ++a) os << "i" << (a + 1) << ",";
  os << "alpha\n";
  for (const auto& [k, v] : entries) {
    for (int a = 0; a < dim; ++a) os << k[a] << ",";
    os << v << "\n";
  }
  return os.str();
}

}  // namespace slrd
