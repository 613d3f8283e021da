#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>
#include <omp.h>

#include "slrd/theta.hpp"
#include "theta_internal.hpp"

namespace slrd {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_fftw_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_real(n)), size(n) {
    if (!data) fail(ErrorKind::numerical, "FFT buffer allocation failed");
    std::fill(data, data + n, 0.0);
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
  std::size_t size;
};

struct Plan {
  Plan(int rank, const int* n, double* buf, bool forward) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    init_fftw_threads();
    fftw_plan_with_nthreads(omp_get_max_threads());
    auto* c = reinterpret_cast<fftw_complex*>(buf);
    plan = forward ? fftw_plan_dft_r2c(rank, n, buf, c, FFTW_ESTIMATE)
                   : fftw_plan_dft_c2r(rank, n, c, buf, FFTW_ESTIMATE);
    if (!plan) fail(ErrorKind::numerical, "FFT planning failed");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void run() const { fftw_execute(plan); }
  fftw_plan plan;
};

double direct_value(const CoefficientModel& model, const SiteSet& sites, const IVec& i) {
  double acc = 0.0;
  for (const auto& j : sites.sites) {
    IVec k{};
    for (int a = 0; a < sites.dim; ++a) k[a] = j[a] - i[a];
    acc += model.alpha(k);
  }
  return acc;
}

}  // namespace

std::size_t next_smooth_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

ThetaField theta_fft(const CoefficientModel& model, const SiteSet& sites, const IntBox& window,
                     const FftOptions& options) {
  detail::check_theta_inputs(model, sites, window);
  const int d = window.dim;
  const IntBox& s = sites.bounding_window;
  IntBox k_box;
  k_box.dim = d;
  int n[kMaxDim];
  std::size_t need[kMaxDim];
  for (int a = 0; a < d; ++a) {
    k_box.lo[a] = s.lo[a] - window.hi[a];
    k_box.hi[a] = s.hi[a] - window.lo[a];
    need[a] = static_cast<std::size_t>(k_box.extent(a));
    const std::size_t m = options.size[a] ? options.size[a] : next_smooth_size(need[a]);
    if (options.enforce_padding && m < need[a])
      fail(ErrorKind::validation, "insufficient FFT padding: circular wrap-around would alias the window");
    n[a] = static_cast<int>(m);
  }
  // Real arrays in FFTW in-place layout: last axis padded to 2 (n/2 + 1).
  const std::size_t last_padded = 2 * (static_cast<std::size_t>(n[d - 1]) / 2 + 1);
  std::size_t rows = 1;
  for (int a = 0; a < d - 1; ++a) rows *= static_cast<std::size_t>(n[a]);
  const std::size_t total = rows * last_padded;
  auto flat = [&](const std::array<std::int64_t, kMaxDim>& m) {
    std::size_t r = 0;
    for (int a = 0; a < d - 1; ++a) r = r * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(m[a]);
    return r * last_padded + static_cast<std::size_t>(m[d - 1]);
  };
  auto wrap = [&](std::int64_t v, int a) {
    const auto m = static_cast<std::int64_t>(n[a]);
    v %= m;
    return v < 0 ? v + m : v;
  };

  bool aliased = false;
  for (int a = 0; a < d; ++a) aliased = aliased || static_cast<std::size_t>(n[a]) < need[a];
  FftwBuffer A(total), D(total);
  {
    const std::size_t kn = k_box.cell_count();
#pragma omp parallel for schedule(static) if (!aliased)
    for (std::size_t idx = 0; idx < kn; ++idx) {
      const IVec k = k_box.point(idx);
      std::array<std::int64_t, kMaxDim> m{};
      for (int a = 0; a < d; ++a) m[a] = wrap(k[a] - k_box.lo[a], a);
      A.data[flat(m)] += model.alpha(k);
    }
  }
  for (const auto& j : sites.sites) {
    std::array<std::int64_t, kMaxDim> m{};
    for (int a = 0; a < d; ++a) m[a] = wrap(j[a] - s.lo[a], a);
    D.data[flat(m)] += 1.0;
  }
  {
    Plan pa(d, n, A.data, true);
    Plan pd(d, n, D.data, true);
    pa.run();
    pd.run();
  }
  double scale = 1.0;
  for (int a = 0; a < d; ++a) scale *= n[a];
  const std::size_t ncomplex = total / 2;
  auto* ac = reinterpret_cast<std::complex<double>*>(A.data);
  auto* dc = reinterpret_cast<std::complex<double>*>(D.data);
#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < ncomplex; ++idx) dc[idx] *= std::conj(ac[idx]) / scale;
  {
    Plan pi(d, n, D.data, false);
    pi.run();
  }

  ThetaField f = detail::make_theta_field(model, sites, window);
  const std::size_t wn = window.cell_count();
#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < wn; ++idx) {
    const IVec i = window.point(idx);
    std::array<std::int64_t, kMaxDim> m{};
    for (int a = 0; a < d; ++a) m[a] = wrap(i[a] - window.hi[a], a);
    f.values[idx] = D.data[flat(m)];
  }

  // Wrap-around sentinel: compare against direct sums at the window corners and centre.
  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  IVec centre{};
  for (int a = 0; a < d; ++a) centre[a] = window.lo[a] + (window.hi[a] - window.lo[a]) / 2;
  for (const IVec& probe : {window.lo, window.hi, centre}) {
    const double exact = direct_value(model, sites, probe);
    const double got = f.values[window.index(probe)];
    if (std::abs(got - exact) > 1e-9 * std::max(peak, std::abs(exact)) + 1e-300)
      fail(ErrorKind::numerical, "FFT wrap-around sentinel mismatch: padding too small");
  }
  return f;
}

}  // namespace slrd
