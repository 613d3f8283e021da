#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <queue>
#include <span>
#include <vector>

namespace slrd {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct QuadTolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7, 15) over consecutive breakpoints.
template <class F>
QuadResult integrate(F&& f, std::span<const double> points, QuadTolerance tol = {}) {
  std::priority_queue<detail::Segment> heap;
  double value = 0.0, error = 0.0;
  int evals = 0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (!(points[k + 1] > points[k])) continue;
    auto s = detail::gk15(f, points[k], points[k + 1]);
    evals += 15;
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  int intervals = static_cast<int>(heap.size());
  while (!heap.empty() && error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (intervals >= tol.max_intervals) return {value, error, evals, false};
    const auto s = heap.top();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) return {value, error, evals, false};
    heap.pop();
    const auto l = detail::gk15(f, s.a, m);
    const auto r = detail::gk15(f, m, s.b);
    evals += 30;
    value += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // Recompute totals to drop drift from the running updates.
  value = 0.0;
  error = 0.0;
  std::vector<detail::Segment> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& s : all) {
    value += s.value;
    error += s.error;
  }
  return {value, error, evals, true};
}

template <class F>
QuadResult integrate(F&& f, double a, double b, QuadTolerance tol = {}) {
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts, 2), tol);
}

}  // namespace slrd
