#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for real- and complex-valued
// integrands on finite intervals, with a half-line wrapper.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace psd::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_subdivisions = 400;
};

template <typename T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <typename T>
struct Segment {
  double lo;
  double hi;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename T, typename F>
Segment<T> kronrod15(F&& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  T f_center = f(center);
  T kronrod = f_center * kKronrodWeights[7];
  T gauss = f_center * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T pair = f(center - dx) + f(center + dx);
    kronrod += pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss += pair * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [lo, hi] by global adaptive bisection of the segment with
/// the largest Kronrod-Gauss error estimate.
template <typename T, typename F>
Result<T> integrate(F&& f, double lo, double hi, const Options& opts = {}) {
  using Segment = detail::Segment<T>;
  std::priority_queue<Segment> heap;
  Segment first = detail::kronrod15<T>(f, lo, hi);
  T total = first.value;
  double total_error = first.error;
  heap.push(first);
  int evaluations = 15;
  for (int split = 0; split < opts.max_subdivisions; ++split) {
    if (total_error <= std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total))) {
      return {total, total_error, evaluations, true};
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push(worst);
      break;
    }
    Segment left = detail::kronrod15<T>(f, worst.lo, mid);
    Segment right = detail::kronrod15<T>(f, mid, worst.hi);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation from the running totals.
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, evaluations,
          err <= std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(sum))};
}

/// Integrates f over [lo, inf) through t = lo + x / (1 - x), x in [0, 1).
template <typename T, typename F>
Result<T> integrate_half_line(F&& f, double lo, const Options& opts = {}) {
  auto mapped = [&](double x) -> T {
    const double one_minus = 1.0 - x;
    if (one_minus <= 0.0) return T{};
    const double t = lo + x / one_minus;
    const T v = f(t);
    return v * (1.0 / (one_minus * one_minus));
  };
  return integrate<T>(mapped, 0.0, 1.0, opts);
}

}  // namespace psd::quad
