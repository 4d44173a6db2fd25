#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psd {

/// Samples (x_i, f(x_i)) of a spectral density; abscissas strictly increasing,
/// ordinates nonnegative.
struct DensityCurve {
  std::vector<double> x;
  std::vector<double> f;

  /// Trapezoid-rule integral over the sampled range.
  double trapezoid() const;
};

/// Checks the DensityCurve invariants, throwing InputError on violation.
void validate(const DensityCurve& curve);

/// Trapezoid integral of |a - b|; both curves must share the same abscissas.
double l1_distance(const DensityCurve& a, const DensityCurve& b);

/// CSV with header "x,f".
void write_csv(std::ostream& out, const DensityCurve& curve);
void write_csv(const std::string& path, const DensityCurve& curve);

/// `count` cell midpoints of [lo, hi]: lo + (hi - lo) (i - 1/2) / count.
std::vector<double> midpoint_grid(double lo, double hi, int count);

/// Parses "lo:hi:count" into midpoint_grid(lo, hi, count).
std::vector<double> parse_grid(const std::string& spec);

}  // namespace psd
