#include "psd/density_curve.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "psd/errors.hpp"

namespace psd {

double DensityCurve::trapezoid() const {
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return total;
}

void validate(const DensityCurve& curve) {
  if (curve.x.size() != curve.f.size()) throw InputError("density curve: x and f differ in length");
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    if (i > 0 && !(curve.x[i] > curve.x[i - 1])) {
      throw InputError("density curve: abscissas must be strictly increasing");
    }
    if (!(curve.f[i] >= 0.0)) throw InputError("density curve: ordinates must be nonnegative");
  }
}

double l1_distance(const DensityCurve& a, const DensityCurve& b) {
  if (a.x != b.x) throw InputError("l1_distance: curves must share abscissas");
  double total = 0.0;
  for (std::size_t i = 1; i < a.x.size(); ++i) {
    const double d0 = std::abs(a.f[i - 1] - b.f[i - 1]);
    const double d1 = std::abs(a.f[i] - b.f[i]);
    total += 0.5 * (d0 + d1) * (a.x[i] - a.x[i - 1]);
  }
  return total;
}

void write_csv(std::ostream& out, const DensityCurve& curve) {
  out << "x,f\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < curve.x.size(); ++i) out << curve.x[i] << ',' << curve.f[i] << '\n';
}

void write_csv(const std::string& path, const DensityCurve& curve) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_csv(out, curve);
}

std::vector<double> midpoint_grid(double lo, double hi, int count) {
  if (count < 1 || !(hi > lo)) throw InputError("grid: need hi > lo and at least one point");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / count;
  return grid;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::istringstream in(spec);
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  char sep1 = 0;
  char sep2 = 0;
  if (!(in >> lo >> sep1 >> hi >> sep2 >> count) || sep1 != ':' || sep2 != ':' || !in.eof()) {
    throw InputError("grid spec must look like lo:hi:count, got '" + spec + "'");
  }
  return midpoint_grid(lo, hi, count);
}

}  // namespace psd
