#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "psd/errors.hpp"
#include "psd/mp_transform.hpp"

namespace psd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// An open pole-free interval of the s axis. `lo`/`hi` may be -inf, 0, +inf or
// a pole -1/t for t in the support of H.
struct Piece {
  double lo;
  double hi;
};

std::vector<Piece> pole_free_pieces(const PSDModel& model) {
  std::vector<Piece> pieces;
  std::vector<double> poles;
  if (const auto* d = std::get_if<DiscretePSD>(&model)) {
    for (double a : d->atoms()) poles.push_back(-1.0 / a);
  } else if (const auto* pm = std::get_if<PointMassPSD>(&model)) {
    poles.push_back(-1.0 / pm->at());
  }
  if (!poles.empty()) {
    std::sort(poles.begin(), poles.end());
    pieces.push_back({-kInf, poles.front()});
    for (std::size_t i = 0; i + 1 < poles.size(); ++i) pieces.push_back({poles[i], poles[i + 1]});
    pieces.push_back({poles.back(), 0.0});
  } else if (const auto* ic = std::get_if<InverseCubicPSD>(&model); ic != nullptr && ic->alpha() > 0.0) {
    pieces.push_back({-kInf, -1.0 / ic->alpha()});
  }
  pieces.push_back({0.0, kInf});
  return pieces;
}

// Log-clustered ramp on (0, 1): `count` points, denser toward both ends.
std::vector<double> clustered_unit(int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const int half = count / 2;
  const double lo_exp = -10.0;
  const double hi_exp = std::log10(0.5);
  for (int i = 0; i < half; ++i) {
    const double e = lo_exp + (hi_exp - lo_exp) * i / std::max(1, half - 1);
    out.push_back(std::pow(10.0, e));
  }
  for (int i = count - half - 1; i >= 0; --i) {
    const double e = lo_exp + (hi_exp - lo_exp) * i / std::max(1, count - half - 1);
    const double v = 1.0 - std::pow(10.0, e);
    if (v > out.back()) out.push_back(v);
  }
  return out;
}

std::vector<double> piece_grid(const Piece& piece, int count) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  if (std::isinf(piece.lo) || std::isinf(piece.hi)) {
    // Semi-infinite: log-spaced offsets from the finite end over 20 decades.
    const double anchor = std::isinf(piece.lo) ? piece.hi : piece.lo;
    const double scale = anchor == 0.0 ? 1.0 : std::abs(anchor);
    for (int i = 0; i < count; ++i) {
      const double e = -10.0 + 20.0 * i / (count - 1);
      const double offset = scale * std::pow(10.0, e);
      grid.push_back(std::isinf(piece.lo) ? anchor - offset : anchor + offset);
    }
    if (std::isinf(piece.lo)) std::reverse(grid.begin(), grid.end());
    return grid;
  }
  for (double r : clustered_unit(count)) grid.push_back(piece.lo + (piece.hi - piece.lo) * r);
  return grid;
}

// du/ds, with points inside the pole guard reported as NaN.
double safe_derivative(double s, const PSDModel& model, AspectRatio c, const MpOptions& opts) {
  try {
    return mp_u_derivative(s, model, c, opts);
  } catch (const PoleError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

bool positive(double v) { return v > 0.0; }

double refine_sign_change(double a, double b, double fa, double fb, const PSDModel& model,
                          AspectRatio c, const MpOptions& opts) {
  // Reject cells hiding more than one crossing.
  int changes = 0;
  double prev = fa;
  for (int k = 1; k <= 4; ++k) {
    const double v = k == 4 ? fb : safe_derivative(a + (b - a) * k / 4.0, model, c, opts);
    if (positive(v) != positive(prev)) ++changes;
    prev = v;
  }
  if (changes != 1) {
    std::ostringstream os;
    os << "support scan: " << changes << " sign changes of du/ds inside cell [" << a << ", " << b
       << "]; refine the scan grid";
    throw RefinementError(os.str());
  }
  auto f = [&](double s) { return mp_u_derivative(s, model, c, opts); };
  std::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
  return 0.5 * (lo + hi);
}

double u_at_end(double s, bool from_right, const PSDModel& model, AspectRatio c, const MpOptions& opts) {
  if (std::isinf(s)) return 0.0;
  if (s == 0.0) return from_right ? -kInf : kInf;
  return mp_u_map(s, model, c, opts);
}

}  // namespace

SupportReport support_bounds(const PSDModel& model, AspectRatio c, const SupportOptions& opts) {
  if (opts.grid_points < 16) throw InputError("support scan needs at least 16 grid points");
  SupportReport report;
  report.mass_at_zero = c.value() > 1.0;
  for (const Piece& piece : pole_free_pieces(model)) {
    const auto grid = piece_grid(piece, opts.grid_points);
    std::vector<double> deriv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) deriv[i] = safe_derivative(grid[i], model, c, opts.mp);
    std::size_t i = 0;
    while (i < grid.size()) {
      if (!positive(deriv[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < grid.size() && positive(deriv[j + 1])) ++j;
      double s_lo = piece.lo;
      if (i > 0) {
        s_lo = std::isnan(deriv[i - 1]) ? grid[i]
                                        : refine_sign_change(grid[i - 1], grid[i], deriv[i - 1], deriv[i],
                                                             model, c, opts.mp);
      }
      double s_hi = piece.hi;
      if (j + 1 < grid.size()) {
        s_hi = std::isnan(deriv[j + 1]) ? grid[j]
                                        : refine_sign_change(grid[j], grid[j + 1], deriv[j], deriv[j + 1],
                                                             model, c, opts.mp);
      }
      report.b_plus.push_back({s_lo, s_hi});
      report.complement.push_back({u_at_end(s_lo, true, model, c, opts.mp),
                                   u_at_end(s_hi, false, model, c, opts.mp)});
      i = j + 1;
    }
  }

  std::vector<Interval> gaps;
  for (const Interval& g : report.complement) {
    const double lo = std::max(g.lo, 0.0);
    if (g.hi > lo) gaps.push_back({lo, g.hi});
  }
  std::sort(gaps.begin(), gaps.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double start = 0.0;
  for (const Interval& g : gaps) {
    if (g.lo > start) report.support.push_back({start, g.lo});
    start = std::max(start, g.hi);
  }
  if (start < kInf) report.support.push_back({start, kInf});
  return report;
}

RealCompanionSolver::RealCompanionSolver(PSDModel model, AspectRatio c, const SupportOptions& opts)
    : model_(std::move(model)), c_(c), opts_(opts), report_(support_bounds(model_, c_, opts_)) {}

double RealCompanionSolver::operator()(double u) const {
  for (std::size_t k = 0; k < report_.b_plus.size(); ++k) {
    const Interval& image = report_.complement[k];
    if (!(u > image.lo && u < image.hi)) continue;
    const Interval& b = report_.b_plus[k];
    auto f = [&](double s) { return mp_u_map(s, model_, c_, opts_.mp) - u; };

    // Bracket [a, z] inside B+ with f(a) < 0 < f(z), stepping toward open ends
    // (0 or +-inf) where u runs off to -inf / +inf or to its limit 0.
    const bool lo_open = std::isinf(b.lo) || b.lo == 0.0;
    const bool hi_open = std::isinf(b.hi) || b.hi == 0.0;
    double a = b.lo;
    if (lo_open) {
      a = hi_open ? 1.0 : b.hi;
      for (int it = 0; it < 2000 && f(a) >= 0.0; ++it) a = b.lo == 0.0 ? a * 0.5 : a * 2.0;
    }
    double z = b.hi;
    if (hi_open) {
      z = lo_open ? 1.0 : b.lo;
      for (int it = 0; it < 2000 && f(z) <= 0.0; ++it) z = b.hi == 0.0 ? z * 0.5 : z * 2.0;
    }
    const double fa = f(a);
    const double fz = f(z);
    if (!(fa < 0.0 && fz > 0.0)) {
      if (fa == 0.0) return a;
      if (fz == 0.0) return z;
      throw NumericalError("real companion solver: failed to bracket the root");
    }
    std::uintmax_t max_iter = 300;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [lo, hi] = boost::math::tools::toms748_solve(f, a, z, fa, fz, tol, max_iter);
    return 0.5 * (lo + hi);
  }
  std::ostringstream os;
  os << "real companion solver: u = " << u << " is not in the support complement";
  throw DomainError(os.str());
}

}  // namespace psd
