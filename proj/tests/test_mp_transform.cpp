#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "psd/errors.hpp"
#include "psd/mp_transform.hpp"
#include "psd/simulation.hpp"

using namespace psd;

namespace {

double mp_density(double x, double c) {
  const double a = (1 - std::sqrt(c)) * (1 - std::sqrt(c));
  const double b = (1 + std::sqrt(c)) * (1 + std::sqrt(c));
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2 * std::numbers::pi * c * x);
}

// du/ds for an atomic H written out directly.
double discrete_du(double s, const std::vector<double>& a, const std::vector<double>& m, double c) {
  double acc = 1.0 / (s * s);
  for (std::size_t i = 0; i < a.size(); ++i) acc -= c * m[i] * a[i] * a[i] / ((1 + a[i] * s) * (1 + a[i] * s));
  return acc;
}

// Number of support intervals of the LSD for an atomic H with c < 1: one less
// than the number of runs with du/ds > 0 on s < 0, found by a plain uniform scan
// between consecutive poles.
int support_count_by_scan(const std::vector<double>& a, const std::vector<double>& m, double c) {
  std::vector<double> poles;
  for (double t : a) poles.push_back(-1.0 / t);
  std::sort(poles.begin(), poles.end());
  std::vector<std::pair<double, double>> pieces;
  pieces.emplace_back(-1e4, poles.front());
  for (std::size_t i = 0; i + 1 < poles.size(); ++i) pieces.emplace_back(poles[i], poles[i + 1]);
  pieces.emplace_back(poles.back(), 0.0);
  int runs = 0;
  for (auto [lo, hi] : pieces) {
    const int n = 200000;
    bool prev = false;
    for (int i = 1; i < n; ++i) {
      const double s = lo + (hi - lo) * i / n;
      const bool pos = discrete_du(s, a, m, c) > 0;
      if (pos && !prev) ++runs;
      prev = pos;
    }
  }
  return runs - 1;
}

}  // namespace

TEST(CompanionStieltjes, HandOracles) {
  const SampleSpectrum spec({1, 2}, 2, 4);
  EXPECT_NEAR(companion_stieltjes(-1.0, spec), 0.5 + 0.25 * (0.5 + 1.0 / 3.0), 1e-12);
  EXPECT_NEAR(companion_stieltjes(-1.0, spec), 0.708333333333, 1e-12);
  EXPECT_NEAR(companion_stieltjes(-1.0, SampleSpectrum({1}, 1, 1)), 0.5, 1e-15);
  EXPECT_LT(std::abs(companion_stieltjes(-1e9, spec)), 1e-8);
}

TEST(CompanionStieltjes, PoleErrors) {
  const SampleSpectrum spec({1, 2}, 2, 4);
  EXPECT_THROW(companion_stieltjes(0.0, spec), PoleError);
  try {
    companion_stieltjes(2.0 + 1e-13, spec);
    FAIL();
  } catch (const PoleError& e) {
    EXPECT_DOUBLE_EQ(e.location(), 2.0);
  }
  EXPECT_NO_THROW(companion_stieltjes(1.5, spec));
}

TEST(SampleSpectrum, OrderingClampingAndZeros) {
  const SampleSpectrum spec({1, 3, -1e-12, 2}, 4, 10);
  EXPECT_EQ(spec.eigenvalues(), (std::vector<double>{3, 2, 1, 0}));
  EXPECT_DOUBLE_EQ(spec.lambda_min_positive(), 1.0);
  EXPECT_THROW(SampleSpectrum({1, -0.1}, 2, 4), InputError);
  EXPECT_THROW(SampleSpectrum({1, 2}, 3, 4), InputError);
  // p > n needs p - n (numerical) zeros
  const SampleSpectrum wide({2, 1, 1e-14, 0}, 4, 2);
  EXPECT_EQ(std::count(wide.eigenvalues().begin(), wide.eigenvalues().end(), 0.0), 2);
  EXPECT_THROW(SampleSpectrum({3, 2, 1, 0}, 4, 2), InputError);
  EXPECT_THROW(AspectRatio(0.0), InputError);
  EXPECT_THROW(AspectRatio(-1.0), InputError);
}

TEST(MpUMap, ClosedForms) {
  const PointMassPSD h(1.0);
  EXPECT_NEAR(mp_u_map(1.0, h, AspectRatio(0.25)), -0.875, 1e-15);
  EXPECT_NEAR(mp_u_derivative(1.0, h, AspectRatio(0.25)), 0.9375, 1e-15);
  for (double s : {-3.0, -0.2, 0.7, 4.0}) {
    EXPECT_DOUBLE_EQ(mp_u_map(s, DiscretePSD({1, 2}, {0.5, 0.5}), AspectRatio::zero_limit()), -1.0 / s);
    EXPECT_DOUBLE_EQ(mp_u_derivative(s, InverseCubicPSD(0.5), AspectRatio::zero_limit()), 1.0 / (s * s));
  }
}

TEST(MpUMap, ExponentialIntegralOracle) {
  // alpha_1 = 0 leaves alpha_0 = 1: h(t) = e^{-t}
  const LaguerrePSD h({0.0});
  const double e1 = boost::math::expint(1, 1.0);
  EXPECT_NEAR(e1, 0.219384, 1e-6);
  const double oracle = -1.0 + (1.0 - std::numbers::e * e1);
  EXPECT_NEAR(oracle, -0.59635, 1e-5);
  EXPECT_NEAR(mp_u_map(1.0, h, AspectRatio(1.0)), oracle, 1e-12);
}

TEST(MpUMap, LaguerreBasisIntegralsClosedForm) {
  // J_0(s) = int t e^{-t} / (1 + t s) dt = (1 - e^{1/s} E1(1/s) / s) / s
  for (double s : {0.1, 1.0, 3.0, 50.0}) {
    const double x = 1.0 / s;
    const double j0 = (1.0 - x * std::exp(x) * boost::math::expint(1, x)) / s;
    const auto j = laguerre_basis_integrals(s, 2);
    ASSERT_EQ(j.size(), 3u);
    EXPECT_NEAR(j[0], j0, 1e-12 * std::max(1.0, j0));
    // t^{j+1} / (1 + ts) = t^j / s - t^j / (s (1 + ts)), so J_{j} = (j! - J_{j-1}) / s
    EXPECT_NEAR(j[1], (1.0 - j[0]) / s, 1e-11);
    EXPECT_NEAR(j[2], (2.0 - j[1]) / s, 1e-11);
  }
}

TEST(MpUMap, PoleGuards) {
  const DiscretePSD h({1, 2}, {0.5, 0.5});
  EXPECT_THROW(mp_u_map(-0.5, h, AspectRatio(0.5)), PoleError);
  EXPECT_THROW(mp_u_map(-1.0 + 1e-8, h, AspectRatio(0.5)), PoleError);
  EXPECT_THROW(mp_u_map(0.0, h, AspectRatio(0.5)), InputError);
  EXPECT_THROW(mp_u_map(-0.5, LaguerrePSD({1.0}), AspectRatio(0.5)), PoleError);
  // -1/s = 0.4 is left of the inverse cubic support [0.5, inf)
  EXPECT_NO_THROW(mp_u_map(-2.5, InverseCubicPSD(0.5), AspectRatio(0.5)));
  EXPECT_THROW(mp_u_map(-1.0, InverseCubicPSD(0.5), AspectRatio(0.5)), PoleError);
}

TEST(MpUDerivative, MatchesCentralDifference) {
  const std::vector<std::pair<PSDModel, std::vector<double>>> cases{
      {DiscretePSD({2, 7, 10}, {0.3, 0.4, 0.3}), {-2.0, -0.3, -0.05, 0.5, 3.0}},
      {LaguerrePSD({1.0 / 9, 1.0 / 9, 1.0 / 9}), {0.05, 0.5, 2.0, 10.0}},
      {InverseCubicPSD(0.5), {-2.5, 0.2, 1.0, 6.0}},
      {PointMassPSD(1.0), {-3.0, 0.4, 2.0}},
  };
  const AspectRatio c(0.3);
  for (const auto& [model, points] : cases) {
    for (double s : points) {
      const double h = 1e-6 * std::max(1.0, std::abs(s)) * (std::abs(s) < 0.1 ? 0.1 : 1.0);
      const double fd = (mp_u_map(s + h, model, c) - mp_u_map(s - h, model, c)) / (2 * h);
      const double d = mp_u_derivative(s, model, c);
      EXPECT_NEAR(d, fd, 1e-5 * std::abs(d)) << to_string(kind_of(model)) << " s=" << s;
    }
  }
}

TEST(FixedPoint, QuadraticOracle) {
  const auto s = solve_companion_fixed_point({-1.0, 1e-9}, PointMassPSD(1.0), AspectRatio(0.5));
  // s^2 + 0.5 s - 1 = 0
  const double root = (-0.5 + std::sqrt(0.25 + 4.0)) / 2.0;
  EXPECT_NEAR(root, 0.780776, 1e-6);
  EXPECT_NEAR(s.real(), root, 1e-8);
  EXPECT_GT(s.imag(), 0.0);
  EXPECT_LT(s.imag(), 1e-8);
}

TEST(FixedPoint, MpDensityAtOne) {
  const AspectRatio c(0.25);
  const std::complex<double> z{1.0, 1e-6};
  const auto sc = solve_companion_fixed_point(z, PointMassPSD(1.0), c);
  const double f = lsd_stieltjes(z, sc, c).imag() / std::numbers::pi;
  EXPECT_NEAR(mp_density(1.0, 0.25), 0.61646, 1e-4);
  EXPECT_NEAR(f, mp_density(1.0, 0.25), 1e-4);
}

TEST(FixedPoint, ResidualAndOffSupportLimit) {
  const DiscretePSD h({2, 7, 10}, {0.3, 0.4, 0.3});
  const AspectRatio c(0.1);
  for (std::complex<double> z : {std::complex<double>{3.0, 0.01}, {8.0, 1e-4}, {-20.0, 1e-6}}) {
    const auto s = solve_companion_fixed_point(z, h, c);
    const auto rhs = -1.0 / s + c.value() * model_transform(s, h);
    EXPECT_LT(std::abs(z - rhs), 1e-10);
    EXPECT_GT(s.imag(), 0.0);
  }
  const auto far = solve_companion_fixed_point({-50.0, 1e-9}, h, c);
  EXPECT_LT(far.imag(), 1e-9);
  EXPECT_THROW(solve_companion_fixed_point({1.0, 0.0}, h, c), InputError);
}

TEST(FixedPoint, IterationBudgetError) {
  SolverOptions opts;
  opts.max_iterations = 1;
  opts.newton_switch = 0.0;
  EXPECT_THROW(solve_companion_fixed_point({1.0, 1e-6}, PointMassPSD(1.0), AspectRatio(0.25), opts), IterationError);
}

TEST(DensityCurve, MatchesMarcenkoPastur) {
  const AspectRatio c(0.25);
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(0.25 + 2.0 * i / 51.0);
  const auto curve = lsd_density_curve(PointMassPSD(1.0), c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(curve.f[i], mp_density(grid[i], 0.25), 1e-3) << grid[i];

  const auto wide = lsd_density_curve(PointMassPSD(1.0), c, midpoint_grid(0.2, 2.3, 1000));
  EXPECT_NEAR(wide.trapezoid(), 1.0, 0.01);
  const auto left = lsd_density_curve(PointMassPSD(1.0), c, std::vector<double>{0.05, 0.1});
  EXPECT_LT(left.f[0], 1e-4);
  EXPECT_LT(left.f[1], 1e-4);
}

TEST(DensityCurve, NormalizationWithMassAtZero) {
  struct Case {
    PSDModel model;
    double c;
    double hi;
  };
  const std::vector<Case> cases{{PointMassPSD(1.0), 4.0, 10.0},
                                {DiscretePSD({1, 3}, {0.5, 0.5}), 0.2, 6.0},
                                {InverseCubicPSD(0.5), 0.5, 12.0}};
  for (const auto& cs : cases) {
    const auto curve = lsd_density_curve(cs.model, AspectRatio(cs.c), midpoint_grid(0.0, cs.hi, 3000));
    const double atom = std::max(0.0, 1.0 - 1.0 / cs.c);
    EXPECT_NEAR(curve.trapezoid() + atom, 1.0, 1e-2) << cs.c;
  }
  EXPECT_THROW(lsd_density_curve(PointMassPSD(1.0), AspectRatio(0.5), std::vector<double>{-1.0}), InputError);
}

TEST(Support, MarcenkoPasturBulk) {
  const auto rep = support_bounds(PointMassPSD(1.0), AspectRatio(0.25));
  ASSERT_EQ(rep.support.size(), 1u);
  EXPECT_NEAR(rep.support[0].lo, 0.25, 1e-3);
  EXPECT_NEAR(rep.support[0].hi, 2.25, 1e-3);
  EXPECT_FALSE(rep.mass_at_zero);
}

TEST(Support, AboveOneAspectRatio) {
  const auto rep = support_bounds(PointMassPSD(1.0), AspectRatio(4.0));
  ASSERT_EQ(rep.support.size(), 1u);
  EXPECT_NEAR(rep.support[0].lo, 1.0, 1e-3);
  EXPECT_NEAR(rep.support[0].hi, 9.0, 1e-3);
  EXPECT_TRUE(rep.mass_at_zero);
}

TEST(Support, ThreeAtomModelAgreesWithScanOracle) {
  const std::vector<double> a{2, 7, 10}, m{0.3, 0.4, 0.3};
  const int oracle = support_count_by_scan(a, m, 0.1);
  EXPECT_EQ(oracle, 2);
  const auto rep = support_bounds(DiscretePSD(a, m), AspectRatio(0.1));
  EXPECT_EQ(static_cast<int>(rep.support.size()), oracle);
  for (std::size_t i = 0; i + 1 < rep.support.size(); ++i) EXPECT_LT(rep.support[i].hi, rep.support[i + 1].lo);
  // at smaller c every atom gets its own interval
  EXPECT_EQ(support_count_by_scan(a, m, 0.01), 3);
  EXPECT_EQ(support_bounds(DiscretePSD(a, m), AspectRatio(0.01)).support.size(), 3u);
}

TEST(Support, ComplementImagesAreMonotone) {
  const DiscretePSD h({2, 7, 10}, {0.3, 0.4, 0.3});
  const AspectRatio c(0.1);
  const auto rep = support_bounds(h, c);
  ASSERT_EQ(rep.b_plus.size(), rep.complement.size());
  for (const auto& iv : rep.b_plus) {
    const double lo = std::isinf(iv.lo) ? iv.hi - 50.0 : iv.lo;
    const double hi = std::isinf(iv.hi) ? iv.lo + 50.0 : iv.hi;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 100; ++i) {
      const double s = lo + (hi - lo) * i / 100.0;
      const double u = mp_u_map(s, h, c);
      EXPECT_GT(u, prev);
      EXPECT_GT(mp_u_derivative(s, h, c), 0.0);
      prev = u;
    }
  }
}

TEST(Support, RealRootAgreesWithComplexSolver) {
  const DiscretePSD h({2, 7, 10}, {0.3, 0.4, 0.3});
  const AspectRatio c(0.1);
  const RealCompanionSolver real(h, c);
  for (double u : {-5.0, -1.0, -0.1, 0.5, 20.0}) {
    const double s = real(u);
    EXPECT_NEAR(mp_u_map(s, h, c), u, 1e-10);
    const auto z = solve_companion_fixed_point({u, 1e-9}, h, c);
    EXPECT_NEAR(z.real(), s, 1e-6) << u;
  }
  EXPECT_THROW(real(5.0), InputError);
}

TEST(Support, ContinuousModels) {
  const auto gamma = support_bounds(LaguerrePSD({1.0}), AspectRatio(0.5));
  ASSERT_EQ(gamma.support.size(), 1u);
  EXPECT_TRUE(std::isinf(gamma.support[0].hi));
  const auto ic = support_bounds(InverseCubicPSD(0.5), AspectRatio(0.2));
  ASSERT_EQ(ic.support.size(), 1u);
  EXPECT_GT(ic.support[0].lo, 0.0);
  EXPECT_LT(ic.support[0].lo, 0.5);
}

TEST(EmpiricalConvergence, CompanionTransformMedianErrorDecreases) {
  const double truth = (-0.5 + std::sqrt(4.25)) / 2.0;
  std::vector<double> medians;
  for (std::size_t n : {100u, 400u, 1600u}) {
    const std::size_t p = n / 2;
    const std::vector<double> pop(p, 1.0);
    std::vector<double> errs;
    for (int r = 0; r < 50; ++r) {
      const auto spec = sample_spectrum(pop, n, 1000 + r);
      errs.push_back(std::abs(companion_stieltjes(-1.0, spec) - truth));
    }
    std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
    medians.push_back(errs[25]);
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}
