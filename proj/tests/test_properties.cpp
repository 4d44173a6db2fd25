// Randomized property checks. Generators are deterministic (fixed seeds) so a
// failure is reproducible from the printed case index.
#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "psd/errors.hpp"
#include "psd/estimator.hpp"
#include "psd/models.hpp"
#include "psd/mp_transform.hpp"
#include "psd/random.hpp"

#include "generators.hpp"

using namespace psd;
using psd::testing::Gen;

namespace {

constexpr int kCases = 60;

}  // namespace

TEST(Property, WassersteinMetricAxioms) {
  Gen g(1);
  for (int i = 0; i < kCases; ++i) {
    const auto a = g.model(), b = g.model(), c = g.model();
    const double ab = wasserstein(a, b), ba = wasserstein(b, a);
    EXPECT_GE(ab, 0.0) << i;
    EXPECT_NEAR(ab, ba, 1e-6) << i;
    EXPECT_LE(wasserstein(a, c), ab + wasserstein(b, c) + 1e-6) << i;
    EXPECT_NEAR(wasserstein(a, a), 0.0, 1e-6) << i;
  }
}

TEST(Property, TotalMassIsOne) {
  Gen g(2);
  for (int i = 0; i < kCases; ++i) {
    const auto m = g.model();
    EXPECT_GE(evaluate_cdf(m, 1e6), 1.0 - 1e-8) << i;
    EXPECT_EQ(evaluate_cdf(m, 0.0), 0.0) << i;
  }
}

TEST(Property, QuantileCdfGeneralizedInverse) {
  Gen g(3);
  for (int i = 0; i < kCases; ++i) {
    const auto m = g.model();
    double prev_q = 0.0;
    for (int j = 1; j < 50; ++j) {
      const double p = j / 50.0;
      const double q = quantile(m, p);
      EXPECT_GE(evaluate_cdf(m, q), p - 1e-9) << i << " p=" << p;
      EXPECT_GE(q, prev_q) << i;
      prev_q = q;
    }
    if (kind_of(m) == ModelKind::Discrete || kind_of(m) == ModelKind::PointMass) continue;
    for (int j = 0; j < 20; ++j) {
      const auto hull = support_hull(m);
      const double x = hull.lo + g.uniform(0.01, 5.0);
      const double cdf = evaluate_cdf(m, x);
      if (cdf <= 0.0 || cdf >= 1.0) continue;
      EXPECT_LE(quantile(m, cdf), x + 1e-8 * std::max(1.0, x)) << i;
    }
  }
}

TEST(Property, CompanionTransformPositiveLeftOfZero) {
  Gen g(4);
  for (int i = 0; i < kCases; ++i) {
    const auto spec = g.spectrum();
    for (int j = 0; j < 10; ++j) {
      const double u = -std::pow(10.0, g.uniform(-6, 4));
      EXPECT_GT(companion_stieltjes(u, spec), 0.0) << i << " u=" << u;
    }
  }
}

TEST(Property, DerivativeMatchesFiniteDifference) {
  Gen g(5);
  int checked = 0;
  for (int i = 0; i < 4 * kCases; ++i) {
    const auto m = g.model();
    const AspectRatio c(g.uniform(0.05, 3.0));
    const double s = g.integer(0, 1) ? g.uniform(0.05, 5.0) : -g.uniform(0.05, 5.0);
    const double h = 1e-6 * std::abs(s);
    double fd, d;
    try {
      MpOptions guard;
      guard.pole_guard = 1e-2;  // stay well away from poles so the difference is meaningful
      mp_u_map(s - h, m, c, guard);
      mp_u_map(s + h, m, c, guard);
      fd = (mp_u_map(s + h, m, c) - mp_u_map(s - h, m, c)) / (2 * h);
      d = mp_u_derivative(s, m, c);
    } catch (const PoleError&) {
      continue;
    }
    EXPECT_NEAR(d, fd, 1e-5 * std::max(std::abs(d), 1e-3)) << i << " s=" << s;
    ++checked;
  }
  EXPECT_GT(checked, kCases);
}

TEST(Property, ReparameterizationLandsInParameterSpace) {
  Gen g(6);
  for (int i = 0; i < 200; ++i) {
    const auto k = static_cast<std::size_t>(g.integer(1, 5));
    std::vector<double> raw(2 * k - 1);
    for (double& r : raw) r = g.uniform(-40, 40);
    const auto h = discrete_from_raw(raw, k);  // throws if outside Theta
    ASSERT_EQ(h.order(), k);
    for (std::size_t j = 0; j + 1 < k; ++j) EXPECT_LT(h.atoms()[j], h.atoms()[j + 1]);
    EXPECT_GT(h.atoms()[0], 0.0);
  }
  for (int i = 0; i < 50; ++i) {
    const auto h = g.discrete();
    const auto back = discrete_from_raw(raw_from_discrete(h), h.order());
    for (std::size_t j = 0; j < h.order(); ++j) {
      EXPECT_NEAR(back.atoms()[j], h.atoms()[j], 1e-10 * h.atoms()[j]);
      EXPECT_NEAR(back.weights()[j], h.weights()[j], 1e-12);
    }
  }
}

TEST(Property, ObjectiveNonnegative) {
  Gen g(7);
  const UNet net({-8, -4, -2, -1, -0.5}, {0.12, 0.2, 0.35, 0.55, 0.8}, {0, 0, 0, 0, 0}, 5);
  for (int i = 0; i < kCases; ++i) {
    const auto m = g.model();
    const AspectRatio c(g.uniform(0.01, 2.0));
    EXPECT_GE(objective(m, net, c), 0.0) << i;
  }
}

TEST(Property, SupportIntervalsOrderedAndDisjoint) {
  Gen g(8);
  for (int i = 0; i < 15; ++i) {
    const auto m = g.discrete();
    const auto rep = support_bounds(m, AspectRatio(g.uniform(0.01, 2.0)));
    ASSERT_FALSE(rep.support.empty());
    for (std::size_t j = 0; j < rep.support.size(); ++j) {
      EXPECT_LE(rep.support[j].lo, rep.support[j].hi);
      if (j + 1 < rep.support.size()) EXPECT_LT(rep.support[j].hi, rep.support[j + 1].lo);
    }
  }
}
