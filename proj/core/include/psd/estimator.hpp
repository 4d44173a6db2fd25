#pragma once

// Least-squares estimation of a parametric PSD from sample eigenvalues: pick a
// u-net outside the sample spectrum, evaluate the empirical companion
// transform there, and fit the real-line MP equation u = u(s; theta).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "psd/models.hpp"
#include "psd/mp_transform.hpp"

namespace psd {

/// Ordered evaluation points u_1 < ... < u_m with cached companion transforms
/// s_j = s_n(u_j) and the index of the interval each point was drawn from.
class UNet {
 public:
  /// Points are sorted by u; duplicates are rejected.
  UNet(std::vector<double> u, std::vector<double> s, std::vector<int> interval, int points_per_interval);

  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> s() const noexcept { return s_; }
  std::span<const int> interval() const noexcept { return interval_; }
  std::size_t size() const noexcept { return u_.size(); }
  int points_per_interval() const noexcept { return l_; }

  /// Same points, with the cached transforms replaced.
  UNet with_transforms(std::vector<double> s) const;

 private:
  std::vector<double> u_;
  std::vector<double> s_;
  std::vector<int> interval_;
  int l_;
};

/// Open u-intervals used for the net: (-10, 0) for continuous families; for
/// discrete families also (0, lambda_min/2) when p != n and (5 lambda_max, 10 lambda_max).
std::vector<Interval> unet_intervals(const SampleSpectrum& spectrum, ModelKind family);

/// l interior points a + (b - a) t / (l + 1), t = 1..l, from every interval,
/// with s_n(u) cached. Throws InputError for a discrete family on a spectrum
/// with no positive eigenvalue.
UNet build_unet(const SampleSpectrum& spectrum, ModelKind family, int l);

/// Same u-points with s replaced by the exact limiting transform under `truth`.
UNet with_exact_transforms(const UNet& net, const PSDModel& truth, AspectRatio c);

/// Penalty base returned by objective() when a pole guard is violated.
inline constexpr double kPolePenalty = 1e12;

/// u_j - u(s_j; model) for every point; throws PoleError on guard violations.
std::vector<double> unet_residuals(const PSDModel& model, const UNet& net, AspectRatio c_hat,
                                   const MpOptions& opts = {});

/// phi_n = sum_j (u_j - u(s_j; model))^2. A pole-guard violation yields
/// kPolePenalty + (guard - distance) instead of an exception.
double objective(const PSDModel& model, const UNet& net, AspectRatio c_hat, const MpOptions& opts = {});
double objective(std::span<const double> theta, ModelKind family, const UNet& net, AspectRatio c_hat,
                 const MpOptions& opts = {});

struct FitResult {
  ModelKind family;
  PSDModel model;
  std::vector<double> theta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
  UNet net;
  AspectRatio c_hat;
};

// Unconstrained coordinates for the discrete family: atoms are cumulative sums
// of exponentials, weights a softmax with the last logit fixed at zero.
DiscretePSD discrete_from_raw(std::span<const double> raw, std::size_t k);
std::vector<double> raw_from_discrete(const DiscretePSD& model);

struct DiscreteFitOptions {
  int starts = 8;
  int max_evaluations = 3000;
  std::uint64_t seed = 0x9d5c1f0b;
};

FitResult fit_discrete(const SampleSpectrum& spectrum, std::size_t k, const UNet& net,
                       const DiscreteFitOptions& opts = {});

/// Variant with explicit c_hat; `reference` eigenvalues seed the starting atoms.
FitResult fit_discrete(const UNet& net, AspectRatio c_hat, std::size_t k, std::span<const double> reference,
                       const DiscreteFitOptions& opts = {});

FitResult fit_laguerre(const SampleSpectrum& spectrum, std::size_t q, const UNet& net);
FitResult fit_laguerre(const UNet& net, AspectRatio c_hat, std::size_t q);

FitResult fit_inverse_cubic(const SampleSpectrum& spectrum, const UNet& net);
FitResult fit_inverse_cubic(const UNet& net, AspectRatio c_hat);

/// Dispatches on the family; `order` is k (discrete) or q (Laguerre) and is
/// ignored for the inverse-cubic family.
FitResult fit(const SampleSpectrum& spectrum, ModelKind family, std::size_t order, const UNet& net);

}  // namespace psd
