#pragma once

// Marcenko-Pastur machinery: the empirical companion Stieltjes transform on
// the real line, the model-side map u(s), the complex fixed-point solver for
// the limiting spectral distribution (LSD), and spectral support detection.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "psd/density_curve.hpp"
#include "psd/models.hpp"
#include "psd/quadrature.hpp"

namespace psd {

/// Dimension ratio c = p / n.
class AspectRatio {
 public:
  explicit AspectRatio(double c);
  /// The c -> 0 limit, where the MP equation reduces to u = -1/s. Test use only.
  static AspectRatio zero_limit() noexcept { return AspectRatio(); }
  double value() const noexcept { return c_; }

 private:
  AspectRatio() = default;
  double c_ = 0.0;
};

/// Eigenvalues of a p x p sample covariance matrix built from n observations,
/// stored in descending order. For p > n the trailing p - n entries are exact zeros.
class SampleSpectrum {
 public:
  /// Negative entries down to -1e-10 are clamped to zero. When p > n the p - n
  /// smallest entries must be numerically zero (relative to the largest
  /// eigenvalue) and are set to exactly zero.
  SampleSpectrum(std::vector<double> eigenvalues, std::size_t p, std::size_t n);

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  std::size_t p() const noexcept { return p_; }
  std::size_t n() const noexcept { return n_; }
  AspectRatio ratio() const { return AspectRatio(static_cast<double>(p_) / static_cast<double>(n_)); }

  double lambda_max() const noexcept { return eigenvalues_.front(); }
  /// Smallest strictly positive eigenvalue; 0 if there is none.
  double lambda_min_positive() const noexcept;

 private:
  std::vector<double> eigenvalues_;
  std::size_t p_;
  std::size_t n_;
};

/// s_n(u) = -(1 - p/n)/u + (1/n) sum_l 1/(lambda_l - u). Throws PoleError when u
/// is within 1e-12 of 0 or of an eigenvalue.
double companion_stieltjes(double u, const SampleSpectrum& spectrum);

struct MpOptions {
  /// Minimum |1 + a s| (atoms) or distance of -1/s from a continuous support.
  double pole_guard = 1e-6;
  quad::Options quadrature{};
};

/// u(s) = -1/s + c int t / (1 + t s) dH(t), for real s != 0.
double mp_u_map(double s, const PSDModel& model, AspectRatio c, const MpOptions& opts = {});

/// du/ds = 1/s^2 - c int t^2 / (1 + t s)^2 dH(t).
double mp_u_derivative(double s, const PSDModel& model, AspectRatio c, const MpOptions& opts = {});

/// J_j(s) = int_0^inf t^{j+1} e^{-t} / (1 + t s) dt for j = 0..q, s > 0.
std::vector<double> laguerre_basis_integrals(double s, std::size_t q, const quad::Options& opts = {});

/// int t / (1 + t s) dH(t) for complex s off the poles.
std::complex<double> model_transform(std::complex<double> s, const PSDModel& model,
                                     const quad::Options& opts = {});

struct SolverOptions {
  double damping = 0.5;
  int max_iterations = 2000;
  double tolerance = 1e-10;
  /// Switch to Newton steps once the residual drops below this value; 0 disables Newton.
  double newton_switch = 1e-2;
  std::optional<std::complex<double>> initial{};
  quad::Options quadrature{};
};

/// Companion Stieltjes transform s(z), Im s > 0, of the LSD at Im z > 0.
/// Damped fixed-point iteration s <- -1/(z - c int t/(1+ts) dH) with Newton
/// polishing; the result satisfies |z + 1/s - c int ...| < tolerance.
std::complex<double> solve_companion_fixed_point(std::complex<double> z, const PSDModel& model,
                                                 AspectRatio c, const SolverOptions& opts = {});

/// Stieltjes transform of the LSD F itself, recovered from the companion one.
std::complex<double> lsd_stieltjes(std::complex<double> z, std::complex<double> companion,
                                   AspectRatio c);

/// f(x) = Im s(x + i eps) / pi on the grid (grid points must be positive).
DensityCurve lsd_density_curve(const PSDModel& model, AspectRatio c, std::span<const double> grid,
                               double eps = 1e-6, const SolverOptions& opts = {});

struct Interval {
  double lo;
  double hi;
};

struct SupportReport {
  /// Closed intervals of the LSD support on (0, inf); hi may be +inf.
  std::vector<Interval> support;
  /// Open intervals of B+ in the s variable (ends may be 0 or +-inf).
  std::vector<Interval> b_plus;
  /// u-images of the B+ intervals: open intervals of the support complement.
  std::vector<Interval> complement;
  /// Set when c > 1: the LSD has an atom of mass 1 - 1/c at zero.
  bool mass_at_zero = false;
};

struct SupportOptions {
  int grid_points = 4000;
  MpOptions mp{};
};

SupportReport support_bounds(const PSDModel& model, AspectRatio c, const SupportOptions& opts = {});

/// Real companion transform s(u) for u in the support complement: the unique
/// root of mp_u_map(s) = u inside B+. Root-finding is bracketed on the B+
/// interval whose image contains u.
class RealCompanionSolver {
 public:
  RealCompanionSolver(PSDModel model, AspectRatio c, const SupportOptions& opts = {});

  double operator()(double u) const;
  const SupportReport& report() const noexcept { return report_; }

 private:
  PSDModel model_;
  AspectRatio c_;
  SupportOptions opts_;
  SupportReport report_;
};

}  // namespace psd
