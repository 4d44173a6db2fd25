#pragma once

// Parametric population spectral distributions (PSDs): discrete atoms, the
// finite Laguerre expansion, the inverse-cubic density and the point mass.
// Every model is an immutable probability distribution on (0, inf).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace psd {

enum class ModelKind { Discrete, Laguerre, InverseCubic, PointMass };

std::string_view to_string(ModelKind kind);
/// Accepts "discrete", "laguerre", "inverse_cubic", "point_mass".
ModelKind parse_model_kind(std::string_view name);

/// H = sum_i m_i delta_{a_i}, with 0 < a_1 < ... < a_k and weights on the simplex.
class DiscretePSD {
 public:
  DiscretePSD(std::vector<double> atoms, std::vector<double> weights);

  /// Builds from theta = (a_1, ..., a_k, m_1, ..., m_{k-1}); m_k = 1 - sum m_i.
  static DiscretePSD from_parameters(std::span<const double> theta);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t order() const noexcept { return atoms_.size(); }

  /// theta = (a_1, ..., a_k, m_1, ..., m_{k-1}).
  std::vector<double> parameters() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// h(t) = sum_{j=0}^q alpha_j t^j e^{-t} with alpha_0 = 1 - sum_{j>=1} j! alpha_j.
/// Only alpha_1..alpha_q are stored as free parameters.
class LaguerrePSD {
 public:
  /// Validation grid for positivity of the density: t = 0, 0.01, ..., 50.
  static constexpr double kGridStep = 0.01;
  static constexpr int kGridPoints = 5001;
  /// Largest admissible dip of h below zero on the validation grid.
  static constexpr double kPositivityTolerance = 1e-6;

  explicit LaguerrePSD(std::vector<double> alphas);

  std::size_t degree() const noexcept { return alphas_.size(); }
  /// alpha_1..alpha_q.
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double alpha0() const noexcept { return alpha0_; }
  /// alpha_0..alpha_q.
  std::vector<double> coefficients() const;

  double density(double t) const;
  double cdf(double x) const;

  /// Minimum of h(t | alphas) over the validation grid.
  static double min_density_on_grid(std::span<const double> alphas);
  static bool admissible(std::span<const double> alphas);

 private:
  std::vector<double> alphas_;
  double alpha0_;
};

/// h(t) = c / (t - a)^3 on t >= alpha, a = 2 alpha - 1, c = 2 (1 - alpha)^2.
/// Mean 1 for every alpha; tends to delta_1 as alpha -> 1.
class InverseCubicPSD {
 public:
  explicit InverseCubicPSD(double alpha);

  double alpha() const noexcept { return alpha_; }
  double shift() const noexcept { return 2.0 * alpha_ - 1.0; }
  double normalizer() const noexcept { return 2.0 * (1.0 - alpha_) * (1.0 - alpha_); }

  double density(double t) const;
  double cdf(double x) const;
  double quantile(double prob) const;

 private:
  double alpha_;
};

class PointMassPSD {
 public:
  explicit PointMassPSD(double at);
  double at() const noexcept { return at_; }

 private:
  double at_;
};

using PSDModel = std::variant<DiscretePSD, LaguerrePSD, InverseCubicPSD, PointMassPSD>;

ModelKind kind_of(const PSDModel& model);

/// Number of free parameters of the model as an element of its family.
std::size_t parameter_count(const PSDModel& model);

/// Free parameter vector (theta) of the model.
std::vector<double> parameters_of(const PSDModel& model);

/// Inverse of parameters_of for a given family. Discrete: (a, m_1..m_{k-1});
/// Laguerre: (alpha_1..alpha_q); InverseCubic: (alpha); PointMass: (at).
PSDModel model_from_parameters(ModelKind kind, std::span<const double> theta);

/// Total function: nondecreasing, right-continuous, limits 0 and 1.
double evaluate_cdf(const PSDModel& model, double x);

/// Generalized inverse inf{x : CDF(x) >= prob}. Throws DomainError unless 0 < prob < 1.
double quantile(const PSDModel& model, double prob);

/// Quantiles at increasing probabilities; faster than repeated quantile() for
/// continuous families.
std::vector<double> quantiles(const PSDModel& model, std::span<const double> sorted_probs);

/// Mean of the distribution (closed form).
double mean(const PSDModel& model);

/// Lower and upper ends of the support (upper may be +inf).
struct SupportHull {
  double lo;
  double hi;
};
SupportHull support_hull(const PSDModel& model);

struct WassersteinOptions {
  /// Midpoint-rule grid size over prob in (0, 1), used unless both models are atomic.
  int grid_points = 10000;
};

/// W1 distance: integral over (0, 1) of |Q_a(t) - Q_b(t)|. Exact for atomic pairs.
double wasserstein(const PSDModel& a, const PSDModel& b, const WassersteinOptions& opts = {});

}  // namespace psd
