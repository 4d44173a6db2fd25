#include "psd/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "psd/errors.hpp"

namespace psd {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kQuantileTolerance = 1e-10;

double factorial(std::size_t j) {
  double f = 1.0;
  for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
  return f;
}

// Regularized lower incomplete gamma P(j + 1, x) for integer shape.
double gamma_p_int(std::size_t j, double x) {
  if (x <= 0.0) return 0.0;
  const double shape = static_cast<double>(j + 1);
  if (x < shape) {
    // e^{-x} sum_{k > j} x^k / k!
    double term = std::exp(-x);
    for (std::size_t k = 1; k <= j + 1; ++k) term *= x / static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t k = j + 1; k < j + 400; ++k) {
      sum += term;
      if (term < 1e-17 * sum) break;
      term *= x / static_cast<double>(k + 1);
    }
    return std::min(sum, 1.0);
  }
  // 1 - e^{-x} sum_{k <= j} x^k / k!
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 1; k <= j; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
  }
  return std::max(0.0, 1.0 - std::exp(-x) * sum);
}

void require_probability(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    std::ostringstream os;
    os << "quantile: probability " << prob << " outside (0, 1)";
    throw DomainError(os.str());
  }
}

struct Atomic {
  std::vector<double> atoms;
  std::vector<double> weights;
};

const Atomic* as_atomic(const PSDModel& model, Atomic& storage) {
  if (const auto* d = std::get_if<DiscretePSD>(&model)) {
    storage = {d->atoms(), d->weights()};
    return &storage;
  }
  if (const auto* pm = std::get_if<PointMassPSD>(&model)) {
    storage = {{pm->at()}, {1.0}};
    return &storage;
  }
  return nullptr;
}

// Merged-breakpoint integration of |Q_a - Q_b| for two step quantile functions.
double wasserstein_atomic(const Atomic& a, const Atomic& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  double cum_a = a.weights[0];
  double cum_b = b.weights[0];
  double prev = 0.0;
  double total = 0.0;
  while (true) {
    const double next = std::min(cum_a, cum_b);
    total += (next - prev) * std::abs(a.atoms[i] - b.atoms[j]);
    prev = next;
    const bool last_a = i + 1 == a.atoms.size();
    const bool last_b = j + 1 == b.atoms.size();
    if (last_a && last_b) break;
    if (!last_a && (cum_a <= cum_b || last_b)) {
      ++i;
      cum_a += a.weights[i];
    } else {
      ++j;
      cum_b += b.weights[j];
    }
  }
  // Rounding may leave the final cumulative slightly short of 1.
  total += std::max(0.0, 1.0 - prev) * std::abs(a.atoms.back() - b.atoms.back());
  return total;
}

double laguerre_quantile_from(const LaguerrePSD& m, double prob, double lo) {
  double hi = std::max(1.0, 2.0 * lo);
  while (m.cdf(hi) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) break;
  }
  // Newton steps safeguarded by the bracket [lo, hi].
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > kQuantileTolerance; ++it) {
    const double f = m.cdf(x) - prob;
    if (f >= 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = m.density(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 0.25 * kQuantileTolerance) {
      // Converged by Newton; settle the bracket around the root.
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Discrete: return "discrete";
    case ModelKind::Laguerre: return "laguerre";
    case ModelKind::InverseCubic: return "inverse_cubic";
    case ModelKind::PointMass: return "point_mass";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "discrete") return ModelKind::Discrete;
  if (name == "laguerre") return ModelKind::Laguerre;
  if (name == "inverse_cubic") return ModelKind::InverseCubic;
  if (name == "point_mass") return ModelKind::PointMass;
  throw InputError("unknown model kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// DiscretePSD

DiscretePSD::DiscretePSD(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) {
    throw InputError("discrete PSD: need equally many atoms and weights (at least one)");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!std::isfinite(atoms_[i]) || atoms_[i] <= 0.0) {
      throw InputError("discrete PSD: atoms must be finite and positive");
    }
    if (i > 0 && !(atoms_[i] > atoms_[i - 1])) {
      throw InputError("discrete PSD: atoms must be strictly increasing");
    }
    if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
      throw InputError("discrete PSD: weights must be positive");
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os << "discrete PSD: weights sum to " << total << ", not 1";
    throw InputError(os.str());
  }
}

DiscretePSD DiscretePSD::from_parameters(std::span<const double> theta) {
  if (theta.empty() || theta.size() % 2 == 0) {
    throw InputError("discrete PSD: parameter vector must have odd length 2k - 1");
  }
  const std::size_t k = (theta.size() + 1) / 2;
  std::vector<double> atoms(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<double> weights(theta.begin() + static_cast<std::ptrdiff_t>(k), theta.end());
  const double partial = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights.push_back(1.0 - partial);
  return DiscretePSD(std::move(atoms), std::move(weights));
}

std::vector<double> DiscretePSD::parameters() const {
  std::vector<double> theta(atoms_);
  theta.insert(theta.end(), weights_.begin(), weights_.end() - 1);
  return theta;
}

// ---------------------------------------------------------------------------
// LaguerrePSD

LaguerrePSD::LaguerrePSD(std::vector<double> alphas) : alphas_(std::move(alphas)), alpha0_(1.0) {
  if (alphas_.empty()) throw InputError("laguerre PSD: degree q must be at least 1");
  for (std::size_t j = 0; j < alphas_.size(); ++j) {
    if (!std::isfinite(alphas_[j])) throw InputError("laguerre PSD: coefficients must be finite");
    alpha0_ -= factorial(j + 1) * alphas_[j];
  }
  if (!admissible(alphas_)) {
    throw InputError("laguerre PSD: density is negative on the validation grid");
  }
}

std::vector<double> LaguerrePSD::coefficients() const {
  std::vector<double> all{alpha0_};
  all.insert(all.end(), alphas_.begin(), alphas_.end());
  return all;
}

double LaguerrePSD::density(double t) const {
  if (t < 0.0) return 0.0;
  double poly = 0.0;
  for (std::size_t j = alphas_.size(); j-- > 0;) poly = (poly + alphas_[j]) * t;
  return (poly + alpha0_) * std::exp(-t);
}

double LaguerrePSD::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  double total = alpha0_ * gamma_p_int(0, x);
  for (std::size_t j = 0; j < alphas_.size(); ++j) {
    total += alphas_[j] * factorial(j + 1) * gamma_p_int(j + 1, x);
  }
  return std::clamp(total, 0.0, 1.0);
}

double LaguerrePSD::min_density_on_grid(std::span<const double> alphas) {
  double alpha0 = 1.0;
  for (std::size_t j = 0; j < alphas.size(); ++j) alpha0 -= factorial(j + 1) * alphas[j];
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = kGridStep * i;
    double poly = 0.0;
    for (std::size_t j = alphas.size(); j-- > 0;) poly = (poly + alphas[j]) * t;
    lowest = std::min(lowest, (poly + alpha0) * std::exp(-t));
  }
  return lowest;
}

bool LaguerrePSD::admissible(std::span<const double> alphas) {
  return min_density_on_grid(alphas) >= -kPositivityTolerance;
}

// ---------------------------------------------------------------------------
// InverseCubicPSD / PointMassPSD

InverseCubicPSD::InverseCubicPSD(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InputError("inverse-cubic PSD: alpha must lie in [0, 1)");
  }
}

double InverseCubicPSD::density(double t) const {
  if (t < alpha_) return 0.0;
  const double d = t - shift();
  return normalizer() / (d * d * d);
}

double InverseCubicPSD::cdf(double x) const {
  if (x < alpha_) return 0.0;
  const double r = (1.0 - alpha_) / (x - shift());
  return 1.0 - r * r;
}

double InverseCubicPSD::quantile(double prob) const {
  require_probability(prob);
  return shift() + (1.0 - alpha_) / std::sqrt(1.0 - prob);
}

PointMassPSD::PointMassPSD(double at) : at_(at) {
  if (!std::isfinite(at) || at <= 0.0) throw InputError("point mass: location must be positive");
}

// ---------------------------------------------------------------------------
// Family-generic operations

ModelKind kind_of(const PSDModel& model) {
  return static_cast<ModelKind>(model.index());
}

std::size_t parameter_count(const PSDModel& model) {
  return parameters_of(model).size();
}

std::vector<double> parameters_of(const PSDModel& model) {
  struct Visitor {
    std::vector<double> operator()(const DiscretePSD& m) const { return m.parameters(); }
    std::vector<double> operator()(const LaguerrePSD& m) const { return m.alphas(); }
    std::vector<double> operator()(const InverseCubicPSD& m) const { return {m.alpha()}; }
    std::vector<double> operator()(const PointMassPSD& m) const { return {m.at()}; }
  };
  return std::visit(Visitor{}, model);
}

PSDModel model_from_parameters(ModelKind kind, std::span<const double> theta) {
  switch (kind) {
    case ModelKind::Discrete:
      return DiscretePSD::from_parameters(theta);
    case ModelKind::Laguerre:
      return LaguerrePSD(std::vector<double>(theta.begin(), theta.end()));
    case ModelKind::InverseCubic:
      if (theta.size() != 1) throw InputError("inverse-cubic PSD takes exactly one parameter");
      return InverseCubicPSD(theta[0]);
    case ModelKind::PointMass:
      if (theta.size() != 1) throw InputError("point mass takes exactly one parameter");
      return PointMassPSD(theta[0]);
  }
  throw InputError("unknown model kind");
}

double evaluate_cdf(const PSDModel& model, double x) {
  struct Visitor {
    double x;
    double operator()(const DiscretePSD& m) const {
      double total = 0.0;
      for (std::size_t i = 0; i < m.order() && m.atoms()[i] <= x; ++i) total += m.weights()[i];
      return std::min(total, 1.0);
    }
    double operator()(const LaguerrePSD& m) const { return m.cdf(x); }
    double operator()(const InverseCubicPSD& m) const { return m.cdf(x); }
    double operator()(const PointMassPSD& m) const { return x >= m.at() ? 1.0 : 0.0; }
  };
  return std::visit(Visitor{x}, model);
}

double quantile(const PSDModel& model, double prob) {
  require_probability(prob);
  struct Visitor {
    double prob;
    double operator()(const DiscretePSD& m) const {
      double cum = 0.0;
      for (std::size_t i = 0; i < m.order(); ++i) {
        cum += m.weights()[i];
        if (cum >= prob) return m.atoms()[i];
      }
      return m.atoms().back();
    }
    double operator()(const LaguerrePSD& m) const { return laguerre_quantile_from(m, prob, 0.0); }
    double operator()(const InverseCubicPSD& m) const { return m.quantile(prob); }
    double operator()(const PointMassPSD& m) const { return m.at(); }
  };
  return std::visit(Visitor{prob}, model);
}

std::vector<double> quantiles(const PSDModel& model, std::span<const double> sorted_probs) {
  std::vector<double> out;
  out.reserve(sorted_probs.size());
  if (const auto* lag = std::get_if<LaguerrePSD>(&model)) {
    double lo = 0.0;
    for (double p : sorted_probs) {
      require_probability(p);
      const double q = laguerre_quantile_from(*lag, p, lo);
      out.push_back(q);
      lo = std::max(0.0, q - 1e-9);
    }
    return out;
  }
  for (double p : sorted_probs) out.push_back(quantile(model, p));
  return out;
}

double mean(const PSDModel& model) {
  struct Visitor {
    double operator()(const DiscretePSD& m) const {
      return std::inner_product(m.atoms().begin(), m.atoms().end(), m.weights().begin(), 0.0);
    }
    double operator()(const LaguerrePSD& m) const {
      // int t^{j+1} e^{-t} dt = (j+1)!
      const auto coef = m.coefficients();
      double total = 0.0;
      for (std::size_t j = 0; j < coef.size(); ++j) total += coef[j] * factorial(j + 1);
      return total;
    }
    double operator()(const InverseCubicPSD&) const { return 1.0; }
    double operator()(const PointMassPSD& m) const { return m.at(); }
  };
  return std::visit(Visitor{}, model);
}

SupportHull support_hull(const PSDModel& model) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  struct Visitor {
    SupportHull operator()(const DiscretePSD& m) const { return {m.atoms().front(), m.atoms().back()}; }
    SupportHull operator()(const LaguerrePSD&) const { return {0.0, inf}; }
    SupportHull operator()(const InverseCubicPSD& m) const { return {m.alpha(), inf}; }
    SupportHull operator()(const PointMassPSD& m) const { return {m.at(), m.at()}; }
  };
  return std::visit(Visitor{}, model);
}

double wasserstein(const PSDModel& a, const PSDModel& b, const WassersteinOptions& opts) {
  Atomic sa;
  Atomic sb;
  const Atomic* da = as_atomic(a, sa);
  const Atomic* db = as_atomic(b, sb);
  if (da != nullptr && db != nullptr) return wasserstein_atomic(*da, *db);

  if (opts.grid_points < 1) throw InputError("wasserstein: grid must have at least one point");
  const auto n = static_cast<std::size_t>(opts.grid_points);
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) probs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  const auto qa = quantiles(a, probs);
  const auto qb = quantiles(b, probs);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::abs(qa[i] - qb[i]);
  return total / static_cast<double>(n);
}

}  // namespace psd
