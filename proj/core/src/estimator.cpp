#include "psd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "psd/errors.hpp"
#include "psd/optimize.hpp"
#include "psd/random.hpp"

namespace psd {

namespace {

constexpr double kEigenvalueClearance = 1e-9;
constexpr double kRawClamp = 30.0;
constexpr double kLogitClamp = 20.0;

double factorial(std::size_t j) {
  double f = 1.0;
  for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
  return f;
}

double sum_of_squares(std::span<const double> r) {
  return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
}

bool lexicographically_smaller(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// UNet

UNet::UNet(std::vector<double> u, std::vector<double> s, std::vector<int> interval, int points_per_interval)
    : l_(points_per_interval) {
  if (u.size() != s.size() || u.size() != interval.size()) {
    throw InputError("u-net: u, s and interval tags must have equal length");
  }
  std::vector<std::size_t> order(u.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  u_.reserve(u.size());
  for (std::size_t idx : order) {
    if (!std::isfinite(u[idx]) || !std::isfinite(s[idx])) throw InputError("u-net: non-finite entry");
    if (!u_.empty() && !(u[idx] > u_.back())) throw InputError("u-net: points must be distinct");
    u_.push_back(u[idx]);
    s_.push_back(s[idx]);
    interval_.push_back(interval[idx]);
  }
}

UNet UNet::with_transforms(std::vector<double> s) const {
  return UNet(u_, std::move(s), interval_, l_);
}

std::vector<Interval> unet_intervals(const SampleSpectrum& spectrum, ModelKind family) {
  std::vector<Interval> out{{-10.0, 0.0}};
  if (family == ModelKind::Laguerre || family == ModelKind::InverseCubic) return out;
  const double lambda_max = spectrum.lambda_max();
  const double lambda_min = spectrum.lambda_min_positive();
  if (!(lambda_max > 0.0) || !(lambda_min > 0.0)) {
    throw InputError("u-net: degenerate spectrum (no positive eigenvalue)");
  }
  if (spectrum.p() != spectrum.n()) out.push_back({0.0, 0.5 * lambda_min});
  out.push_back({5.0 * lambda_max, 10.0 * lambda_max});
  return out;
}

UNet build_unet(const SampleSpectrum& spectrum, ModelKind family, int l) {
  if (l < 1) throw InputError("u-net: l must be at least 1");
  const auto intervals = unet_intervals(spectrum, family);
  std::vector<double> u;
  std::vector<double> s;
  std::vector<int> tags;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const Interval& iv = intervals[k];
    for (int t = 1; t <= l; ++t) {
      const double point = iv.lo + (iv.hi - iv.lo) * t / (l + 1.0);
      for (double lambda : spectrum.eigenvalues()) {
        if (std::abs(lambda - point) < kEigenvalueClearance) {
          throw InputError("u-net: point too close to a sample eigenvalue");
        }
      }
      u.push_back(point);
      s.push_back(companion_stieltjes(point, spectrum));
      tags.push_back(static_cast<int>(k));
    }
  }
  return UNet(std::move(u), std::move(s), std::move(tags), l);
}

UNet with_exact_transforms(const UNet& net, const PSDModel& truth, AspectRatio c) {
  const RealCompanionSolver solver(truth, c);
  std::vector<double> s;
  s.reserve(net.size());
  for (double u : net.u()) s.push_back(solver(u));
  return net.with_transforms(std::move(s));
}

// ---------------------------------------------------------------------------
// Objective

std::vector<double> unet_residuals(const PSDModel& model, const UNet& net, AspectRatio c_hat,
                                   const MpOptions& opts) {
  std::vector<double> r(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) r[j] = net.u()[j] - mp_u_map(net.s()[j], model, c_hat, opts);
  return r;
}

double objective(const PSDModel& model, const UNet& net, AspectRatio c_hat, const MpOptions& opts) {
  try {
    return sum_of_squares(unet_residuals(model, net, c_hat, opts));
  } catch (const PoleError& e) {
    return kPolePenalty + std::max(0.0, opts.pole_guard - e.distance());
  }
}

double objective(std::span<const double> theta, ModelKind family, const UNet& net, AspectRatio c_hat,
                 const MpOptions& opts) {
  return objective(model_from_parameters(family, theta), net, c_hat, opts);
}

// ---------------------------------------------------------------------------
// Discrete family

DiscretePSD discrete_from_raw(std::span<const double> raw, std::size_t k) {
  if (k == 0 || raw.size() != 2 * k - 1) throw InputError("discrete reparameterization: need 2k - 1 values");
  std::vector<double> atoms(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += std::exp(std::clamp(raw[i], -kRawClamp, kRawClamp));
    // a tiny gap can vanish next to a large atom
    if (i > 0 && acc <= atoms[i - 1]) acc = std::nextafter(atoms[i - 1], HUGE_VAL);
    atoms[i] = acc;
  }
  std::vector<double> logits(k, 0.0);
  for (std::size_t i = 0; i + 1 < k; ++i) logits[i] = std::clamp(raw[k + i], -kLogitClamp, kLogitClamp);
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> weights(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    weights[i] = std::exp(logits[i] - top);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return DiscretePSD(std::move(atoms), std::move(weights));
}

std::vector<double> raw_from_discrete(const DiscretePSD& model) {
  const std::size_t k = model.order();
  std::vector<double> raw(2 * k - 1);
  double prev = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    raw[i] = std::log(model.atoms()[i] - prev);
    prev = model.atoms()[i];
  }
  const double last = std::log(model.weights().back());
  for (std::size_t i = 0; i + 1 < k; ++i) raw[k + i] = std::log(model.weights()[i]) - last;
  return raw;
}

FitResult fit_discrete(const SampleSpectrum& spectrum, std::size_t k, const UNet& net,
                       const DiscreteFitOptions& opts) {
  std::vector<double> positive;
  for (double l : spectrum.eigenvalues()) {
    if (l > 0.0) positive.push_back(l);
  }
  if (positive.empty()) throw InputError("fit_discrete: spectrum has no positive eigenvalue");
  return fit_discrete(net, spectrum.ratio(), k, positive, opts);
}

FitResult fit_discrete(const UNet& net, AspectRatio c_hat, std::size_t k, std::span<const double> reference,
                       const DiscreteFitOptions& opts) {
  if (k == 0) throw InputError("fit_discrete: k must be at least 1");
  if (net.size() < 2 * k - 1) {
    std::ostringstream os;
    os << "fit_discrete: u-net has " << net.size() << " points, need at least " << 2 * k - 1;
    throw InputError(os.str());
  }
  if (reference.empty()) throw InputError("fit_discrete: no reference eigenvalues for initialization");
  if (opts.starts < 1) throw InputError("fit_discrete: need at least one start");

  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> base(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    const auto idx = std::min(sorted.size() - 1, static_cast<std::size_t>(prob * static_cast<double>(sorted.size())));
    base[i] = std::max(sorted[idx], 1e-8);
  }

  const opt::Objective phi = [&](std::span<const double> raw) {
    return objective(discrete_from_raw(raw, k), net, c_hat);
  };

  CounterRng rng(opts.seed);
  constexpr double kScales[] = {1.0, 0.5, 2.0};
  bool have_best = false;
  opt::NelderMeadResult best;
  bool any_converged = false;
  int iterations = 0;
  for (int start = 0; start < opts.starts; ++start) {
    std::vector<double> atoms(base);
    const double scale = kScales[start % 3];
    std::vector<double> logits(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      atoms[i] *= scale;
      if (start >= 3) atoms[i] *= std::exp(0.2 * rng.normal());
    }
    if (start >= 3) {
      for (std::size_t i = 0; i + 1 < k; ++i) logits[i] = 0.5 * rng.normal();
    }
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t i = 1; i < k; ++i) atoms[i] = std::max(atoms[i], atoms[i - 1] * (1.0 + 1e-3));

    std::vector<double> raw(2 * k - 1);
    double prev = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      raw[i] = std::log(atoms[i] - prev);
      prev = atoms[i];
    }
    for (std::size_t i = 0; i + 1 < k; ++i) raw[k + i] = logits[i];

    opt::NelderMeadOptions nm;
    nm.max_evaluations = opts.max_evaluations;
    auto run = opt::nelder_mead(phi, raw, nm);
    // One restart from the best vertex guards against a collapsed simplex.
    nm.initial_step = 0.05;
    auto again = opt::nelder_mead(phi, run.x, nm);
    again.iterations += run.iterations;
    iterations += again.iterations;
    any_converged = any_converged || again.converged;
    if (!std::isfinite(again.value) || again.value >= kPolePenalty) continue;

    const auto theta_new = discrete_from_raw(again.x, k).parameters();
    if (!have_best || again.value < best.value ||
        (again.value == best.value &&
         lexicographically_smaller(theta_new, discrete_from_raw(best.x, k).parameters()))) {
      best = std::move(again);
      have_best = true;
    }
  }
  if (!have_best) throw FitError("fit_discrete: every start violated the pole guard");

  DiscretePSD model = discrete_from_raw(best.x, k);
  auto residuals = unet_residuals(model, net, c_hat);
  const double value = sum_of_squares(residuals);
  auto theta = model.parameters();
  return FitResult{ModelKind::Discrete, std::move(model), std::move(theta), value, iterations,
                   any_converged, std::move(residuals), net, c_hat};
}

// ---------------------------------------------------------------------------
// Laguerre family

namespace {

// Coordinate descent for min |X a - y|^2 subject to
// 1 + sum_j a_j (t^j - j!) >= 0 on the validation grid (h >= 0 there).
Eigen::VectorXd constrained_laguerre(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& unconstrained) {
  const Eigen::Index q = X.cols();
  const int grid = LaguerrePSD::kGridPoints;
  Eigen::MatrixXd G(grid, q);  // G(i, j) = t_i^{j+1} - (j+1)!
  for (int i = 0; i < grid; ++i) {
    const double t = LaguerrePSD::kGridStep * i;
    double power = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      power *= t;
      G(i, j) = power - factorial(static_cast<std::size_t>(j + 1));
    }
  }
  // Largest feasible multiple of the unconstrained solution (0 is feasible).
  const Eigen::VectorXd g = G * unconstrained;
  double lambda = 1.0;
  for (int i = 0; i < grid; ++i) {
    if (g(i) < 0.0) lambda = std::min(lambda, -1.0 / g(i));
  }
  Eigen::VectorXd a = lambda * unconstrained;
  Eigen::VectorXd slack = Eigen::VectorXd::Ones(grid) + G * a;
  Eigen::VectorXd r = y - X * a;
  const Eigen::VectorXd col_norm2 = X.colwise().squaredNorm();

  for (int sweep = 0; sweep < 2000; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (col_norm2(j) == 0.0) continue;
      const double target = a(j) + X.col(j).dot(r) / col_norm2(j);
      // Feasible interval for a_j with the other coordinates fixed.
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (int i = 0; i < grid; ++i) {
        const double gij = G(i, j);
        const double rest = slack(i) - gij * a(j);
        if (gij > 0.0) lo = std::max(lo, -rest / gij);
        if (gij < 0.0) hi = std::min(hi, -rest / gij);
      }
      const double next = std::clamp(target, lo, hi);
      const double delta = next - a(j);
      if (delta == 0.0) continue;
      a(j) = next;
      r -= delta * X.col(j);
      slack += delta * G.col(j);
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-13) break;
  }
  return a;
}

}  // namespace

FitResult fit_laguerre(const SampleSpectrum& spectrum, std::size_t q, const UNet& net) {
  return fit_laguerre(net, spectrum.ratio(), q);
}

FitResult fit_laguerre(const UNet& net, AspectRatio c_hat, std::size_t q) {
  if (q == 0) throw InputError("fit_laguerre: q must be at least 1");
  if (net.size() < q) throw InputError("fit_laguerre: u-net smaller than the number of parameters");
  const auto m = static_cast<Eigen::Index>(net.size());
  const auto cols = static_cast<Eigen::Index>(q);
  const double c = c_hat.value();
  Eigen::MatrixXd X(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = net.s()[static_cast<std::size_t>(i)];
    const double u = net.u()[static_cast<std::size_t>(i)];
    if (!(s > 0.0)) throw DomainError("fit_laguerre: needs positive companion transforms (u < 0 nets)");
    const auto J = laguerre_basis_integrals(s, q);
    y(i) = u + 1.0 / s - c * J[0];
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto jj = static_cast<std::size_t>(j + 1);
      X(i, j) = c * (J[jj] - factorial(jj) * J[0]);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < cols) {
    std::ostringstream os;
    os << "fit_laguerre: design matrix has rank " << qr.rank() << " < q = " << q
       << "; use a larger or more spread-out u-net";
    throw RankError(os.str(), qr.rank());
  }
  Eigen::VectorXd alpha = qr.solve(y);
  std::vector<double> theta(alpha.data(), alpha.data() + alpha.size());
  bool constrained = false;
  if (LaguerrePSD::min_density_on_grid(theta) < -LaguerrePSD::kPositivityTolerance) {
    alpha = constrained_laguerre(X, y, alpha);
    theta.assign(alpha.data(), alpha.data() + alpha.size());
    constrained = true;
  }
  const Eigen::VectorXd r = y - X * alpha;
  std::vector<double> residuals(r.data(), r.data() + r.size());
  const double value = sum_of_squares(residuals);
  return FitResult{ModelKind::Laguerre, LaguerrePSD(theta), theta, value, constrained ? 1 : 0, true,
                   std::move(residuals), net, c_hat};
}

// ---------------------------------------------------------------------------
// Inverse-cubic family

FitResult fit_inverse_cubic(const SampleSpectrum& spectrum, const UNet& net) {
  return fit_inverse_cubic(net, spectrum.ratio());
}

FitResult fit_inverse_cubic(const UNet& net, AspectRatio c_hat) {
  constexpr int kCoarse = 200;
  constexpr double kUpper = 1.0 - 1e-6;
  auto phi = [&](double alpha) { return objective(InverseCubicPSD(std::clamp(alpha, 0.0, kUpper)), net, c_hat); };
  std::vector<double> values(kCoarse);
  std::size_t best = 0;
  for (int i = 0; i < kCoarse; ++i) {
    values[static_cast<std::size_t>(i)] = phi(kUpper * i / (kCoarse - 1.0));
    if (values[static_cast<std::size_t>(i)] < values[best]) best = static_cast<std::size_t>(i);
  }
  const double lo = kUpper * static_cast<double>(best == 0 ? 0 : best - 1) / (kCoarse - 1.0);
  const double hi = kUpper * static_cast<double>(std::min<std::size_t>(best + 1, kCoarse - 1)) / (kCoarse - 1.0);
  const auto refined = opt::golden_section(phi, lo, hi, 1e-10);
  double alpha = kUpper * static_cast<double>(best) / (kCoarse - 1.0);
  if (refined.value <= values[best]) alpha = refined.x;

  InverseCubicPSD model(alpha);
  auto residuals = unet_residuals(model, net, c_hat);
  const double value = sum_of_squares(residuals);
  return FitResult{ModelKind::InverseCubic, model, {alpha}, value, kCoarse + refined.evaluations, true,
                   std::move(residuals), net, c_hat};
}

FitResult fit(const SampleSpectrum& spectrum, ModelKind family, std::size_t order, const UNet& net) {
  switch (family) {
    case ModelKind::Discrete: return fit_discrete(spectrum, order, net);
    case ModelKind::Laguerre: return fit_laguerre(spectrum, order, net);
    case ModelKind::InverseCubic: return fit_inverse_cubic(spectrum, net);
    case ModelKind::PointMass: return fit_discrete(spectrum, 1, net);
  }
  throw InputError("fit: unknown family");
}

}  // namespace psd
