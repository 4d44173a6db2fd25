#include "psd/mp_transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "psd/errors.hpp"

namespace psd {

namespace {

using cplx = std::complex<double>;

// Integrates g against dH for any model. Poles must be excluded by the caller.
template <typename T, typename G>
T integrate_against(const PSDModel& model, G&& g, const quad::Options& qopts) {
  if (const auto* d = std::get_if<DiscretePSD>(&model)) {
    T total{};
    for (std::size_t i = 0; i < d->order(); ++i) total += d->weights()[i] * g(d->atoms()[i]);
    return total;
  }
  if (const auto* pm = std::get_if<PointMassPSD>(&model)) return g(pm->at());
  if (const auto* lag = std::get_if<LaguerrePSD>(&model)) {
    const auto coef = lag->coefficients();
    auto integrand = [&](double t) -> T {
      double poly = 0.0;
      for (std::size_t j = coef.size(); j-- > 0;) poly = poly * t + coef[j];
      return g(t) * (poly * std::exp(-t));
    };
    return quad::integrate_half_line<T>(integrand, 0.0, qopts).value;
  }
  const auto& ic = std::get<InverseCubicPSD>(model);
  // t = Q(1 - w^2) = a + (1 - alpha) / w turns dH into 2 w dw on (0, 1].
  const double a = ic.shift();
  const double scale = 1.0 - ic.alpha();
  auto integrand = [&](double w) -> T {
    if (w <= 0.0) return T{};
    return g(a + scale / w) * (2.0 * w);
  };
  return quad::integrate<T>(integrand, 0.0, 1.0, qopts).value;
}

// Enforces the pole guard for real s: |1 + a s| >= guard for atoms, and -1/s at
// least `guard` away from a continuous support.
void check_pole_guard(double s, const PSDModel& model, double guard) {
  if (s == 0.0 || !std::isfinite(s)) throw DomainError("MP map: s must be finite and nonzero");
  auto check_atom = [&](std::size_t index, double atom) {
    const double dist = std::abs(1.0 + atom * s);
    if (dist < guard) {
      std::ostringstream os;
      os << "MP map: s = " << s << " is within the pole guard of atom " << index << " (a = " << atom
         << ", |1 + a s| = " << dist << ")";
      throw PoleError(os.str(), index, atom, dist);
    }
  };
  if (const auto* d = std::get_if<DiscretePSD>(&model)) {
    for (std::size_t i = 0; i < d->order(); ++i) check_atom(i, d->atoms()[i]);
    return;
  }
  if (const auto* pm = std::get_if<PointMassPSD>(&model)) {
    check_atom(0, pm->at());
    return;
  }
  if (s > 0.0) return;
  const double x = -1.0 / s;
  const double lower = support_hull(model).lo;
  if (x > lower - guard) {
    std::ostringstream os;
    os << "MP map: -1/s = " << x << " lies within the pole guard of the support [" << lower
       << ", inf)";
    throw PoleError(os.str(), 0, x, lower - x);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

AspectRatio::AspectRatio(double c) : c_(c) {
  if (!std::isfinite(c) || c <= 0.0) throw InputError("aspect ratio c = p/n must be positive and finite");
}

SampleSpectrum::SampleSpectrum(std::vector<double> eigenvalues, std::size_t p, std::size_t n)
    : eigenvalues_(std::move(eigenvalues)), p_(p), n_(n) {
  if (p == 0 || n == 0) throw InputError("sample spectrum: p and n must be positive");
  if (eigenvalues_.size() != p) {
    std::ostringstream os;
    os << "sample spectrum: expected p = " << p << " eigenvalues, got " << eigenvalues_.size();
    throw InputError(os.str());
  }
  for (double& l : eigenvalues_) {
    if (!std::isfinite(l)) throw InputError("sample spectrum: non-finite eigenvalue");
    if (l < -1e-10) throw InputError("sample spectrum: negative eigenvalue");
    if (l < 0.0) l = 0.0;
  }
  std::sort(eigenvalues_.begin(), eigenvalues_.end(), std::greater<>());
  if (p > n) {
    const double zero_tol = 1e-8 * std::max(1.0, eigenvalues_.front());
    for (std::size_t i = n; i < p; ++i) {
      if (eigenvalues_[i] > zero_tol) {
        throw InputError("sample spectrum: p > n requires at least p - n zero eigenvalues");
      }
      eigenvalues_[i] = 0.0;
    }
  }
}

double SampleSpectrum::lambda_min_positive() const noexcept {
  for (auto it = eigenvalues_.rbegin(); it != eigenvalues_.rend(); ++it) {
    if (*it > 0.0) return *it;
  }
  return 0.0;
}

double companion_stieltjes(double u, const SampleSpectrum& spectrum) {
  constexpr double kPoleTolerance = 1e-12;
  if (std::abs(u) <= kPoleTolerance) {
    throw PoleError("companion transform: u = 0 is a pole", spectrum.p(), 0.0, std::abs(u));
  }
  const auto& eig = spectrum.eigenvalues();
  const double n = static_cast<double>(spectrum.n());
  double sum = 0.0;
  for (std::size_t l = 0; l < eig.size(); ++l) {
    const double gap = eig[l] - u;
    if (std::abs(gap) <= kPoleTolerance) {
      std::ostringstream os;
      os << "companion transform: u = " << u << " coincides with eigenvalue " << l << " ("
         << eig[l] << ")";
      throw PoleError(os.str(), l, eig[l], std::abs(gap));
    }
    sum += 1.0 / gap;
  }
  const double ratio = static_cast<double>(spectrum.p()) / n;
  return -(1.0 - ratio) / u + sum / n;
}

double mp_u_map(double s, const PSDModel& model, AspectRatio c, const MpOptions& opts) {
  if (c.value() == 0.0) return -1.0 / s;
  check_pole_guard(s, model, opts.pole_guard);
  const double integral = integrate_against<double>(
      model, [s](double t) { return t / (1.0 + t * s); }, opts.quadrature);
  return -1.0 / s + c.value() * integral;
}

double mp_u_derivative(double s, const PSDModel& model, AspectRatio c, const MpOptions& opts) {
  if (c.value() == 0.0) return 1.0 / (s * s);
  check_pole_guard(s, model, opts.pole_guard);
  const double integral = integrate_against<double>(
      model,
      [s](double t) {
        const double r = t / (1.0 + t * s);
        return r * r;
      },
      opts.quadrature);
  return 1.0 / (s * s) - c.value() * integral;
}

std::vector<double> laguerre_basis_integrals(double s, std::size_t q, const quad::Options& opts) {
  if (!(s > 0.0)) throw DomainError("laguerre basis integrals need s > 0");
  std::vector<double> out(q + 1);
  for (std::size_t j = 0; j <= q; ++j) {
    auto integrand = [s, j](double t) {
      double power = t;
      for (std::size_t k = 0; k < j; ++k) power *= t;
      return power * std::exp(-t) / (1.0 + t * s);
    };
    out[j] = quad::integrate_half_line<double>(integrand, 0.0, opts).value;
  }
  return out;
}

std::complex<double> model_transform(std::complex<double> s, const PSDModel& model,
                                     const quad::Options& opts) {
  return integrate_against<cplx>(
      model, [s](double t) { return t / (1.0 + t * s); }, opts);
}

std::complex<double> solve_companion_fixed_point(std::complex<double> z, const PSDModel& model,
                                                 AspectRatio c, const SolverOptions& opts) {
  if (!(z.imag() > 0.0)) throw DomainError("fixed-point solver requires Im z > 0");
  const double cv = c.value();
  auto transform = [&](cplx s) { return model_transform(s, model, opts.quadrature); };
  auto second = [&](cplx s) {
    return integrate_against<cplx>(
        model,
        [s](double t) {
          const cplx r = t / (1.0 + t * s);
          return r * r;
        },
        opts.quadrature);
  };
  auto residual_of = [&](cplx s, cplx g) { return std::abs(z + 1.0 / s - cv * g); };

  // Newton on F(s) = z + 1/s - c G(s) from `start`; returns the root when every
  // iterate stays in the upper half plane and the residual reaches tolerance.
  auto newton = [&](cplx start) -> std::optional<cplx> {
    cplx s = start;
    for (int k = 0; k < 40; ++k) {
      const cplx g = transform(s);
      const cplx f = z + 1.0 / s - cv * g;
      if (std::abs(f) < opts.tolerance) return s;
      const cplx df = -1.0 / (s * s) + cv * second(s);
      if (df == 0.0) return std::nullopt;
      const cplx next = s - f / df;
      if (!(next.imag() > 0.0) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
        return std::nullopt;
      }
      s = next;
    }
    return std::nullopt;
  };

  cplx s = opts.initial.value_or(-1.0 / z);
  if (!(s.imag() > 0.0)) s = -1.0 / z;
  double residual = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const cplx g = transform(s);
    residual = residual_of(s, g);
    if (residual < opts.tolerance) return s;
    if (residual < opts.newton_switch) {
      if (auto root = newton(s)) return *root;
    }
    const cplx mapped = -1.0 / (z - cv * g);
    s = (1.0 - opts.damping) * s + opts.damping * mapped;
  }
  if (opts.newton_switch > 0.0) {
    if (auto root = newton(s)) return *root;
  }
  std::ostringstream os;
  os << "fixed-point solver did not converge at z = " << z << " (residual " << residual << ")";
  throw IterationError(os.str(), residual, opts.max_iterations);
}

std::complex<double> lsd_stieltjes(std::complex<double> z, std::complex<double> companion,
                                   AspectRatio c) {
  const double cv = c.value();
  if (cv == 0.0) throw DomainError("LSD Stieltjes transform undefined at c = 0");
  return (companion + (1.0 - cv) / z) / cv;
}

DensityCurve lsd_density_curve(const PSDModel& model, AspectRatio c, std::span<const double> grid,
                               double eps, const SolverOptions& opts) {
  if (!(eps > 0.0)) throw InputError("density curve: eps must be positive");
  DensityCurve curve;
  curve.x.reserve(grid.size());
  curve.f.reserve(grid.size());
  std::optional<cplx> previous;
  for (double x : grid) {
    if (!(x > 0.0)) throw InputError("density curve: grid points must be positive");
    if (!curve.x.empty() && !(x > curve.x.back())) {
      throw InputError("density curve: grid must be strictly increasing");
    }
    const cplx z(x, eps);
    SolverOptions local = opts;
    cplx s;
    try {
      local.initial = previous;
      s = solve_companion_fixed_point(z, model, c, local);
    } catch (const IterationError&) {
      // Continuation in the imaginary part from a well-conditioned height.
      std::optional<cplx> warm;
      for (double height = std::max(1.0, eps); ; height = std::max(eps, height * 0.1)) {
        local.initial = warm;
        warm = solve_companion_fixed_point(cplx(x, height), model, c, local);
        if (height == eps) break;
      }
      s = *warm;
    }
    previous = s;
    const double density = std::max(0.0, lsd_stieltjes(z, s, c).imag() / std::numbers::pi);
    curve.x.push_back(x);
    curve.f.push_back(density);
  }
  return curve;
}

}  // namespace psd
