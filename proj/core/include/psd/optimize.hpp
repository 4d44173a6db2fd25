#pragma once

// Small derivative-free minimizers used by the estimators.

#include <functional>
#include <span>
#include <vector>

namespace psd::opt {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  int max_evaluations = 3000;
  /// Stop when the spread of simplex values falls below f_tol (absolute and relative).
  double f_tol = 1e-15;
  /// ... and the simplex diameter below x_tol.
  double x_tol = 1e-10;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& opts = {});

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal function on [lo, hi].
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tolerance = 1e-10);

}  // namespace psd::opt
