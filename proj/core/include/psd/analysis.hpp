#pragma once

// Real-data pipeline: correlation spectrum -> inverse-cubic fit -> curves for
// the empirical KDE, the fitted LSD and the MP (Sigma = I) baseline.

#include <cstddef>

#include "psd/data_io.hpp"
#include "psd/estimator.hpp"

namespace psd {

struct AnalyzeOptions {
  std::size_t spikes = 0;
  double bandwidth = 0.05;
  int l = 20;
  /// Curves are sampled at the cell midpoints of [0, 1.1 lambda_max].
  int grid_points = 400;
  double eps = 1e-6;
};

struct AnalysisResult {
  SampleSpectrum spectrum;
  FitResult fit;
  DensityCurve empirical;
  DensityCurve fitted_lsd;
  DensityCurve mp_baseline;
};

AnalysisResult analyze_returns(const ReturnsMatrix& returns, const AnalyzeOptions& opts = {});

}  // namespace psd
