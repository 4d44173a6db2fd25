#include "psd/analysis.hpp"

namespace psd {

AnalysisResult analyze_returns(const ReturnsMatrix& returns, const AnalyzeOptions& opts) {
  auto spectrum = correlation_spectrum(returns, opts.spikes);
  const auto net = build_unet(spectrum, ModelKind::InverseCubic, opts.l);
  auto fitted = fit_inverse_cubic(spectrum, net);
  const auto grid = midpoint_grid(0.0, 1.1 * spectrum.lambda_max(), opts.grid_points);
  auto empirical = kde_curve(spectrum.eigenvalues(), opts.bandwidth, grid);
  auto lsd = lsd_density_curve(fitted.model, fitted.c_hat, grid, opts.eps);
  auto mp = lsd_density_curve(PointMassPSD(1.0), fitted.c_hat, grid, opts.eps);
  return AnalysisResult{std::move(spectrum), std::move(fitted), std::move(empirical), std::move(lsd), std::move(mp)};
}

}  // namespace psd
