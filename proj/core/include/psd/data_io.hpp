#pragma once

// Real-data ingestion: asset returns -> correlation spectrum (with spike
// removal) and Gaussian kernel density smoothing of eigenvalues.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "psd/density_curve.hpp"
#include "psd/mp_transform.hpp"

namespace psd {

/// T x N returns (rows are trading days, columns are assets) without gaps.
struct ReturnsMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
};

struct LoadedReturns {
  ReturnsMatrix returns;
  /// Labels of columns dropped because they contained missing cells.
  std::vector<std::string> dropped;
};

/// Header row of labels, numeric body; empty cells mark missing data and any
/// column containing one is dropped. Throws InputError on unreadable files,
/// non-numeric cells, ragged rows, T < 2 or fewer than 2 surviving columns.
LoadedReturns load_returns_csv(const std::string& path);
LoadedReturns parse_returns_csv(std::istream& in);

/// Eigenvalues of the sample correlation matrix with the `spikes` largest
/// removed; p = N - spikes, n = T - 1.
SampleSpectrum correlation_spectrum(const ReturnsMatrix& returns, std::size_t spikes);

/// f(x) = (1 / (N h)) sum_i phi((x - lambda_i) / h).
DensityCurve kde_curve(std::span<const double> eigenvalues, double bandwidth, std::span<const double> grid);

/// One eigenvalue per line, optional non-numeric header line.
std::vector<double> read_eigenvalues_csv(const std::string& path);

}  // namespace psd
