#include "psd/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "psd/errors.hpp"

namespace psd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& text, double& value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

LoadedReturns parse_returns_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw InputError("returns CSV: empty file");
  const auto labels = split_row(line);
  const std::size_t cols = labels.size();

  std::vector<std::vector<double>> rows;
  std::vector<bool> missing(cols, false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != cols) {
      std::ostringstream os;
      os << "returns CSV: line " << line_no << " has " << cells.size() << " cells, expected " << cols;
      throw InputError(os.str());
    }
    std::vector<double> row(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (cells[j].empty()) {
        missing[j] = true;
        continue;
      }
      if (!parse_double(cells[j], row[j])) {
        std::ostringstream os;
        os << "returns CSV: non-numeric cell '" << cells[j] << "' at line " << line_no << ", column "
           << labels[j];
        throw InputError(os.str());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw InputError("returns CSV: need at least 2 rows of returns");

  LoadedReturns out;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < cols; ++j) {
    if (missing[j]) {
      out.dropped.push_back(labels[j]);
    } else {
      kept.push_back(j);
      out.returns.labels.push_back(labels[j]);
    }
  }
  if (kept.size() < 2) throw InputError("returns CSV: fewer than 2 complete columns");
  out.returns.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < kept.size(); ++k) {
      out.returns.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][kept[k]];
    }
  }
  return out;
}

LoadedReturns load_returns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open returns file '" + path + "'");
  return parse_returns_csv(in);
}

SampleSpectrum correlation_spectrum(const ReturnsMatrix& returns, std::size_t spikes) {
  const Eigen::Index T = returns.values.rows();
  const Eigen::Index N = returns.values.cols();
  if (T < 2 || N < 2) throw InputError("correlation spectrum: need T >= 2 and N >= 2");
  if (spikes >= static_cast<std::size_t>(N)) throw InputError("correlation spectrum: spikes must be < N");

  Eigen::MatrixXd z = returns.values.rowwise() - returns.values.colwise().mean();
  for (Eigen::Index j = 0; j < N; ++j) {
    const double var = z.col(j).squaredNorm() / static_cast<double>(T - 1);
    if (!(var > 0.0)) {
      const std::string name = static_cast<std::size_t>(j) < returns.labels.size()
                                   ? returns.labels[static_cast<std::size_t>(j)]
                                   : std::to_string(j);
      throw InputError("correlation spectrum: asset '" + name + "' has zero variance");
    }
    z.col(j) /= std::sqrt(var);
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(N, N);
  corr.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / static_cast<double>(T - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("correlation spectrum: eigensolver failed");

  std::vector<double> eig(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  eig.erase(eig.begin(), eig.begin() + static_cast<std::ptrdiff_t>(spikes));
  const std::size_t p = eig.size();
  const auto n = static_cast<std::size_t>(T - 1);
  if (p > n) {
    // Rank deficiency leaves p - n numerically-zero eigenvalues.
    const double scale = std::max(1.0, eig.front());
    for (std::size_t i = n; i < p; ++i) {
      if (std::abs(eig[i]) < 1e-8 * scale) eig[i] = 0.0;
    }
  }
  for (double& l : eig) {
    if (l < 0.0 && l > -1e-10) l = 0.0;
  }
  return SampleSpectrum(std::move(eig), p, n);
}

DensityCurve kde_curve(std::span<const double> eigenvalues, double bandwidth, std::span<const double> grid) {
  if (!(bandwidth > 0.0)) throw InputError("kde: bandwidth must be positive");
  if (eigenvalues.empty()) throw InputError("kde: no eigenvalues");
  const double norm = 1.0 / (static_cast<double>(eigenvalues.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  DensityCurve curve;
  curve.x.assign(grid.begin(), grid.end());
  curve.f.reserve(grid.size());
  for (double x : grid) {
    double sum = 0.0;
    for (double l : eigenvalues) {
      const double z = (x - l) / bandwidth;
      sum += std::exp(-0.5 * z * z);
    }
    curve.f.push_back(norm * sum);
  }
  return curve;
}

std::vector<double> read_eigenvalues_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open eigenvalue file '" + path + "'");
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto cells = split_row(line);
    if (cells.empty() || cells[0].empty()) continue;
    double v = 0.0;
    if (!parse_double(cells[0], v)) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("eigenvalue file: non-numeric entry '" + cells[0] + "'");
    }
    first = false;
    out.push_back(v);
  }
  if (out.empty()) throw InputError("eigenvalue file '" + path + "' holds no values");
  return out;
}

}  // namespace psd
