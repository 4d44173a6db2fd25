#pragma once

// Synthetic data from a PSD and Monte Carlo replication of estimation runs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psd/data_io.hpp"
#include "psd/estimator.hpp"
#include "psd/models.hpp"

namespace psd {

/// p population eigenvalues whose empirical distribution approximates the
/// model: atom counts by largest-remainder rounding of m_i p, quantile
/// midpoints Q((i - 1/2) / p) for continuous families. Ascending order.
std::vector<double> population_from_model(const PSDModel& model, std::size_t p);

/// How population eigenvalues are generated for each replication.
enum class PopulationScheme {
  /// population_from_model for every family: identical in every replication.
  Quantile,
  /// Continuous families: p i.i.d. draws from H, redrawn per replication.
  /// Atomic families keep the largest-remainder counts of population_from_model.
  Sampled,
};

std::string_view to_string(PopulationScheme scheme);
PopulationScheme parse_population_scheme(std::string_view name);

/// Population eigenvalues under the Sampled scheme (ascending); draws come from
/// CounterRng(seed, stream 3).
std::vector<double> sample_population(const PSDModel& model, std::size_t p, std::uint64_t seed);

/// Eigenvalues of S_n = (1/n) X X^T, X = diag(sqrt(pop)) W with W a p x n
/// standard normal matrix drawn from CounterRng(seed). For p > n the nonzero
/// eigenvalues come from the n x n Gram matrix and p - n zeros are appended.
SampleSpectrum sample_spectrum(std::span<const double> population, std::size_t n, std::uint64_t seed);

/// T x N returns with population correlation spectrum given by the model:
/// rows are N(0, Sigma), Sigma = O diag(d) O^T with O Haar-orthogonal.
ReturnsMatrix synthetic_returns(const PSDModel& model, std::size_t assets, std::size_t days, std::uint64_t seed);

struct ExperimentConfig {
  std::string name = "experiment";
  PSDModel truth = PointMassPSD(1.0);
  std::vector<std::pair<std::size_t, std::size_t>> dims;  // (p, n)
  int replications = 200;
  std::uint64_t seed = 20130101;
  ModelKind family = ModelKind::Discrete;
  std::size_t order = 1;
  int l = 20;
  PopulationScheme population = PopulationScheme::Sampled;
  std::string output;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
};

/// Validates the config, throwing InputError.
void validate(const ExperimentConfig& cfg);

struct ReplicationRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double wasserstein = 0.0;
  std::vector<double> theta;
  std::string error;
};

struct DimensionSummary {
  std::size_t p = 0;
  std::size_t n = 0;
  double mean_w = 0.0;
  double sd_w = 0.0;
  double median_w = 0.0;
  int failures = 0;
  std::vector<ReplicationRecord> records;
};

struct ExperimentReport {
  std::string name;
  std::vector<DimensionSummary> rows;
  std::string population_discretization;
};

/// Seed of replication r: seed XOR r.
constexpr std::uint64_t replication_seed(std::uint64_t seed, int r) noexcept {
  return seed ^ static_cast<std::uint64_t>(r);
}

/// One replication: simulate, build the u-net, fit, and measure W(H_hat, H).
ReplicationRecord run_replication(const ExperimentConfig& cfg, std::size_t p, std::size_t n, int r);

/// Recomputes mean, sample SD and median of W over successful records.
DimensionSummary summarize(std::size_t p, std::size_t n, std::vector<ReplicationRecord> records);

/// Deterministic given the config: replications run in parallel and are
/// assembled by index.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace psd
