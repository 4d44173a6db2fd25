#include "psd/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

#include "psd/errors.hpp"
#include "psd/random.hpp"

namespace psd {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

std::vector<double> descending_eigenvalues(const Eigen::MatrixXd& lower_filled) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lower_filled, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

std::vector<double> population_from_model(const PSDModel& model, std::size_t p) {
  if (p == 0) throw InputError("population: p must be positive");
  std::vector<double> out;
  out.reserve(p);
  if (const auto* d = std::get_if<DiscretePSD>(&model)) {
    const std::size_t k = d->order();
    std::vector<std::size_t> counts(k);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double exact = d->weights()[i] * static_cast<double>(p);
      counts[i] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[i];
      remainders[i] = {exact - std::floor(exact), i};
    }
    // Largest remainders first; ties go to the smaller atom index.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < p; ++r, ++assigned) ++counts[remainders[r % k].second];
    for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), counts[i], d->atoms()[i]);
    return out;
  }
  if (const auto* pm = std::get_if<PointMassPSD>(&model)) return std::vector<double>(p, pm->at());
  std::vector<double> probs(p);
  for (std::size_t i = 0; i < p; ++i) probs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(p);
  return quantiles(model, probs);
}

std::string_view to_string(PopulationScheme scheme) {
  return scheme == PopulationScheme::Quantile ? "quantile" : "sampled";
}

PopulationScheme parse_population_scheme(std::string_view name) {
  if (name == "quantile") return PopulationScheme::Quantile;
  if (name == "sampled") return PopulationScheme::Sampled;
  throw InputError("unknown population scheme '" + std::string(name) + "'");
}

std::vector<double> sample_population(const PSDModel& model, std::size_t p, std::uint64_t seed) {
  if (p == 0) throw InputError("population: p must be positive");
  const ModelKind kind = kind_of(model);
  if (kind == ModelKind::Discrete || kind == ModelKind::PointMass) return population_from_model(model, p);
  CounterRng rng(seed, 3);
  std::vector<double> probs(p);
  for (double& u : probs) u = rng.uniform();
  std::sort(probs.begin(), probs.end());
  return quantiles(model, probs);
}

SampleSpectrum sample_spectrum(std::span<const double> population, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("sample spectrum: n must be positive");
  const std::size_t p = population.size();
  if (p == 0) throw InputError("sample spectrum: empty population");
  const auto rows = static_cast<Eigen::Index>(p);
  const auto cols = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x = gaussian_matrix(rows, cols, seed, 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double pop = population[static_cast<std::size_t>(i)];
    if (!(pop >= 0.0)) throw InputError("sample spectrum: population eigenvalues must be nonnegative");
    x.row(i) *= std::sqrt(pop);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> eig;
  if (p <= n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, rows);
    s.selfadjointView<Eigen::Lower>().rankUpdate(x, inv_n);
    eig = descending_eigenvalues(s);
  } else {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(cols, cols);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_n);
    eig = descending_eigenvalues(gram);
    eig.resize(p, 0.0);
  }
  for (double& l : eig) l = std::max(l, 0.0);
  return SampleSpectrum(std::move(eig), p, n);
}

ReturnsMatrix synthetic_returns(const PSDModel& model, std::size_t assets, std::size_t days, std::uint64_t seed) {
  if (assets < 2 || days < 2) throw InputError("synthetic returns: need at least 2 assets and 2 days");
  const auto N = static_cast<Eigen::Index>(assets);
  const auto T = static_cast<Eigen::Index>(days);
  const auto pop = population_from_model(model, assets);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(N, N, seed, 1));
  Eigen::MatrixXd q = qr.householderQ();
  // Sign fix on R's diagonal makes Q Haar distributed.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < N; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Eigen::VectorXd root(N);
  for (Eigen::Index i = 0; i < N; ++i) root(i) = std::sqrt(pop[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd sigma_root = q * root.asDiagonal() * q.transpose();

  ReturnsMatrix out;
  out.values = gaussian_matrix(T, N, seed, 2) * sigma_root;
  out.labels.reserve(assets);
  for (std::size_t j = 0; j < assets; ++j) out.labels.push_back("A" + std::to_string(j + 1));
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw InputError("experiment: replications must be at least 1");
  if (cfg.dims.empty()) throw InputError("experiment: no (p, n) pairs");
  for (const auto& [p, n] : cfg.dims) {
    if (p < 1 || n < 1) throw InputError("experiment: p and n must be at least 1");
  }
  if (cfg.l < 1) throw InputError("experiment: l must be at least 1");
  if (cfg.family != ModelKind::InverseCubic && cfg.order < 1) {
    throw InputError("experiment: order must be at least 1");
  }
}

ReplicationRecord run_replication(const ExperimentConfig& cfg, std::size_t p, std::size_t n, int r) {
  ReplicationRecord rec;
  rec.replication = r;
  rec.seed = replication_seed(cfg.seed, r);
  try {
    const auto population = cfg.population == PopulationScheme::Quantile
                                 ? population_from_model(cfg.truth, p)
                                 : sample_population(cfg.truth, p, rec.seed);
    const auto spectrum = sample_spectrum(population, n, rec.seed);
    const auto net = build_unet(spectrum, cfg.family, cfg.l);
    const auto result = fit(spectrum, cfg.family, cfg.order, net);
    rec.theta = result.theta;
    rec.wasserstein = wasserstein(result.model, cfg.truth);
    rec.ok = std::isfinite(rec.wasserstein);
    if (!rec.ok) rec.error = "non-finite Wasserstein distance";
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

DimensionSummary summarize(std::size_t p, std::size_t n, std::vector<ReplicationRecord> records) {
  DimensionSummary row;
  row.p = p;
  row.n = n;
  std::vector<double> w;
  for (const auto& rec : records) {
    if (rec.ok) {
      w.push_back(rec.wasserstein);
    } else {
      ++row.failures;
    }
  }
  if (!w.empty()) {
    row.mean_w = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    if (w.size() > 1) {
      double ss = 0.0;
      for (double v : w) ss += (v - row.mean_w) * (v - row.mean_w);
      row.sd_w = std::sqrt(ss / static_cast<double>(w.size() - 1));
    }
    std::vector<double> sorted(w);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    row.median_w = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  row.records = std::move(records);
  return row;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.name = cfg.name;
  report.population_discretization =
      cfg.population == PopulationScheme::Quantile
          ? "quantile: discrete models use largest-remainder atom counts, continuous use Q((i - 0.5) / p)"
          : "sampled: discrete models use largest-remainder atom counts, continuous use p i.i.d. draws from H per replication";
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min(workers, static_cast<unsigned>(cfg.replications)));

  for (const auto& [p, n] : cfg.dims) {
    std::vector<ReplicationRecord> records(static_cast<std::size_t>(cfg.replications));
    std::atomic<int> next{0};
    auto work = [&, p = p, n = n] {
      for (int r = next++; r < cfg.replications; r = next++) {
        records[static_cast<std::size_t>(r)] = run_replication(cfg, p, n, r);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    report.rows.push_back(summarize(p, n, std::move(records)));
  }
  return report;
}

}  // namespace psd
