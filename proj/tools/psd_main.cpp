// psd: command-line front end for population spectral distribution estimation.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "psd/analysis.hpp"
#include "psd/data_io.hpp"
#include "psd/errors.hpp"
#include "psd/estimator.hpp"
#include "psd/serialize.hpp"
#include "psd/simulation.hpp"

namespace fs = std::filesystem;
using namespace psd;

namespace {

struct SimulateArgs {
  std::string config;
  std::string out;
  int threads = -1;
};

struct EstimateArgs {
  std::string eigs;
  std::size_t p = 0;
  std::size_t n = 0;
  std::string family;
  std::size_t order = 1;
  int l = 20;
  std::string out;
};

struct ForwardArgs {
  std::string model;
  double c = 0.0;
  std::string grid = "0:3:400";
  double eps = 1e-6;
  std::string out;
};

struct AnalyzeArgs {
  std::string returns;
  std::size_t spikes = 0;
  double bandwidth = 0.05;
  int l = 20;
  int grid_points = 400;
  std::string out;
};

struct SupportArgs {
  std::string model;
  double c = 0.0;
  std::string out;
};

void emit_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(path, j);
  }
}

int run_simulate(const SimulateArgs& a) {
  auto cfg = config_from_json(read_json_file(a.config));
  if (a.threads >= 0) cfg.threads = a.threads;
  const std::string out = a.out.empty() ? cfg.output : a.out;
  if (out.empty()) throw InputError("simulate: no output path (--out or \"output\" in the config)");
  const auto report = run_experiment(cfg);
  json j = to_json(report);
  j["config"] = to_json(cfg);
  write_json_file(out, j);

  fs::path table(out);
  table.replace_extension(".csv");
  std::ofstream csv(table);
  if (!csv) throw InputError("cannot open '" + table.string() + "' for writing");
  write_report_csv(csv, report);

  for (const auto& row : report.rows) {
    std::cerr << report.name << " p=" << row.p << " n=" << row.n << " mean_W=" << row.mean_w
              << " sd_W=" << row.sd_w << " failures=" << row.failures << "\n";
  }
  return 0;
}

int run_estimate(const EstimateArgs& a) {
  const ModelKind family = parse_model_kind(a.family);
  const SampleSpectrum spectrum(read_eigenvalues_csv(a.eigs), a.p, a.n);
  const ModelKind net_family = family == ModelKind::PointMass ? ModelKind::Discrete : family;
  const auto net = build_unet(spectrum, net_family, a.l);
  const auto result = fit(spectrum, family, a.order, net);
  json j = to_json(result);
  j["p"] = a.p;
  j["n"] = a.n;
  emit_json(j, a.out);
  return 0;
}

int run_forward(const ForwardArgs& a) {
  const PSDModel model = model_from_json(read_json_file(a.model));
  const auto grid = parse_grid(a.grid);
  const auto curve = lsd_density_curve(model, AspectRatio(a.c), grid, a.eps);
  if (a.out.empty() || a.out == "-") {
    write_csv(std::cout, curve);
  } else {
    write_csv(a.out, curve);
  }
  return 0;
}

int run_analyze(const AnalyzeArgs& a) {
  const auto loaded = load_returns_csv(a.returns);
  AnalyzeOptions opts;
  opts.spikes = a.spikes;
  opts.bandwidth = a.bandwidth;
  opts.l = a.l;
  opts.grid_points = a.grid_points;
  const auto result = analyze_returns(loaded.returns, opts);

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());

  json j = to_json(result.fit);
  j["alpha"] = result.fit.theta.at(0);
  j["assets"] = loaded.returns.values.cols();
  j["days"] = loaded.returns.values.rows();
  j["dropped"] = loaded.dropped;
  j["spikes"] = a.spikes;
  j["p"] = result.spectrum.p();
  j["n"] = result.spectrum.n();
  j["bandwidth"] = a.bandwidth;
  write_json_file((dir / "fit.json").string(), j);
  write_csv((dir / "empirical.csv").string(), result.empirical);
  write_csv((dir / "fitted_lsd.csv").string(), result.fitted_lsd);
  write_csv((dir / "mp_baseline.csv").string(), result.mp_baseline);
  std::cerr << "alpha_hat=" << result.fit.theta.at(0) << " p=" << result.spectrum.p()
            << " n=" << result.spectrum.n() << " dropped=" << loaded.dropped.size() << "\n";
  return 0;
}

int run_support(const SupportArgs& a) {
  const PSDModel model = model_from_json(read_json_file(a.model));
  const auto report = support_bounds(model, AspectRatio(a.c));
  json j = to_json(report);
  j["c"] = a.c;
  j["model"] = to_json(model);
  emit_json(j, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population spectral distribution estimation via the real-line Marcenko-Pastur equation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo replication of an estimation experiment");
  simulate->add_option("--config", sim.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "report JSON; a CSV table is written next to it");
  simulate->add_option("--threads", sim.threads, "worker threads (0 = hardware concurrency)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "fit a PSD family to sample eigenvalues");
  estimate->add_option("--eigs", est.eigs, "eigenvalues, one per line")->required()->check(CLI::ExistingFile);
  estimate->add_option("--p", est.p, "dimension p")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--n", est.n, "sample size n")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--family", est.family, "discrete | laguerre | inverse_cubic")
      ->required()
      ->check(CLI::IsMember({"discrete", "laguerre", "inverse_cubic", "point_mass"}));
  estimate->add_option("--order", est.order, "k (discrete) or q (laguerre)")->capture_default_str();
  estimate->add_option("--l", est.l, "u-net points per interval")->capture_default_str();
  estimate->add_option("--out", est.out, "fit JSON (stdout if omitted)");

  ForwardArgs fwd;
  auto* forward = app.add_subcommand("forward", "limiting spectral density of a model");
  forward->add_option("--model", fwd.model, "model JSON")->required()->check(CLI::ExistingFile);
  forward->add_option("--c", fwd.c, "aspect ratio p/n")->required();
  forward->add_option("--grid", fwd.grid, "lo:hi:count (cell midpoints)")->capture_default_str();
  forward->add_option("--eps", fwd.eps, "imaginary offset for Stieltjes inversion")->capture_default_str();
  forward->add_option("--out", fwd.out, "curve CSV (stdout if omitted)");

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "inverse-cubic fit of an asset-returns correlation spectrum");
  analyze->add_option("--returns", ana.returns, "returns CSV (days x assets, header of labels)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--spikes", ana.spikes, "number of largest eigenvalues to drop")->capture_default_str();
  analyze->add_option("--bandwidth", ana.bandwidth, "Gaussian KDE bandwidth")->capture_default_str();
  analyze->add_option("--l", ana.l, "u-net points")->capture_default_str();
  analyze->add_option("--grid-points", ana.grid_points, "curve grid size")->capture_default_str();
  analyze->add_option("--out", ana.out, "output directory")->required();

  SupportArgs sup;
  auto* support = app.add_subcommand("support", "support of the limiting spectral distribution");
  support->add_option("--model", sup.model, "model JSON")->required()->check(CLI::ExistingFile);
  support->add_option("--c", sup.c, "aspect ratio p/n")->required();
  support->add_option("--out", sup.out, "report JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*estimate) return run_estimate(est);
    if (*forward) return run_forward(fwd);
    if (*analyze) return run_analyze(ana);
    if (*support) return run_support(sup);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}
