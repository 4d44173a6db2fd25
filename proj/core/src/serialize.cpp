#include "psd/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "psd/errors.hpp"

namespace psd {

namespace {

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json intervals_to_json(const std::vector<Interval>& intervals) {
  json out = json::array();
  for (const auto& iv : intervals) out.push_back({number_or_null(iv.lo), number_or_null(iv.hi)});
  return out;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("JSON: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("JSON: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const PSDModel& model) {
  struct Visitor {
    json operator()(const DiscretePSD& m) const {
      return {{"kind", "discrete"}, {"atoms", m.atoms()}, {"weights", m.weights()}};
    }
    json operator()(const LaguerrePSD& m) const { return {{"kind", "laguerre"}, {"alphas", m.alphas()}}; }
    json operator()(const InverseCubicPSD& m) const { return {{"kind", "inverse_cubic"}, {"alpha", m.alpha()}}; }
    json operator()(const PointMassPSD& m) const { return {{"kind", "point_mass"}, {"at", m.at()}}; }
  };
  return std::visit(Visitor{}, model);
}

PSDModel model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model JSON must be an object");
  switch (parse_model_kind(required<std::string>(j, "kind"))) {
    case ModelKind::Discrete:
      return DiscretePSD(required<std::vector<double>>(j, "atoms"), required<std::vector<double>>(j, "weights"));
    case ModelKind::Laguerre:
      return LaguerrePSD(required<std::vector<double>>(j, "alphas"));
    case ModelKind::InverseCubic:
      return InverseCubicPSD(required<double>(j, "alpha"));
    case ModelKind::PointMass:
      return PointMassPSD(required<double>(j, "at"));
  }
  throw InputError("model JSON: unknown kind");
}

json to_json(const SupportReport& report) {
  return {{"support", intervals_to_json(report.support)},
          {"b_plus", intervals_to_json(report.b_plus)},
          {"complement", intervals_to_json(report.complement)},
          {"mass_at_zero", report.mass_at_zero}};
}

json to_json(const UNet& net) {
  json points = json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    points.push_back({{"u", net.u()[i]}, {"s", net.s()[i]}, {"interval", net.interval()[i]}});
  }
  return {{"l", net.points_per_interval()}, {"m", net.size()}, {"points", points}};
}

json to_json(const FitResult& fit) {
  return {{"family", std::string(to_string(fit.family))},
          {"model", to_json(fit.model)},
          {"theta", fit.theta},
          {"objective", fit.objective},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"c_hat", fit.c_hat.value()},
          {"residuals", fit.residuals},
          {"unet", to_json(fit.net)}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  cfg.name = j.value("name", cfg.name);
  cfg.truth = model_from_json(required<json>(j, "model"));
  for (const auto& pair : required<json>(j, "dims")) {
    if (!pair.is_array() || pair.size() != 2) throw InputError("experiment config: dims entries are [p, n]");
    cfg.dims.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
  }
  cfg.replications = j.value("replications", cfg.replications);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.family = parse_model_kind(required<std::string>(j, "family"));
  cfg.order = j.value("order", cfg.order);
  cfg.l = j.value("l", cfg.l);
  if (j.contains("population")) cfg.population = parse_population_scheme(j.at("population").get<std::string>());
  cfg.output = j.value("output", cfg.output);
  cfg.threads = j.value("threads", cfg.threads);
  validate(cfg);
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json dims = json::array();
  for (const auto& [p, n] : cfg.dims) dims.push_back({p, n});
  return {{"name", cfg.name},       {"model", to_json(cfg.truth)},
          {"dims", dims},           {"replications", cfg.replications},
          {"seed", cfg.seed},       {"family", std::string(to_string(cfg.family))},
          {"order", cfg.order},     {"l", cfg.l},
          {"population", std::string(to_string(cfg.population))},
          {"output", cfg.output}};
}

json to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json records = json::array();
    for (const auto& rec : row.records) {
      json r = {{"replication", rec.replication}, {"seed", rec.seed}, {"ok", rec.ok}};
      if (rec.ok) {
        r["W"] = rec.wasserstein;
        r["theta"] = rec.theta;
      } else {
        r["error"] = rec.error;
      }
      records.push_back(std::move(r));
    }
    rows.push_back({{"p", row.p},
                    {"n", row.n},
                    {"mean_W", row.mean_w},
                    {"sd_W", row.sd_w},
                    {"median_W", row.median_w},
                    {"failures", row.failures},
                    {"records", std::move(records)}});
  }
  return {{"name", report.name},
          {"population_discretization", report.population_discretization},
          {"rows", std::move(rows)}};
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "case,p,n,mean_W,sd_W,failures\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& row : report.rows) {
    out << report.name << ',' << row.p << ',' << row.n << ',' << row.mean_w << ',' << row.sd_w << ','
        << row.failures << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open JSON file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace psd
