#pragma once

// JSON and CSV encodings of models, reports and fit records. Infinite
// interval ends are written as null.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "psd/estimator.hpp"
#include "psd/models.hpp"
#include "psd/mp_transform.hpp"
#include "psd/simulation.hpp"

namespace psd {

using json = nlohmann::json;

/// {"kind":"discrete","atoms":[...],"weights":[...]}, {"kind":"laguerre","alphas":[a1..aq]},
/// {"kind":"inverse_cubic","alpha":x}, {"kind":"point_mass","at":x}.
json to_json(const PSDModel& model);
PSDModel model_from_json(const json& j);

json to_json(const SupportReport& report);
json to_json(const UNet& net);
json to_json(const FitResult& fit);

ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& cfg);
json to_json(const ExperimentReport& report);

/// Columns: case,p,n,mean_W,sd_W,failures.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace psd
