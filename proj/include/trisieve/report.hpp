#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "trisieve/estimator.hpp"
#include "trisieve/identlab.hpp"
#include "trisieve/inference.hpp"
#include "trisieve/simulation.hpp"

namespace trisieve {

using Json = nlohmann::ordered_json;

std::string software_version();

/// {"software", "version", "command", "seed", "config"} block embedded in
/// every machine-readable output.
Json run_header(const std::string& command, std::uint64_t seed, const Json& config);

Json to_json(const ParametricMarginal& m);
Json to_json(const ModelSpec& spec);
Json to_json(const Dgp& dgp);
Json to_json(const FittedModel& m);
Json to_json(const Scenario& s);
Json to_json(const CoverageStudy& c);
Json to_json(const FitResult& fit);
Json to_json(const EfficientScoreFit& es);
Json to_json(const BootstrapResult& br);
Json to_json(const McCell& c);
Json to_json(const CoverageSummary& c);
Json to_json(const copula::SiReport& r);

/// Inverse of to_json for configuration objects. Throws std::invalid_argument
/// naming the offending key.
ParametricMarginal marginal_from_json(const Json& j);
Dgp dgp_from_json(const Json& j);
FittedModel fitted_model_from_json(const Json& j);
Scenario scenario_from_json(const Json& j);

/// One JSON object per line: header, then one record per cell with
/// (scenario, model, target, truth, mean, sd, bias, rmse).
std::string mc_records(const McSummary& s, const Json& header);

/// Blocks of (True Values, Estimate, S.D, Bias, RMSE) rows per fitted model.
std::string mc_table(const McSummary& s);
std::string coverage_table(const CoverageSummary& c);
std::string fit_table(const FitResult& fit, const EfficientScoreFit* es);

/// Fixed-point rendering used by the text tables.
std::string fixed(double v, int digits = 4);

}  // namespace trisieve
