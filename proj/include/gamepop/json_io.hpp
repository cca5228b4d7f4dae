#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamepop/cascade.hpp"
#include "gamepop/fitting.hpp"
#include "gamepop/lifecycle.hpp"
#include "gamepop/matchmaking.hpp"
#include "gamepop/models.hpp"
#include "gamepop/novelty.hpp"
#include "gamepop/timeseries.hpp"

// JSON and CSV wire formats. Field names are part of the external contract;
// malformed input surfaces as ValidationError with the offending field path.

namespace gamepop {

// --- model parameters (family-tagged flat objects) -------------------------

nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json biphasic_to_json(const BiphasicParams& params);
BiphasicParams biphasic_from_json(const nlohmann::json& j);

nlohmann::json network_utility_to_json(const NetworkUtilityParams& params);
NetworkUtilityParams network_utility_from_json(const nlohmann::json& j);

// --- cascade ----------------------------------------------------------------

nlohmann::json cascade_to_json(const CascadeParams& params);
CascadeParams cascade_from_json(const nlohmann::json& j);
std::string cascade_trajectory_csv(const CascadeTrajectory& trajectory);

// --- simulation scenario ------------------------------------------------------

struct SimScenario {
  LogisticParams growth;
  ContentSchedule schedule;
  NoveltyParams novelty;
  double phi;
  std::optional<double> t_service;
  std::optional<CascadeParams> cascade;  // post-crossing continuation
  double step;
  double horizon;
};

SimScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json sim_summary_to_json(const LifecycleSimResult& result,
                                   std::optional<double> cascade_t_collapse);
std::string sim_trajectory_csv(const LifecycleSimResult& result);

// --- matchmaking --------------------------------------------------------------

nlohmann::json profile_to_json(const OperationalProfile& profile);
OperationalProfile profile_from_json(const nlohmann::json& j);
nlohmann::json viability_to_json(const ViabilityEstimate& estimate);

// --- fitting -------------------------------------------------------------------

nlohmann::json fit_report_to_json(const FitReport& report);
nlohmann::json comparison_to_json(const ModelComparison& comparison);

// Plot data for the post-peak window: t, observed, fitted, lo_band, hi_band.
// Bands are pointwise 2.5/97.5 percentiles over bootstrap replicate curves
// (equal to the fitted curve when no replicates are given).
std::string fit_curve_csv(const PopulationSeries& series, const FitReport& report,
                          const std::vector<ModelParams>& replicates);

// --- lifecycle -------------------------------------------------------------------

nlohmann::json intervals_to_json(const std::vector<StateInterval>& intervals);
LifecycleConfig lifecycle_config_from_json(const nlohmann::json& j);
nlohmann::json preservation_to_json(const std::optional<double>& psi,
                                    const std::optional<PreservationWindow>& window);

// --- helpers ----------------------------------------------------------------------

nlohmann::json parse_json_text(const std::string& text, const std::string& context);
std::string format_csv_number(double v);

}  // namespace gamepop
