#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gamepop/models.hpp"
#include "gamepop/timeseries.hpp"

namespace gamepop {

enum class NoiseModel { gaussian, lognormal };

// Fitted parameters for any curve family, flattened into one variant.
using ModelParams = std::variant<LogisticParams, BassParams, ExponentialDecayParams,
                                 WeibullDecayParams, PowerLawDecayParams, LogNormalDecayParams>;

struct PeakDetection {
  double t_peak = 0.0;
  double p_peak = 0.0;        // raw (unsmoothed) value at the detected timestamp
  bool no_decay_phase = false;  // peak sits at the last sample
};

// Moving-average smoothed global maximum, earliest on ties. Requires at least
// 2 * smoothing_window points.
PeakDetection detect_peak(const PopulationSeries& series, int smoothing_window);

struct FitReport {
  Family family = Family::exponential;
  ModelParams params;
  double sigma = 0.0;  // proportional (gaussian) or log-scale (lognormal) noise sd
  NoiseModel noise_model = NoiseModel::gaussian;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_points = 0;
  int k_params = 0;  // fitted parameters counted by AIC/BIC, noise scale included
  double residual_sd = 0.0;
  std::map<std::string, std::pair<double, double>> bootstrap_ci;  // filled separately
  std::optional<double> half_life_days;                           // decay families only
  std::optional<double> projected_phi_crossing;
  bool phi_already_subcritical = false;

  FitReport() : params(ExponentialDecayParams(1.0, 0.0, 1.0)) {}
};

// Maximum-likelihood fit of one decay family to the post-peak points
// (t >= t_peak), multi-start Nelder-Mead over a documented initialization
// grid. Requires >= 8 post-peak points; lognormal noise additionally requires
// all post-peak counts > 0.
FitReport fit_decay(const PopulationSeries& series, Family family, double t_peak,
                    NoiseModel noise_model);

// Same machinery applied to the pre-peak points for the growth families
// (logistic or bass).
FitReport fit_growth(const PopulationSeries& series, Family family, double t_peak,
                     NoiseModel noise_model);

struct ModelComparison {
  std::vector<FitReport> reports;            // successful fits, input order
  Family winner = Family::exponential;
  std::map<std::string, double> delta_aic;   // family name -> aic - min aic
  std::map<std::string, std::string> failures;  // family name -> error message
};

// Fits each family and ranks by AIC; |delta| < 1e-9 ties break toward fewer
// parameters. Per-family failures are recorded, not propagated.
ModelComparison compare_models(const PopulationSeries& series, const std::vector<Family>& families,
                               double t_peak, NoiseModel noise_model);

struct BootstrapResult {
  std::map<std::string, std::pair<double, double>> ci;  // 95% percentile intervals
  std::vector<ModelParams> replicates;                  // successful replicate fits
  int n_failed = 0;
};

// Residual-resampling bootstrap around the point fit; deterministic given
// seed. n_boot >= 100; more than 20% replicate failures is an error.
BootstrapResult bootstrap_fit(const PopulationSeries& series, Family family, double t_peak,
                              NoiseModel noise_model, int n_boot, std::uint64_t seed);

std::map<std::string, std::pair<double, double>> bootstrap_ci(const PopulationSeries& series,
                                                              Family family, double t_peak,
                                                              NoiseModel noise_model, int n_boot,
                                                              std::uint64_t seed);

struct PhiCrossing {
  std::optional<double> day;
  bool already_subcritical = false;  // phi >= fitted p_peak; day holds t_peak
};

// First time the fitted decay curve drops below phi, bisected to 1e-6 day;
// none if no crossing within 100 half-lives.
PhiCrossing project_phi_crossing(const FitReport& report, double phi);

struct HoldoutResult {
  int n_train = 0;
  int n_test = 0;
  double rmse = 0.0;  // players, on the held-out tail
  FitReport fit;
};

// Train/test split evaluation: fit on the first train_frac of the post-peak
// points, report RMSE on the remainder.
HoldoutResult holdout_evaluate(const PopulationSeries& series, Family family, double t_peak,
                               NoiseModel noise_model, double train_frac);

// Named parameter values for reports and CIs ("p_peak", "mu", ...).
std::map<std::string, double> named_params(const ModelParams& params);

}  // namespace gamepop
