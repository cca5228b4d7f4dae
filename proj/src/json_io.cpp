#include "gamepop/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gamepop/errors.hpp"

namespace gamepop {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(ctx + ": missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

std::optional<double> get_opt_num(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number())
    throw ValidationError(ctx + ": field '" + key + "' must be a number");
  return j[key].get<double>();
}

json opt_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

const char* noise_name(NoiseModel noise) {
  return noise == NoiseModel::gaussian ? "gaussian" : "lognormal";
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(context + ": invalid JSON: " + e.what());
  }
}

std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// --- model parameters -------------------------------------------------------

json params_to_json(const ModelParams& params) {
  json j;
  j["family"] = family_name(std::visit(
      [](const auto& p) -> Family {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogisticParams>) return Family::logistic;
        else if constexpr (std::is_same_v<T, BassParams>) return Family::bass;
        else if constexpr (std::is_same_v<T, ExponentialDecayParams>) return Family::exponential;
        else if constexpr (std::is_same_v<T, WeibullDecayParams>) return Family::weibull;
        else if constexpr (std::is_same_v<T, PowerLawDecayParams>) return Family::power_law;
        else return Family::log_normal;
      },
      params));
  for (const auto& [name, value] : named_params(params)) j[name] = value;
  return j;
}

ModelParams params_from_json(const json& j) {
  const std::string ctx = "params";
  if (!j.contains("family") || !j["family"].is_string())
    throw ValidationError("params: missing 'family' tag");
  const auto family = family_from_name(j["family"].get<std::string>());
  if (!family) throw ValidationError("params: unknown family '" + j["family"].dump() + "'");
  switch (*family) {
    case Family::logistic:
      return LogisticParams(get_num(j, "K", ctx), get_num(j, "r", ctx), get_num(j, "t0", ctx));
    case Family::bass:
      return BassParams(get_num(j, "p", ctx), get_num(j, "q", ctx), get_num(j, "m_market", ctx));
    case Family::exponential:
      return ExponentialDecayParams(get_num(j, "p_peak", ctx), get_num(j, "t_peak", ctx),
                                    get_num(j, "mu", ctx));
    case Family::weibull:
      return WeibullDecayParams(get_num(j, "p_peak", ctx), get_num(j, "t_peak", ctx),
                                get_num(j, "theta", ctx), get_num(j, "k", ctx));
    case Family::power_law:
      return PowerLawDecayParams(get_num(j, "p_peak", ctx), get_num(j, "t_peak", ctx),
                                 get_num(j, "a", ctx), get_num(j, "s", ctx));
    case Family::log_normal:
      return LogNormalDecayParams(get_num(j, "p_peak", ctx), get_num(j, "t_peak", ctx),
                                  get_num(j, "m_ln", ctx), get_num(j, "s_ln", ctx));
    default:
      throw ValidationError("params: 'biphasic' uses the composite schema (growth + decay keys)");
  }
}

json biphasic_to_json(const BiphasicParams& params) {
  json j;
  j["family"] = "biphasic";
  j["K"] = params.growth.K;
  j["r"] = params.growth.r;
  j["t0"] = params.growth.t0;
  j["t_peak"] = params.t_peak;
  // decay branch flattened; the key set identifies the decay family
  for (const auto& [name, value] : named_params(std::visit(
           [](const auto& p) -> ModelParams { return ModelParams(p); }, params.decay)))
    if (name != "t_peak") j[name] = value;
  return j;
}

BiphasicParams biphasic_from_json(const json& j) {
  const std::string ctx = "biphasic";
  LogisticParams growth(get_num(j, "K", ctx), get_num(j, "r", ctx), get_num(j, "t0", ctx));
  const double t_peak = get_num(j, "t_peak", ctx);
  const double p_peak = get_num(j, "p_peak", ctx);
  DecayParams decay = [&]() -> DecayParams {
    if (j.contains("mu")) return ExponentialDecayParams(p_peak, t_peak, get_num(j, "mu", ctx));
    if (j.contains("theta"))
      return WeibullDecayParams(p_peak, t_peak, get_num(j, "theta", ctx), get_num(j, "k", ctx));
    if (j.contains("a"))
      return PowerLawDecayParams(p_peak, t_peak, get_num(j, "a", ctx), get_num(j, "s", ctx));
    if (j.contains("m_ln"))
      return LogNormalDecayParams(p_peak, t_peak, get_num(j, "m_ln", ctx),
                                  get_num(j, "s_ln", ctx));
    throw ValidationError("biphasic: no decay-family keys present");
  }();
  return BiphasicParams(growth, decay, t_peak);
}

json network_utility_to_json(const NetworkUtilityParams& params) {
  return json{{"alpha_u", params.alpha_u}, {"beta", params.beta}};
}

NetworkUtilityParams network_utility_from_json(const json& j) {
  return NetworkUtilityParams(get_num(j, "alpha_u", "network utility"),
                              get_num(j, "beta", "network utility"));
}

// --- cascade ------------------------------------------------------------------

json cascade_to_json(const CascadeParams& params) {
  return json{{"alpha_d", params.alpha_d}, {"gamma", params.gamma}, {"phi", params.phi}};
}

CascadeParams cascade_from_json(const json& j) {
  return CascadeParams(get_num(j, "alpha_d", "cascade"), get_num(j, "gamma", "cascade"),
                       get_num(j, "phi", "cascade"));
}

std::string cascade_trajectory_csv(const CascadeTrajectory& trajectory) {
  std::ostringstream out;
  out << "t,pop\n";
  for (const auto& [t, pop] : trajectory.points)
    out << format_csv_number(t) << ',' << format_csv_number(pop) << '\n';
  return out.str();
}

// --- simulation scenario ---------------------------------------------------------

SimScenario scenario_from_json(const json& j) {
  if (!j.contains("growth")) throw ValidationError("scenario: missing 'growth'");
  if (!j.contains("schedule")) throw ValidationError("scenario: missing 'schedule'");
  if (!j.contains("novelty")) throw ValidationError("scenario: missing 'novelty'");

  LogisticParams growth(get_num(j["growth"], "K", "scenario.growth"),
                        get_num(j["growth"], "r", "scenario.growth"),
                        get_num(j["growth"], "t0", "scenario.growth"));

  const json& sched = j["schedule"];
  if (!sched.contains("segments") || !sched["segments"].is_array())
    throw ValidationError("scenario.schedule: missing 'segments' array");
  std::vector<ContentSchedule::Segment> segments;
  for (const auto& seg : sched["segments"])
    segments.push_back({get_num(seg, "t_start", "scenario.schedule.segments"),
                        get_num(seg, "rate", "scenario.schedule.segments")});
  ContentSchedule schedule(std::move(segments), get_num(sched, "cap", "scenario.schedule"));

  NoveltyParams novelty(get_num(j["novelty"], "eta", "scenario.novelty"),
                        get_num(j["novelty"], "h_bar", "scenario.novelty"),
                        get_num(j["novelty"], "mu0", "scenario.novelty"),
                        get_num(j["novelty"], "kappa", "scenario.novelty"));

  const double phi = get_num(j, "phi", "scenario");
  std::optional<CascadeParams> cascade;
  if (j.contains("cascade") && !j["cascade"].is_null())
    cascade = CascadeParams(get_num(j["cascade"], "alpha_d", "scenario.cascade"),
                            get_num(j["cascade"], "gamma", "scenario.cascade"), phi);

  return SimScenario{growth,
                     std::move(schedule),
                     novelty,
                     phi,
                     get_opt_num(j, "t_service", "scenario"),
                     cascade,
                     get_num(j, "step", "scenario"),
                     get_num(j, "horizon", "scenario")};
}

json sim_summary_to_json(const LifecycleSimResult& result,
                         std::optional<double> cascade_t_collapse) {
  json j;
  j["t_novelty_exhaustion"] = opt_to_json(result.t_novelty_exhaustion);
  j["t_star"] = opt_to_json(result.t_star);
  switch (result.terminal_reason) {
    case TerminalReason::phi_crossing: j["terminal_reason"] = "phi_crossing"; break;
    case TerminalReason::service_horizon: j["terminal_reason"] = "service_horizon"; break;
    case TerminalReason::horizon_end: j["terminal_reason"] = "horizon_end"; break;
  }
  j["never_viable"] = result.never_viable;
  if (cascade_t_collapse) j["t_collapse"] = *cascade_t_collapse;
  return j;
}

std::string sim_trajectory_csv(const LifecycleSimResult& result) {
  std::ostringstream out;
  out << "t,pop,C,E,N,mu\n";
  for (const auto& s : result.trajectory)
    out << format_csv_number(s.t) << ',' << format_csv_number(s.pop) << ','
        << format_csv_number(s.content) << ',' << format_csv_number(s.exposure) << ','
        << format_csv_number(s.novelty) << ',' << format_csv_number(s.mu) << '\n';
  return out.str();
}

// --- matchmaking -----------------------------------------------------------------

json profile_to_json(const OperationalProfile& profile) {
  json j;
  j["match_size"] = profile.match_size;
  if (!profile.role_quota.empty()) j["role_quota"] = profile.role_quota;
  if (!profile.role_mix.empty()) j["role_mix"] = profile.role_mix;
  j["rho_per_hour"] = profile.rho_per_hour;
  j["q_max_minutes"] = profile.q_max_minutes;
  if (std::isfinite(profile.m_max)) j["m_max"] = profile.m_max;
  j["skill_spread"] = profile.skill_spread;
  j["regions"] = profile.regions;
  return j;
}

OperationalProfile profile_from_json(const json& j) {
  const std::string ctx = "profile";
  OperationalProfile profile;
  profile.match_size = static_cast<int>(get_num(j, "match_size", ctx));
  profile.rho_per_hour = get_num(j, "rho_per_hour", ctx);
  if (auto q = get_opt_num(j, "q_max_minutes", ctx))
    profile.q_max_minutes = *q;
  else
    profile.q_max_minutes = std::numeric_limits<double>::infinity();
  if (auto m = get_opt_num(j, "m_max", ctx)) profile.m_max = *m;
  if (auto s = get_opt_num(j, "skill_spread", ctx)) profile.skill_spread = *s;
  if (auto r = get_opt_num(j, "regions", ctx)) profile.regions = static_cast<int>(*r);
  if (j.contains("role_quota") && !j["role_quota"].is_null()) {
    if (!j["role_quota"].is_object())
      throw ValidationError("profile: 'role_quota' must be an object");
    for (const auto& [role, count] : j["role_quota"].items())
      profile.role_quota[role] = count.get<int>();
  }
  if (j.contains("role_mix") && !j["role_mix"].is_null()) {
    if (!j["role_mix"].is_object()) throw ValidationError("profile: 'role_mix' must be an object");
    for (const auto& [role, prob] : j["role_mix"].items())
      profile.role_mix[role] = prob.get<double>();
  }
  profile.validate();
  return profile;
}

json viability_to_json(const ViabilityEstimate& estimate) {
  json j;
  j["phi"] = estimate.phi;
  j["mean_queue_at_phi"] = estimate.mean_queue_at_phi;
  j["mean_imbalance_at_phi"] = estimate.mean_imbalance_at_phi;
  j["method"] = estimate.method == PhiMethod::analytic ? "analytic" : "discrete_event";
  j["seed"] = estimate.seed ? json(*estimate.seed) : json(nullptr);
  j["replications"] = estimate.replications;
  return j;
}

// --- fitting ------------------------------------------------------------------------

json fit_report_to_json(const FitReport& report) {
  json j;
  j["family"] = family_name(report.family);
  j["params"] = params_to_json(report.params);
  j["noise_model"] = noise_name(report.noise_model);
  j["log_likelihood"] = report.log_likelihood;
  j["aic"] = report.aic;
  j["bic"] = report.bic;
  j["n_points"] = report.n_points;
  j["k_params"] = report.k_params;
  j["residual_sd"] = report.residual_sd;
  j["sigma"] = report.sigma;
  json ci = json::object();
  for (const auto& [name, bounds] : report.bootstrap_ci)
    ci[name] = json::array({bounds.first, bounds.second});
  j["bootstrap_ci"] = ci;
  json derived;
  derived["half_life"] = opt_to_json(report.half_life_days);
  derived["projected_phi_crossing"] = opt_to_json(report.projected_phi_crossing);
  derived["phi_already_subcritical"] = report.phi_already_subcritical;
  j["derived"] = derived;
  return j;
}

json comparison_to_json(const ModelComparison& comparison) {
  json j;
  j["winner"] = family_name(comparison.winner);
  j["delta_aic"] = comparison.delta_aic;
  json reports = json::array();
  for (const auto& r : comparison.reports) reports.push_back(fit_report_to_json(r));
  j["reports"] = reports;
  j["failures"] = comparison.failures;
  return j;
}

std::string fit_curve_csv(const PopulationSeries& series, const FitReport& report,
                          const std::vector<ModelParams>& replicates) {
  const double t_peak = std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogisticParams> || std::is_same_v<T, BassParams>)
          return std::numeric_limits<double>::infinity();  // growth fits: whole span
        else
          return p.t_peak;
      },
      report.params);

  std::vector<double> ts;
  std::vector<double> observed;
  for (const auto& p : series.points) {
    if (std::isfinite(t_peak) && p.t < t_peak) continue;
    ts.push_back(p.t);
    observed.push_back(p.players);
  }

  const auto curve_at = [&](const ModelParams& params, double t) {
    return std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, LogisticParams>)
            return eval_logistic(p, t);
          else if constexpr (std::is_same_v<T, BassParams>)
            return eval_bass_cumulative(p, std::max(0.0, t - series.first_t()));
          else
            return eval_decay(DecayParams(p), t);
        },
        params);
  };

  std::ostringstream out;
  out << "t,observed,fitted,lo_band,hi_band\n";
  std::vector<double> band;
  band.reserve(replicates.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double fitted = curve_at(report.params, ts[i]);
    double lo = fitted, hi = fitted;
    if (!replicates.empty()) {
      band.clear();
      for (const auto& rep : replicates) band.push_back(curve_at(rep, ts[i]));
      std::sort(band.begin(), band.end());
      const auto pick = [&](double q) {
        const double h = q * static_cast<double>(band.size() - 1);
        const std::size_t a = static_cast<std::size_t>(h);
        const std::size_t b = std::min(a + 1, band.size() - 1);
        return band[a] + (h - a) * (band[b] - band[a]);
      };
      lo = pick(0.025);
      hi = pick(0.975);
    }
    out << format_csv_number(ts[i]) << ',' << format_csv_number(observed[i]) << ','
        << format_csv_number(fitted) << ',' << format_csv_number(lo) << ','
        << format_csv_number(hi) << '\n';
  }
  return out.str();
}

// --- lifecycle -------------------------------------------------------------------------

json intervals_to_json(const std::vector<StateInterval>& intervals) {
  json arr = json::array();
  for (const auto& iv : intervals) {
    json j;
    j["start"] = iv.start;
    j["end"] = iv.end;
    j["state"] = stage_name(iv.stage);
    j["evidence"] = iv.evidence;
    j["exogenous_intervention"] = iv.exogenous_intervention;
    arr.push_back(j);
  }
  return arr;
}

LifecycleConfig lifecycle_config_from_json(const json& j) {
  LifecycleConfig config;
  config.phi = get_num(j, "phi", "lifecycle config");
  if (auto d = get_opt_num(j, "delta_coma", "lifecycle config")) config.delta_coma = *d;
  config.t_service = get_opt_num(j, "t_service", "lifecycle config");
  config.validate();
  return config;
}

json preservation_to_json(const std::optional<double>& psi,
                          const std::optional<PreservationWindow>& window) {
  json j;
  j["psi"] = opt_to_json(psi);
  if (window) {
    j["t_omega3"] = opt_to_json(window->t_omega3);
    switch (window->status) {
      case WindowStatus::closed_interval: j["window_status"] = "closed"; break;
      case WindowStatus::right_open: j["window_status"] = "right_open"; break;
      case WindowStatus::closed_before_opening:
        j["window_status"] = "closed_before_opening";
        break;
    }
  } else {
    j["t_omega3"] = nullptr;
    j["window_status"] = nullptr;
  }
  return j;
}

}  // namespace gamepop
