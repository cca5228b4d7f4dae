#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gamepop/cascade.hpp"
#include "gamepop/errors.hpp"
#include "gamepop/fitting.hpp"
#include "gamepop/json_io.hpp"
#include "gamepop/lifecycle.hpp"
#include "gamepop/matchmaking.hpp"
#include "gamepop/models.hpp"
#include "gamepop/novelty.hpp"
#include "gamepop/reference_data.hpp"
#include "gamepop/timeseries.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;    // input/validation errors
constexpr int kExitNumeric = 3;  // numerical failures

struct Output {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gamepop::ValidationError("cannot write output file " + path.string());
    out << content;
    written.push_back(path.string());
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gamepop::ValidationError("cannot open file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

gamepop::PopulationSeries load_series(const std::string& path, const std::string& meta_path) {
  gamepop::PopulationSeries series = gamepop::parse_series(read_file(path));
  if (!meta_path.empty()) gamepop::apply_metadata_json(series, read_file(meta_path));
  return series;
}

std::vector<gamepop::Family> parse_families(const std::string& list) {
  std::vector<gamepop::Family> families;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto family = gamepop::family_from_name(token);
    if (!family) throw gamepop::ValidationError("unknown family '" + token + "'");
    families.push_back(*family);
  }
  if (families.empty()) throw gamepop::ValidationError("no families given");
  return families;
}

void summarize(const Output& out, const std::string& line) {
  std::cout << line << "\n";
  for (const auto& path : out.written) std::cout << "  " << path << "\n";
}

// --- fit ---------------------------------------------------------------------

struct FitArgs {
  std::string series_path;
  std::string meta_path;
  std::string families = "exponential,weibull,power_law,log_normal";
  std::string noise = "gaussian";
  std::string growth_family;
  int window = 1;
  int n_boot = 200;
  double phi = 0.0;  // 0 = no crossing projection
};

int run_fit(const FitArgs& args, std::optional<std::uint64_t> seed, Output& out) {
  using namespace gamepop;
  if (!seed) throw ValidationError("fit: --seed is required (bootstrap resampling)");
  PopulationSeries series = load_series(args.series_path, args.meta_path);
  const NoiseModel noise =
      args.noise == "lognormal" ? NoiseModel::lognormal : NoiseModel::gaussian;
  const PeakDetection peak = detect_peak(series, args.window);

  ModelComparison cmp = compare_models(series, parse_families(args.families), peak.t_peak, noise);
  for (auto& report : cmp.reports) {
    BootstrapResult boot = bootstrap_fit(series, report.family, peak.t_peak, noise, args.n_boot,
                                         *seed);
    report.bootstrap_ci = boot.ci;
    if (args.phi > 0) {
      const PhiCrossing crossing = project_phi_crossing(report, args.phi);
      report.projected_phi_crossing = crossing.day;
      report.phi_already_subcritical = crossing.already_subcritical;
    }
    out.write_json("fit_" + family_name(report.family) + ".json", fit_report_to_json(report));
    out.write("fitcurve_" + family_name(report.family) + ".csv",
              fit_curve_csv(series, report, boot.replicates));
  }
  json cmp_json = comparison_to_json(cmp);
  cmp_json["t_peak"] = peak.t_peak;
  cmp_json["p_peak"] = peak.p_peak;
  cmp_json["no_decay_phase"] = peak.no_decay_phase;
  out.write_json("comparison.json", cmp_json);

  if (!args.growth_family.empty()) {
    const auto growth = family_from_name(args.growth_family);
    if (!growth || (*growth != Family::logistic && *growth != Family::bass))
      throw ValidationError("fit: --growth must be logistic or bass");
    FitReport growth_report = fit_growth(series, *growth, peak.t_peak, noise);
    out.write_json("fit_" + family_name(*growth) + ".json", fit_report_to_json(growth_report));
    if (*growth == Family::logistic) {
      // biphasic composite: decay branch re-anchored to the growth value at
      // the joint, matching the continuity invariant
      const LogisticParams logistic = std::get<LogisticParams>(growth_report.params);
      const double joint = eval_logistic(logistic, peak.t_peak);
      for (const auto& report : cmp.reports) {
        if (report.family != cmp.winner) continue;
        const DecayParams rescaled = std::visit(
            [&](const auto& p) -> DecayParams {
              using T = std::decay_t<decltype(p)>;
              if constexpr (std::is_same_v<T, ExponentialDecayParams>)
                return ExponentialDecayParams(joint, p.t_peak, p.mu);
              else if constexpr (std::is_same_v<T, WeibullDecayParams>)
                return WeibullDecayParams(joint, p.t_peak, p.theta, p.k);
              else if constexpr (std::is_same_v<T, PowerLawDecayParams>)
                return PowerLawDecayParams(joint, p.t_peak, p.a, p.s);
              else if constexpr (std::is_same_v<T, LogNormalDecayParams>)
                return LogNormalDecayParams(joint, p.t_peak, p.m_ln, p.s_ln);
              else
                throw ValidationError("internal: decay winner expected");
            },
            report.params);
        out.write_json("biphasic.json",
                       biphasic_to_json(BiphasicParams(logistic, rescaled, peak.t_peak)));
      }
    }
  }

  summarize(out, "fit: winner " + family_name(cmp.winner) + ", " +
                     std::to_string(cmp.reports.size()) + " families fit");
  return kExitOk;
}

// --- simulate -------------------------------------------------------------------

int run_simulate(const std::string& scenario_path, Output& out) {
  using namespace gamepop;
  const SimScenario scenario =
      scenario_from_json(parse_json_text(read_file(scenario_path), "scenario"));
  const LifecycleSimResult result =
      simulate_lifecycle(scenario.growth, scenario.schedule, scenario.novelty, scenario.phi,
                         scenario.t_service, scenario.step, scenario.horizon);

  std::optional<double> t_collapse;
  if (scenario.cascade && result.t_star && !result.never_viable &&
      result.terminal_reason == TerminalReason::phi_crossing) {
    const double pop0 =
        std::min(result.trajectory.back().pop, scenario.phi * (1.0 - 1e-9));
    if (pop0 > 0) {
      const double t_rem = collapse_time_closed_form(*scenario.cascade, 0.0, pop0);
      const CascadeTrajectory cascade_traj = integrate_cascade(
          *scenario.cascade, *result.t_star, pop0, std::max(t_rem / 2000.0, 1e-12), 1.0);
      t_collapse = cascade_traj.t_collapse;
      out.write("cascade_trajectory.csv", cascade_trajectory_csv(cascade_traj));
    }
  }
  out.write("sim_trajectory.csv", sim_trajectory_csv(result));
  out.write_json("sim_summary.json", sim_summary_to_json(result, t_collapse));
  summarize(out, "simulate: " + std::to_string(result.trajectory.size()) + " samples");
  return kExitOk;
}

// --- phi --------------------------------------------------------------------------

int run_phi(const std::string& profile_path, const std::string& method, int replications,
            long long pop_hi, std::optional<std::uint64_t> seed, Output& out) {
  using namespace gamepop;
  const OperationalProfile profile =
      profile_from_json(parse_json_text(read_file(profile_path), "profile"));
  ViabilityEstimate estimate;
  if (method == "analytic") {
    estimate = phi_analytic(profile);
  } else if (method == "sim") {
    if (!seed) throw ValidationError("phi: --seed is required for --method sim");
    estimate = estimate_phi_sim(profile, *seed, replications, pop_hi);
  } else {
    throw ValidationError("phi: --method must be analytic or sim");
  }
  out.write_json("phi_estimate.json", viability_to_json(estimate));
  summarize(out, "phi: " + std::to_string(estimate.phi));
  return kExitOk;
}

// --- classify -----------------------------------------------------------------------

int run_classify(const std::string& series_path, const std::string& meta_path,
                 const std::string& config_path, double memory_nu,
                 const std::string& as_of_text, Output& out) {
  using namespace gamepop;
  PopulationSeries series = load_series(series_path, meta_path);
  const LifecycleConfig config =
      lifecycle_config_from_json(parse_json_text(read_file(config_path), "lifecycle config"));

  if (!as_of_text.empty()) {  // point query
    double as_of;
    std::size_t consumed = 0;
    try {
      as_of = std::stod(as_of_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != as_of_text.size()) as_of = parse_date_to_days(as_of_text);
    const LifecycleState state = classify(series, config, as_of);
    json j;
    j["as_of"] = state.as_of;
    j["state"] = stage_name(state.stage);
    j["evidence"] = state.evidence;
    out.write_json("state.json", j);
  }

  const auto intervals = classify_trajectory(series, config);
  out.write_json("classification.json", intervals_to_json(intervals));

  if (memory_nu >= 0) {
    MemoryModel model;
    model.nu = memory_nu;
    const Trajectory memory = memory_trajectory(series, model);
    Trajectory pop;
    for (const auto& p : series.points) {
      pop.t.push_back(p.t);
      pop.value.push_back(p.players);
    }
    const std::optional<double> psi = nostalgia_inversion(pop, memory);
    std::optional<PreservationWindow> window;
    if (psi) window = preservation_window(*psi, series.t_shutdown);
    out.write_json("psi.json", preservation_to_json(psi, window));
  }
  summarize(out, "classify: " + std::to_string(intervals.size()) + " intervals, final state " +
                     stage_name(intervals.back().stage));
  return kExitOk;
}

// --- presets -----------------------------------------------------------------------

int run_presets(const std::string& format, Output& out) {
  using namespace gamepop;
  if (format == "csv") {
    std::ostringstream genre;
    genre << "genre,tau_lo_months,tau_hi_months,primary_driver\n";
    for (const auto& row : genre_half_life_table())
      genre << row.genre << ',' << format_csv_number(row.tau_lo_months) << ','
            << (row.tau_hi_months ? format_csv_number(*row.tau_hi_months) : std::string())
            << ',' << row.primary_driver << '\n';
    out.write("presets_genre_half_life.csv", genre.str());

    std::ostringstream phi;
    phi << "label,phi\n";
    for (const auto& [label, value, note] : phi_reference_table())
      phi << label << ',' << value << '\n';
    out.write("presets_phi_reference.csv", phi.str());

    std::ostringstream cases;
    cases << "title,p_peak,tau_months,decay,terminal_state\n";
    for (const auto& row : case_decay_table())
      cases << row.title << ',' << format_csv_number(row.p_peak) << ','
            << format_csv_number(row.tau_months) << ',' << row.decay_label << ','
            << row.terminal_state << '\n';
    out.write("presets_case_parameters.csv", cases.str());
  } else {
    json j;
    json genres = json::array();
    for (const auto& row : genre_half_life_table())
      genres.push_back({{"genre", row.genre},
                        {"tau_lo_months", row.tau_lo_months},
                        {"tau_hi_months",
                         row.tau_hi_months ? json(*row.tau_hi_months) : json(nullptr)},
                        {"primary_driver", row.primary_driver}});
    j["genre_half_life"] = genres;
    json phis = json::array();
    for (const auto& [label, value, note] : phi_reference_table())
      phis.push_back({{"label", label}, {"phi", value}, {"note", note}});
    j["phi_reference"] = phis;
    json cases = json::array();
    for (const auto& row : case_decay_table())
      cases.push_back({{"title", row.title},
                       {"p_peak", row.p_peak},
                       {"tau_months", row.tau_months},
                       {"decay", row.decay_label},
                       {"terminal_state", row.terminal_state}});
    j["case_parameters"] = cases;
    out.write_json("presets.json", j);
  }
  summarize(out, "presets: reference tables written");
  return kExitOk;
}

// --- holdout -----------------------------------------------------------------------

int run_holdout(const std::string& series_path, const std::string& meta_path,
                const std::string& family_name_arg, double train_frac, int window,
                const std::string& noise, Output& out) {
  using namespace gamepop;
  PopulationSeries series = load_series(series_path, meta_path);
  const auto family = family_from_name(family_name_arg);
  if (!family) throw ValidationError("holdout: unknown family '" + family_name_arg + "'");
  const NoiseModel noise_model =
      noise == "lognormal" ? NoiseModel::lognormal : NoiseModel::gaussian;
  const PeakDetection peak = detect_peak(series, window);
  const HoldoutResult result =
      holdout_evaluate(series, *family, peak.t_peak, noise_model, train_frac);
  json j;
  j["family"] = family_name(*family);
  j["train_frac"] = train_frac;
  j["n_train"] = result.n_train;
  j["n_test"] = result.n_test;
  j["rmse"] = result.rmse;
  j["fit"] = fit_report_to_json(result.fit);
  out.write_json("holdout.json", j);
  summarize(out, "holdout: rmse " + std::to_string(result.rmse) + " on " +
                     std::to_string(result.n_test) + " held-out points");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"population lifecycle toolkit for online multiplayer games"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "json";
  app.add_option("--seed", seed, "seed for stochastic commands (required there)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "output format for presets")
      ->check(CLI::IsMember({"json", "csv"}));

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit decay families and compare by AIC");
  fit_cmd->add_option("--series", fit_args.series_path, "population CSV")->required();
  fit_cmd->add_option("--meta", fit_args.meta_path, "metadata sidecar JSON");
  fit_cmd->add_option("--families", fit_args.families, "comma-separated decay families");
  fit_cmd->add_option("--noise", fit_args.noise, "noise model")
      ->check(CLI::IsMember({"gaussian", "lognormal"}));
  fit_cmd->add_option("--growth", fit_args.growth_family, "also fit a growth family");
  fit_cmd->add_option("--window", fit_args.window, "peak-detection smoothing window");
  fit_cmd->add_option("--boot", fit_args.n_boot, "bootstrap replicates (>= 100)");
  fit_cmd->add_option("--phi", fit_args.phi, "project the crossing below this threshold");

  std::string scenario_path;
  auto* sim_cmd = app.add_subcommand("simulate", "run the coupled lifecycle simulation");
  sim_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();

  std::string profile_path;
  std::string phi_method = "analytic";
  int replications = 50;
  long long pop_hi = 1000000;
  auto* phi_cmd = app.add_subcommand("phi", "estimate the critical-mass threshold");
  phi_cmd->add_option("--profile", profile_path, "operational profile JSON")->required();
  phi_cmd->add_option("--method", phi_method, "analytic or sim");
  phi_cmd->add_option("--replications", replications, "simulation replications");
  phi_cmd->add_option("--pop-hi", pop_hi, "upper bound for the binary search");

  std::string cls_series, cls_meta, cls_config, cls_as_of;
  double memory_nu = -1.0;
  auto* cls_cmd = app.add_subcommand("classify", "classify the lifecycle trajectory");
  cls_cmd->add_option("--series", cls_series, "population CSV")->required();
  cls_cmd->add_option("--meta", cls_meta, "metadata sidecar JSON");
  cls_cmd->add_option("--config", cls_config, "lifecycle config JSON")->required();
  cls_cmd->add_option("--as-of", cls_as_of, "single-point state query (day number or date)");
  cls_cmd->add_option("--memory-nu", memory_nu,
                      "forgetting rate; also emit the nostalgia inversion and window");

  auto* presets_cmd = app.add_subcommand("presets", "write the packaged reference tables");

  std::string ho_series, ho_meta, ho_family = "exponential", ho_noise = "gaussian";
  double train_frac = 0.7;
  int ho_window = 1;
  auto* ho_cmd = app.add_subcommand("holdout", "train/test split evaluation");
  ho_cmd->add_option("--series", ho_series, "population CSV")->required();
  ho_cmd->add_option("--meta", ho_meta, "metadata sidecar JSON");
  ho_cmd->add_option("--family", ho_family, "decay family");
  ho_cmd->add_option("--train-frac", train_frac, "fraction of post-peak points to train on");
  ho_cmd->add_option("--window", ho_window, "peak-detection smoothing window");
  ho_cmd->add_option("--noise", ho_noise, "noise model")
      ->check(CLI::IsMember({"gaussian", "lognormal"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  Output out{fs::path(out_dir), {}};
  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(fit_args, seed, out);
    if (app.got_subcommand(sim_cmd)) return run_simulate(scenario_path, out);
    if (app.got_subcommand(phi_cmd))
      return run_phi(profile_path, phi_method, replications, pop_hi, seed, out);
    if (app.got_subcommand(cls_cmd))
      return run_classify(cls_series, cls_meta, cls_config, memory_nu, cls_as_of, out);
    if (app.got_subcommand(presets_cmd)) return run_presets(format, out);
    if (app.got_subcommand(ho_cmd))
      return run_holdout(ho_series, ho_meta, ho_family, train_frac, ho_window, ho_noise, out);
  } catch (const gamepop::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const gamepop::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
