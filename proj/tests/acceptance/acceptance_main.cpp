// Acceptance suite: nine go/no-go checks run end to end against the library
// and the CLI, each printed as a single PASS/FAIL line. Exit status is the
// number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

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
#include "gamepop/rng.hpp"
#include "gamepop/timeseries.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gamepop;

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

ModelParams to_model_params(const DecayParams& params) {
  return std::visit([](const auto& p) -> ModelParams { return ModelParams(p); }, params);
}

PopulationSeries synth_decay(const DecayParams& params, int n, double noise_sd,
                             std::uint64_t seed) {
  Rng rng(seed);
  PopulationSeries series;
  const double t_peak = decay_t_peak(params);
  for (int i = 0; i < n; ++i) {
    const double t = t_peak + i;
    const double clean = eval_decay(params, t);
    series.points.push_back({t, std::max(clean * (1.0 + noise_sd * rng.normal()), 0.0)});
  }
  return series;
}

// ---------------------------------------------------------------------------
// criterion 1: closed-form vs numeric collapse time
// ---------------------------------------------------------------------------

void criterion_collapse(Check& check) {
  const auto start = std::chrono::steady_clock::now();

  const CascadeParams worked(0.1, 2.0, 1000.0);
  const double closed = collapse_time_closed_form(worked, 0.0, 100.0);
  check.require(closed == 0.05, "worked example closed form is not exactly 0.05");
  const auto traj = integrate_cascade(worked, 0.0, 100.0, 1e-5, 1e-3);
  check.require(std::abs(traj.t_collapse - 0.05) < 1e-6,
                "worked example RK4 misses 0.05 by more than 1e-6");

  Rng rng(90210);
  for (int i = 0; i < 1000; ++i) {
    const double phi = rng.uniform(100.0, 1e6);
    const CascadeParams params(rng.uniform(0.01, 1.0), rng.uniform(1.1, 3.5), phi);
    const double pop0 = phi * rng.uniform(0.05, 0.95);
    const double t0 = rng.uniform(0.0, 50.0);
    const double reference = collapse_time_closed_form(params, t0, pop0);
    const auto numeric =
        integrate_cascade(params, t0, pop0, (reference - t0) / 2000.0, pop0 * 1e-4);
    if (rel_err(numeric.t_collapse, reference) >= 1e-5) {
      check.require(false, "random draw " + std::to_string(i) + " exceeds 1e-5 relative");
      return;
    }
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + "s exceeds 10s");
}

// ---------------------------------------------------------------------------
// criterion 2: half-life identities and the packaged case table
// ---------------------------------------------------------------------------

double root_find_half_life(const DecayParams& params) {
  // independent of half_life(): plain bisection on the curve itself
  const double p_peak = decay_p_peak(params);
  const double t_peak = decay_t_peak(params);
  double lo = 0.0, hi = 1.0;
  while (eval_decay(params, t_peak + hi) > 0.5 * p_peak) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval_decay(params, t_peak + mid) > 0.5 * p_peak ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion_half_life(Check& check) {
  Rng rng(77001);
  for (int i = 0; i < 100; ++i) {
    const ExponentialDecayParams exp_params(rng.uniform(100.0, 1e6), 0.0,
                                            rng.uniform(1e-3, 0.5));
    check.require(rel_err(half_life(exp_params), root_find_half_life(exp_params)) < 1e-8,
                  "exponential half-life identity failed");
    const WeibullDecayParams weib_params(rng.uniform(100.0, 1e6), 0.0,
                                         rng.uniform(1.0, 400.0), rng.uniform(0.4, 3.5));
    check.require(rel_err(half_life(weib_params), root_find_half_life(weib_params)) < 1e-8,
                  "weibull half-life identity failed");
  }

  // tau -> mu -> tau round trip for the packaged case parameters
  for (const auto& row : case_decay_table()) {
    const double mu_per_month = kLn2 / row.tau_months;
    const double recovered = half_life(ExponentialDecayParams(row.p_peak, 0.0, mu_per_month));
    check.require(std::abs(recovered - row.tau_months) < 0.05,
                  row.title + " half-life fails to round-trip within rounding");
  }
  check.require(case_decay_table().size() == 5, "case table must carry five titles");
}

// ---------------------------------------------------------------------------
// criterion 3: generate-then-fit recovery and AIC selection
// ---------------------------------------------------------------------------

void criterion_fit_recovery(Check& check) {
  const auto start = std::chrono::steady_clock::now();

  struct FamilyCase {
    Family family;
    DecayParams truth;
    std::vector<std::string> names;  // parameters judged for recovery
  };
  const std::vector<FamilyCase> cases = {
      {Family::exponential, ExponentialDecayParams(151331, 0, kLn2 / 102.0), {"p_peak", "mu"}},
      {Family::weibull, WeibullDecayParams(27403, 0, 90.0, 2.0), {"p_peak", "theta", "k"}},
      {Family::power_law, PowerLawDecayParams(50000, 0, 1.5, 40.0), {"p_peak", "a", "s"}},
      {Family::log_normal, LogNormalDecayParams(40000, 0, 4.3, 0.9), {"p_peak", "m_ln", "s_ln"}},
  };

  for (const auto& fc : cases) {
    const auto truth_values = named_params(to_model_params(fc.truth));
    int recovered = 0;
    for (int seed = 0; seed < 100; ++seed) {
      const auto series = synth_decay(fc.truth, 200, 0.02, 1000 + seed);
      try {
        const FitReport report = fit_decay(series, fc.family, 0.0, NoiseModel::gaussian);
        const auto fitted = named_params(report.params);
        bool all_close = true;
        for (const auto& name : fc.names)
          all_close = all_close && rel_err(fitted.at(name), truth_values.at(name)) <= 0.10;
        recovered += all_close ? 1 : 0;
      } catch (const std::exception&) {
      }
    }
    check.require(recovered >= 90, family_name(fc.family) + " recovery only " +
                                       std::to_string(recovered) + "/100 within 10%");
  }

  // model selection: weibull k=2 data must beat exponential by AIC
  int weibull_wins = 0;
  const DecayParams selection_truth = WeibullDecayParams(27403, 0, 90.0, 2.0);
  for (int seed = 0; seed < 100; ++seed) {
    const auto series = synth_decay(selection_truth, 200, 0.02, 5000 + seed);
    const auto cmp = compare_models(series, {Family::exponential, Family::weibull}, 0.0,
                                    NoiseModel::gaussian);
    weibull_wins += cmp.winner == Family::weibull ? 1 : 0;
  }
  check.require(weibull_wins >= 95,
                "weibull selected only " + std::to_string(weibull_wins) + "/100");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(elapsed < 300.0, "runtime " + std::to_string(elapsed) + "s exceeds 5 min");
}

// ---------------------------------------------------------------------------
// criterion 4: bootstrap coverage
// ---------------------------------------------------------------------------

void criterion_bootstrap_coverage(Check& check) {
  const auto start = std::chrono::steady_clock::now();
  const double mu_true = kLn2 / 102.0;
  const DecayParams truth = ExponentialDecayParams(151331, 0, mu_true);

  int covered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto series = synth_decay(truth, 200, 0.02, 40000 + seed);
    const auto ci = bootstrap_ci(series, Family::exponential, 0.0, NoiseModel::gaussian, 200,
                                 9000 + seed);
    const auto [lo, hi] = ci.at("mu");
    covered += (lo <= mu_true && mu_true <= hi) ? 1 : 0;
  }
  check.require(covered >= 90, "coverage only " + std::to_string(covered) + "/100");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(elapsed < 600.0, "runtime " + std::to_string(elapsed) + "s exceeds 10 min");
}

// ---------------------------------------------------------------------------
// criterion 5: viability threshold consistency
// ---------------------------------------------------------------------------

void criterion_phi(Check& check) {
  OperationalProfile profile;
  profile.match_size = 10;
  profile.rho_per_hour = 0.6;
  profile.q_max_minutes = 6.0;

  const auto analytic = phi_analytic(profile);
  check.require(analytic.phi ==
                    static_cast<long long>(std::ceil(10 * 60.0 / (0.6 * 6.0) - 1e-9)),
                "analytic threshold disagrees with ceil(match_size*60/(rho*q_max))");

  const auto sim = estimate_phi_sim(profile, 2024, 50, 100000);
  check.require(std::abs(double(sim.phi - analytic.phi)) <= 0.05 * double(analytic.phi),
                "discrete-event estimate outside 5% of analytic at 50 replications");

  OperationalProfile constrained = profile;
  constrained.role_quota = {{"tank", 2}, {"dps", 6}, {"heal", 2}};
  constrained.role_mix = {{"tank", 0.1}, {"dps", 0.8}, {"heal", 0.1}};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto base = estimate_phi_sim(profile, seed, 20, 100000);
    const auto role = estimate_phi_sim(constrained, seed, 20, 100000);
    if (role.phi <= base.phi) {
      check.require(false, "role-constrained threshold not strictly larger at seed " +
                               std::to_string(seed));
      return;
    }
  }

  const std::uint64_t sweep_seed = 31415;
  long long prev = 1LL << 60;
  for (double q_max : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    auto p = profile;
    p.q_max_minutes = q_max;
    const auto est = estimate_phi_sim(p, sweep_seed, 20, 4000000);
    check.require(est.phi <= prev, "threshold not monotone in q_max");
    prev = est.phi;
  }
  prev = 1LL << 60;
  for (double rho : {0.15, 0.3, 0.6, 1.2, 2.4}) {
    auto p = profile;
    p.rho_per_hour = rho;
    const auto est = estimate_phi_sim(p, sweep_seed, 20, 4000000);
    check.require(est.phi <= prev, "threshold not monotone in rho");
    prev = est.phi;
  }
  prev = 0;
  for (int regions : {1, 2, 4, 8}) {
    auto p = profile;
    p.regions = regions;
    const auto est = estimate_phi_sim(p, sweep_seed, 20, 4000000);
    check.require(est.phi >= prev, "threshold not monotone in regions");
    prev = est.phi;
  }
}

// ---------------------------------------------------------------------------
// criterion 6: finite crossing times, step-size stable
// ---------------------------------------------------------------------------

void criterion_crossing(Check& check) {
  const LogisticParams growth(50.0, 1.0, -20.0);  // effectively constant at 50
  const NoveltyParams nparams(1.0, 1.0, 0.2, 0.02);

  // (a) finite service horizon
  {
    const ContentSchedule plentiful({{0.0, 1e5}}, 1e8);
    const auto result =
        simulate_lifecycle(growth, plentiful, nparams, 10.0, 90.0, 0.02, 1000.0);
    check.require(result.t_star.has_value() && *result.t_star == 90.0 &&
                      result.terminal_reason == TerminalReason::service_horizon,
                  "service-horizon branch did not terminate at t_service");
  }

  // (b) bounded content with positive decay coupling
  const ContentSchedule bounded({{0.0, 500.0}, {1.0, 0.0}}, 500.0);
  const auto coarse =
      simulate_lifecycle(growth, bounded, nparams, 10.0, std::nullopt, 0.02, 1000.0);
  check.require(coarse.t_star.has_value() && std::isfinite(*coarse.t_star) &&
                    coarse.terminal_reason == TerminalReason::phi_crossing,
                "bounded-content branch did not produce a finite crossing");

  const auto fine =
      simulate_lifecycle(growth, bounded, nparams, 10.0, std::nullopt, 0.01, 1000.0);
  check.require(coarse.t_novelty_exhaustion && fine.t_novelty_exhaustion,
                "missing exhaustion time");
  if (!check.ok) return;
  check.require(std::abs(*coarse.t_novelty_exhaustion - *fine.t_novelty_exhaustion) < 1e-4,
                "exhaustion time moves by more than 1e-4 day when the step halves");
  check.require(std::abs(*coarse.t_star - *fine.t_star) < 1e-4,
                "crossing time moves by more than 1e-4 day when the step halves");
}

// ---------------------------------------------------------------------------
// criterion 7: lifecycle classification rules
// ---------------------------------------------------------------------------

void criterion_lifecycle(Check& check) {
  LifecycleConfig config;
  config.phi = 1000.0;
  config.delta_coma = 90.0;

  // absorbing shutdown
  PopulationSeries extinct;
  extinct.points = {{0, 7571}, {30, 3000}, {60, 900}, {120, 0}, {300, 0}, {450, 0}};
  extinct.t_launch = 0.0;
  extinct.t_shutdown = 440.0;
  for (double as_of : {440.0, 500.0, 1e4})
    check.require(classify(extinct, config, as_of).stage == Stage::Omega3,
                  "shutdown state is not absorbing");
  const auto intervals = classify_trajectory(extinct, config);
  check.require(intervals.back().stage == Stage::Omega3,
                "trajectory does not end in the extinct state");

  // coma threshold at 90 days
  PopulationSeries zeros;
  zeros.points = {{0, 500}, {10, 0}, {60, 0}, {130, 0}};
  zeros.t_launch = 0.0;
  check.require(classify(zeros, config, 130.0).stage == Stage::Omega2,
                "120-day zero run should be comatose");
  PopulationSeries short_zeros;
  short_zeros.points = {{0, 500}, {10, 0}, {40, 0}};
  short_zeros.t_launch = 0.0;
  check.require(classify(short_zeros, config, 40.0).stage == Stage::Omega1,
                "30-day zero run should remain dormant");

  // relaunch spike: exactly one backward transition
  PopulationSeries relaunch;
  relaunch.points = {{0, 27403}, {60, 5000}, {120, 400},  {180, 300},
                     {240, 50953}, {300, 8000}, {360, 700}, {420, 200}};
  LifecycleConfig evolve_config;
  evolve_config.phi = 6000.0;
  int flags = 0;
  for (const auto& interval : classify_trajectory(relaunch, evolve_config))
    flags += interval.exogenous_intervention ? 1 : 0;
  check.require(flags == 1, "relaunch fixture produced " + std::to_string(flags) +
                                " backward-transition flags, expected 1");

  // metadata-free pre-start queries are refused
  PopulationSeries bare;
  bare.points = {{100, 500}, {200, 400}};
  bool refused = false;
  try {
    classify(bare, config, 50.0);
  } catch (const ValidationError&) {
    refused = true;
  }
  check.require(refused, "pre-start query without launch metadata was not refused");
}

// ---------------------------------------------------------------------------
// criterion 8: nostalgia inversion and the preservation window
// ---------------------------------------------------------------------------

void criterion_nostalgia(Check& check) {
  Trajectory pop, memory;
  for (int i = 0; i <= 16000; ++i) {
    const double t = i * 2.5e-4;  // months
    pop.t.push_back(t);
    pop.value.push_back(10000.0 * std::exp(-0.5 * t));
    memory.t.push_back(t);
    memory.value.push_back(5000.0);
  }
  const auto psi = nostalgia_inversion(pop, memory);
  check.require(psi.has_value(), "no inversion found");
  if (psi) {
    check.require(std::abs(*psi - 1.3862943611) <= 1e-3,
                  "inversion at " + std::to_string(*psi) + ", expected 1.386294 +- 1e-3");
  }

  check.require(preservation_window(10.0, 50.0).status == WindowStatus::closed_interval,
                "closed window case failed");
  check.require(preservation_window(10.0, std::nullopt).status == WindowStatus::right_open,
                "right-open window case failed");
  check.require(preservation_window(60.0, 50.0).status == WindowStatus::closed_before_opening,
                "closed-before-opening window case failed");
}

// ---------------------------------------------------------------------------
// criterion 9: seeded CLI runs are byte-identical
// ---------------------------------------------------------------------------

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void criterion_determinism(Check& check) {
  const fs::path dir = fs::temp_directory_path() / "gamepop_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(GAMEPOP_CLI_PATH) + " " + args + " > " +
                            (dir / "log.txt").string() + " 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  const auto dirs_identical = [&](const fs::path& a, const fs::path& b) {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++count;
      if (!fs::exists(b / entry.path().filename())) return false;
      if (file_bytes(entry.path()) != file_bytes(b / entry.path().filename())) return false;
    }
    return count > 0;
  };

  // fixtures
  const DecayParams truth = ExponentialDecayParams(10000, 0, kLn2 / 60.0);
  std::ofstream(dir / "series.csv") << serialize_series(synth_decay(truth, 150, 0.02, 3));
  std::ofstream(dir / "profile.json")
      << R"({"match_size": 10, "rho_per_hour": 0.6, "q_max_minutes": 6})";
  std::ofstream(dir / "scenario.json") << R"({
    "growth": {"K": 50, "r": 1.0, "t0": -20},
    "schedule": {"segments": [{"t_start": 0, "rate": 500}, {"t_start": 1, "rate": 0}], "cap": 500},
    "novelty": {"eta": 1, "h_bar": 1, "mu0": 0.2, "kappa": 0.02},
    "phi": 10, "cascade": {"alpha_d": 0.1, "gamma": 2}, "step": 0.02, "horizon": 400
  })";

  const std::string series = (dir / "series.csv").string();
  check.require(run("fit --series " + series +
                    " --families exponential,weibull --seed 42 --boot 200 --out " +
                    (dir / "fit_a").string()) == 0,
                "seeded fit run failed");
  check.require(run("fit --series " + series +
                    " --families exponential,weibull --seed 42 --boot 200 --out " +
                    (dir / "fit_b").string()) == 0,
                "second seeded fit run failed");
  check.require(dirs_identical(dir / "fit_a", dir / "fit_b"),
                "fit outputs differ between identically seeded runs");

  check.require(run("phi --profile " + (dir / "profile.json").string() +
                    " --method sim --seed 5 --replications 50 --out " +
                    (dir / "phi_a").string()) == 0,
                "seeded phi run failed");
  check.require(run("phi --profile " + (dir / "profile.json").string() +
                    " --method sim --seed 5 --replications 50 --out " +
                    (dir / "phi_b").string()) == 0,
                "second seeded phi run failed");
  check.require(dirs_identical(dir / "phi_a", dir / "phi_b"),
                "phi outputs differ between identically seeded runs");

  check.require(run("simulate --scenario " + (dir / "scenario.json").string() + " --out " +
                    (dir / "sim_a").string()) == 0,
                "simulate run failed");
  check.require(run("simulate --scenario " + (dir / "scenario.json").string() + " --out " +
                    (dir / "sim_b").string()) == 0,
                "second simulate run failed");
  check.require(dirs_identical(dir / "sim_a", dir / "sim_b"),
                "simulate outputs differ between runs");
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"closed-form vs numeric collapse time (1000 draws, <1e-5 rel, <10s)",
       criterion_collapse},
      {"half-life identities and case-table round trip", criterion_half_life},
      {"generate-then-fit recovery >=90/100 and AIC selection >=95/100 (<5min)",
       criterion_fit_recovery},
      {"bootstrap coverage >=90/100 (<10min)", criterion_bootstrap_coverage},
      {"viability threshold: sim vs analytic, role effect, monotone sweeps", criterion_phi},
      {"finite crossing times under either sufficient condition, step-stable",
       criterion_crossing},
      {"lifecycle classification rules", criterion_lifecycle},
      {"nostalgia inversion and preservation window cases", criterion_nostalgia},
      {"seeded CLI commands are byte-identical across runs", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (check.ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
         << criteria[i].name << " [" << std::fixed << std::setprecision(1) << elapsed << "s]";
    if (!check.ok) line << " -- " << check.detail;
    std::cout << line.str() << std::endl;
    failures += check.ok ? 0 : 1;
  }
  return failures;
}
