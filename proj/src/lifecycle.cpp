#include "gamepop/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gamepop/errors.hpp"

namespace gamepop {

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Omega0: return "Omega0";
    case Stage::Active: return "Active";
    case Stage::Omega1: return "Omega1";
    case Stage::Omega2: return "Omega2";
    case Stage::Omega3: return "Omega3";
  }
  return "unknown";
}

int stage_order(Stage stage) {
  switch (stage) {
    case Stage::Omega0: return 0;
    case Stage::Active: return 1;
    case Stage::Omega1: return 2;
    case Stage::Omega2: return 3;
    case Stage::Omega3: return 4;
  }
  return -1;
}

void LifecycleConfig::validate() const {
  if (!(phi > 0)) throw ValidationError("lifecycle config: phi must be > 0");
  if (!(delta_coma > 0)) throw ValidationError("lifecycle config: delta_coma must be > 0");
}

void MemoryModel::validate() const {
  if (!(nu >= 0)) throw ValidationError("memory model: nu must be >= 0");
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Last-observation-carried-forward value and the start time of the current
// zero run (when the carried value is zero).
struct ObservedState {
  double players = 0.0;
  double zero_since = 0.0;
};

ObservedState observed_at(const PopulationSeries& series, double as_of) {
  const auto& pts = series.points;
  auto it = std::upper_bound(pts.begin(), pts.end(), as_of,
                             [](double v, const TimePoint& p) { return v < p.t; });
  // caller guarantees as_of >= first timestamp
  std::size_t idx = static_cast<std::size_t>(it - pts.begin()) - 1;
  ObservedState state;
  state.players = pts[idx].players;
  if (state.players == 0.0) {
    std::size_t first_zero = idx;
    while (first_zero > 0 && pts[first_zero - 1].players == 0.0) --first_zero;
    state.zero_since = pts[first_zero].t;
  }
  return state;
}

}  // namespace

LifecycleState classify(const PopulationSeries& series, const LifecycleConfig& config,
                        double as_of) {
  config.validate();
  if (series.empty()) throw ValidationError("classify: empty series");
  series.validate();

  LifecycleState state;
  state.as_of = as_of;

  // (1) decommissioned servers: absorbing
  if (series.t_shutdown && as_of >= *series.t_shutdown) {
    state.stage = Stage::Omega3;
    state.evidence = "servers decommissioned at t=" + format_number(*series.t_shutdown);
    return state;
  }
  // (2) pre-launch ghost machinery
  if (series.t_launch && as_of < *series.t_launch) {
    state.stage = Stage::Omega0;
    state.evidence = "as_of precedes launch at t=" + format_number(*series.t_launch);
    return state;
  }

  double players;
  double zero_since;
  if (as_of < series.first_t()) {
    if (!series.t_launch)
      throw ValidationError(
          "classify: as_of precedes the data and no launch metadata is present; a pre-launch "
          "state cannot be distinguished from a comatose one from in-simulation observables "
          "alone");
    // post-launch but before the first sample: no recorded players yet
    players = 0.0;
    zero_since = *series.t_launch;
  } else {
    const ObservedState obs = observed_at(series, as_of);
    players = obs.players;
    zero_since = obs.zero_since;
  }

  if (players == 0.0) {
    const double run_length = as_of - zero_since;
    if (run_length > config.delta_coma) {
      state.stage = Stage::Omega2;
      state.evidence = "zero players for " + format_number(run_length) +
                       " days, beyond delta_coma=" + format_number(config.delta_coma);
      return state;
    }
    state.stage = Stage::Omega1;
    state.evidence = "zero players for " + format_number(run_length) +
                     " days, within delta_coma=" + format_number(config.delta_coma);
    return state;
  }
  if (players < config.phi) {
    state.stage = Stage::Omega1;
    state.evidence = "P=" + format_number(players) + " below phi=" + format_number(config.phi) +
                     " with servers up";
    return state;
  }
  state.stage = Stage::Active;
  state.evidence =
      "P=" + format_number(players) + " at or above phi=" + format_number(config.phi);
  return state;
}

std::vector<StateInterval> classify_trajectory(const PopulationSeries& series,
                                               const LifecycleConfig& config) {
  config.validate();
  if (series.empty()) throw ValidationError("classify_trajectory: empty series");
  series.validate();

  const double start = series.first_t();
  double end = series.last_t();
  if (series.t_shutdown) end = std::max(end, *series.t_shutdown);

  // state can only change at sample times, at zero-run comas maturing, or at
  // shutdown
  std::vector<double> events;
  events.push_back(start);
  for (const auto& p : series.points)
    if (p.t > start && p.t <= end) events.push_back(p.t);
  std::optional<double> run_start;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const bool zero = series.points[i].players == 0.0;
    if (zero && !run_start) run_start = series.points[i].t;
    if (!zero) run_start.reset();
    if (run_start) {
      const double coma_at = *run_start + config.delta_coma;
      const double run_end =
          (i + 1 < series.size()) ? series.points[i + 1].t : end;
      if (coma_at > *run_start && coma_at < run_end) events.push_back(coma_at);
    }
  }
  if (series.t_shutdown) events.push_back(*series.t_shutdown);
  events.push_back(end);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<StateInterval> intervals;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const double a = events[i];
    const double b = events[i + 1];
    const LifecycleState state = classify(series, config, 0.5 * (a + b));
    if (!intervals.empty() && intervals.back().stage == state.stage) {
      intervals.back().end = b;
      continue;
    }
    StateInterval interval;
    interval.start = a;
    interval.end = b;
    interval.stage = state.stage;
    interval.evidence = state.evidence;
    intervals.push_back(interval);
  }
  if (intervals.empty()) {  // single-instant span
    const LifecycleState state = classify(series, config, start);
    intervals.push_back({start, end, state.stage, state.evidence, false});
  }
  if (series.t_shutdown && intervals.back().stage != Stage::Omega3) {
    // shutdown at or past the end of the data: the absorbing state still
    // closes the trajectory, as a degenerate interval when necessary
    const LifecycleState state = classify(series, config, std::max(end, *series.t_shutdown));
    intervals.push_back({*series.t_shutdown, std::max(end, *series.t_shutdown), state.stage,
                         state.evidence, false});
  }

  for (std::size_t i = 1; i < intervals.size(); ++i) {
    const int prev = stage_order(intervals[i - 1].stage);
    const int cur = stage_order(intervals[i].stage);
    if (cur < prev && prev >= stage_order(Stage::Omega1) && cur >= stage_order(Stage::Active)) {
      intervals[i].exogenous_intervention = true;
      intervals[i].evidence += "; backward transition (exogenous intervention required)";
    }
  }
  return intervals;
}

Trajectory memory_trajectory(const PopulationSeries& series, const MemoryModel& model) {
  model.validate();
  if (series.empty()) throw ValidationError("memory_trajectory: empty series");
  const auto& pts = series.points;
  const std::size_t n = pts.size();

  std::vector<double> recruit(n, 0.0);
  if (model.recruitment_rate) {
    if (model.recruitment_rate->size() != n)
      throw ValidationError("memory_trajectory: explicit recruitment must match the grid");
    recruit = *model.recruitment_rate;
    for (double r : recruit)
      if (!(r >= 0)) throw ValidationError("memory_trajectory: recruitment rates must be >= 0");
  } else if (n >= 2) {
    // positive part of the (centered) series derivative; population increases
    // approximate new-player inflow
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == n ? n - 1 : i + 1;
      const double slope = (pts[b].players - pts[a].players) / (pts[b].t - pts[a].t);
      recruit[i] = std::max(0.0, slope);
    }
  }

  Trajectory memory;
  memory.t.reserve(n);
  memory.value.reserve(n);
  // initial cohort: everyone present at the first sample remembers
  double m = pts.front().players;
  memory.t.push_back(pts.front().t);
  memory.value.push_back(m);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = pts[i].t - pts[i - 1].t;
    const double fade = std::exp(-model.nu * dt);
    m = m * fade + 0.5 * dt * (recruit[i - 1] * fade + recruit[i]);
    memory.t.push_back(pts[i].t);
    memory.value.push_back(m);
  }
  return memory;
}

std::optional<double> nostalgia_inversion(const Trajectory& pop, const Trajectory& memory) {
  if (pop.t.size() != memory.t.size() || pop.t.empty())
    throw ValidationError("nostalgia_inversion: trajectories must share a non-empty grid");
  for (std::size_t i = 0; i < pop.t.size(); ++i)
    if (pop.t[i] != memory.t[i])
      throw ValidationError("nostalgia_inversion: grid mismatch at index " + std::to_string(i));

  const std::size_t n = pop.t.size();
  std::size_t i = n;
  while (i > 0 && memory.value[i - 1] > pop.value[i - 1]) --i;
  // i is now the first index of the terminal run where memory > pop everywhere
  if (i == n) return std::nullopt;  // fails at the horizon
  return pop.t[i];
}

PreservationWindow preservation_window(double psi, std::optional<double> t_omega3) {
  PreservationWindow window;
  window.t_psi = psi;
  window.t_omega3 = t_omega3;
  if (!t_omega3) {
    window.status = WindowStatus::right_open;
  } else if (psi > *t_omega3) {
    window.status = WindowStatus::closed_before_opening;
  } else {
    window.status = WindowStatus::closed_interval;
  }
  return window;
}

}  // namespace gamepop
