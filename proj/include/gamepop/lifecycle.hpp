#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamepop/timeseries.hpp"

namespace gamepop {

// Runtime states: Omega0 pre-launch ghost machinery, Active, Omega1 dormant
// (0 < P < phi), Omega2 comatose (zero players beyond delta_coma), Omega3
// extinct (servers decommissioned; absorbing).
enum class Stage { Omega0, Active, Omega1, Omega2, Omega3 };

std::string stage_name(Stage stage);

// Position in the canonical progression Omega0 -> Active -> Omega1 -> Omega2
// -> Omega3; used to flag backward transitions.
int stage_order(Stage stage);

struct LifecycleState {
  Stage stage = Stage::Active;
  std::string evidence;  // which rule fired
  double as_of = 0.0;
};

struct LifecycleConfig {
  double phi = 1.0;
  double delta_coma = 90.0;  // operational threshold, not derived
  std::optional<double> t_service;

  void validate() const;
};

struct StateInterval {
  double start = 0.0;
  double end = 0.0;
  Stage stage = Stage::Active;
  std::string evidence;
  // set when entering this interval moved backward in the progression;
  // such transitions require exogenous intervention
  bool exogenous_intervention = false;
};

// Cultural-memory model: exponentially forgotten recruitment integral.
// Recruitment defaults to the positive part of the series derivative plus the
// initial cohort; an explicit per-grid-point rate overrides that.
struct MemoryModel {
  double nu = 0.0;  // forgetting rate (1/day)
  std::optional<std::vector<double>> recruitment_rate;  // per series grid point

  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> value;
};

enum class WindowStatus { closed_interval, right_open, closed_before_opening };

struct PreservationWindow {
  WindowStatus status = WindowStatus::right_open;
  double t_psi = 0.0;
  std::optional<double> t_omega3;
};

// State at as_of. Rule order: shutdown, pre-launch, long zero-run, dormant,
// active. Queries before the first sample with no launch metadata are refused:
// without external metadata a pre-launch world is indistinguishable from a
// comatose one.
LifecycleState classify(const PopulationSeries& series, const LifecycleConfig& config,
                        double as_of);

// Maximal constant-state intervals covering the series span (extended to
// t_launch/t_shutdown metadata when present).
std::vector<StateInterval> classify_trajectory(const PopulationSeries& series,
                                               const LifecycleConfig& config);

// M(t) on the series grid: integral of recruitment a(tau) e^(-nu (t - tau)),
// trapezoidal, plus the initial cohort forgotten at the same rate.
Trajectory memory_trajectory(const PopulationSeries& series, const MemoryModel& model);

// Earliest grid time from which memory exceeds population at every later grid
// point; none if population is back at or above memory by the final point.
std::optional<double> nostalgia_inversion(const Trajectory& pop, const Trajectory& memory);

// Window [psi, t_omega3], right-open while servers are up. psi > t_omega3 is
// reported as closed_before_opening, never silently clamped.
PreservationWindow preservation_window(double psi, std::optional<double> t_omega3);

}  // namespace gamepop
