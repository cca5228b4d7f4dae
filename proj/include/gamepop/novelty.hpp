#pragma once

#include <optional>
#include <vector>

#include "gamepop/models.hpp"

namespace gamepop {

// Piecewise-constant content production with a finite total cap. Launch
// content is represented as a high-rate segment over a short initial
// interval, which keeps the cumulative function continuous.
struct ContentSchedule {
  struct Segment {
    double t_start;  // day
    double rate;     // content-units/day, >= 0
  };
  std::vector<Segment> segments;  // strictly increasing t_start
  double cap;                     // finite total content bound

  ContentSchedule(std::vector<Segment> segments, double cap);
};

struct NoveltyParams {
  double eta;    // exposure normalization (content-units per player-hour)
  double h_bar;  // mean session duration (hours/day per player)
  double mu0;    // baseline decay rate once novelty is exhausted (1/day)
  double kappa;  // novelty sensitivity coefficient (1/content-unit)
  NoveltyParams(double eta, double h_bar, double mu0, double kappa);
};

enum class TerminalReason { phi_crossing, service_horizon, horizon_end };

struct SimSample {
  double t;
  double pop;
  double content;   // C(t)
  double exposure;  // E(t)
  double novelty;   // N(t) = C - eta E
  double mu;        // active decay rate
};

struct LifecycleSimResult {
  std::vector<SimSample> trajectory;
  std::optional<double> t_novelty_exhaustion;  // first time N <= 0
  std::optional<double> t_star;                // first time pop drops below phi
  TerminalReason terminal_reason = TerminalReason::horizon_end;
  // phi >= K: the population can never reach the viability threshold at all.
  // Reported as t_star = 0 with this flag rather than as an exception.
  bool never_viable = false;
};

// Integral of the production rate, clamped at the cap; non-decreasing.
double cumulative_content(const ContentSchedule& schedule, double t);

// Trapezoidal integral of pop(tau) * h_bar over [0, t] on the sampled
// trajectory grid; t must lie inside the trajectory domain.
double exposure(const std::vector<std::pair<double, double>>& pop_trajectory, double h_bar,
                double t);

// N = C - eta E; may be negative once exposure outruns content.
double novelty(double content, double eta, double exposure_value);

// mu(N): 0 while novelty remains, mu0 (1 + kappa |N|) once exhausted.
double coupled_decay_rate(const NoveltyParams& params, double novelty_value);

// Coupled simulation: logistic growth while N > 0, then dP/dt = -mu(N) P with
// exposure co-integrated (RK4). t_novelty_exhaustion and t_star are refined
// between grid points to 1e-6 day. A finite service horizon terminates the
// run at t_service per the service-discontinuation assumption.
LifecycleSimResult simulate_lifecycle(const LogisticParams& growth,
                                      const ContentSchedule& schedule,
                                      const NoveltyParams& nparams, double phi,
                                      std::optional<double> t_service, double step,
                                      double horizon);

}  // namespace gamepop
