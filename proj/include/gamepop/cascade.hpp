#pragma once

#include <vector>

namespace gamepop {

// Sub-critical departure cascade: per-capita hazard alpha_d (phi/P)^gamma for
// 0 < P < phi. gamma > 1 is required at construction; that is what makes the
// collapse reach zero in finite time instead of decaying asymptotically.
struct CascadeParams {
  double alpha_d;  // baseline departure parameter (1/day)
  double gamma;    // cascade exponent, > 1
  double phi;      // critical-mass threshold (players)
  CascadeParams(double alpha_d, double gamma, double phi);
};

enum class CascadeMethod { closed_form, rk4 };

struct CascadeTrajectory {
  std::vector<std::pair<double, double>> points;  // (t, pop), strictly decreasing pop
  double t_collapse = 0.0;
  CascadeMethod method = CascadeMethod::rk4;
};

// Per-capita departure hazard at population pop. Domain 0 < pop <= phi; the
// boundary value phi is the limit alpha_d. pop > phi is rejected: the hazard
// model is sub-critical only.
double departure_hazard(const CascadeParams& params, double pop);

// T_c = t0 + pop0^gamma / (gamma alpha_d phi^gamma), the separable solution
// of dP/dt = -alpha_d phi^gamma P^(1-gamma). Requires 0 < pop0 < phi.
double collapse_time_closed_form(const CascadeParams& params, double t0, double pop0);

// Fixed-step RK4 on the collapse ODE. Integration stops when pop <= floor or
// when the remaining analytic time-to-zero from the current state is shorter
// than one step (the vector field is singular at 0); t_collapse is then the
// closed form restarted at the last state. The trajectory ends with an
// appended (t_collapse, 0) sample.
CascadeTrajectory integrate_cascade(const CascadeParams& params, double t0, double pop0,
                                    double step, double floor);

}  // namespace gamepop
