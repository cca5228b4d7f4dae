#include "gamepop/cascade.hpp"

#include <cmath>
#include <string>

#include "gamepop/errors.hpp"

namespace gamepop {

CascadeParams::CascadeParams(double alpha_d_, double gamma_, double phi_)
    : alpha_d(alpha_d_), gamma(gamma_), phi(phi_) {
  if (!(alpha_d > 0)) throw ValidationError("cascade: alpha_d must be > 0");
  if (!(gamma > 1)) throw ValidationError("cascade: gamma must be > 1 (finite-time collapse)");
  if (!(phi > 0)) throw ValidationError("cascade: phi must be > 0");
}

double departure_hazard(const CascadeParams& params, double pop) {
  if (!(pop > 0)) throw ValidationError("departure_hazard: pop must be > 0");
  if (pop > params.phi)
    throw ValidationError("departure_hazard: pop exceeds phi; hazard is sub-critical only");
  return params.alpha_d * std::pow(params.phi / pop, params.gamma);
}

double collapse_time_closed_form(const CascadeParams& params, double t0, double pop0) {
  if (!(pop0 > 0)) throw ValidationError("collapse_time: pop0 must be > 0");
  if (!(pop0 < params.phi))
    throw ValidationError("collapse_time: pop0 must be < phi (sub-critical hypothesis)");
  const double remaining =
      std::pow(pop0, params.gamma) /
      (params.gamma * params.alpha_d * std::pow(params.phi, params.gamma));
  return t0 + remaining;
}

namespace {

// remaining analytic time to extinction from state pop
double time_to_zero(const CascadeParams& p, double pop) {
  return std::pow(pop, p.gamma) / (p.gamma * p.alpha_d * std::pow(p.phi, p.gamma));
}

}  // namespace

CascadeTrajectory integrate_cascade(const CascadeParams& params, double t0, double pop0,
                                    double step, double floor) {
  if (!(pop0 > 0) || !(pop0 < params.phi))
    throw ValidationError("integrate_cascade: require 0 < pop0 < phi");
  if (!(step > 0)) throw ValidationError("integrate_cascade: step must be > 0");
  if (!(floor > 0)) throw ValidationError("integrate_cascade: floor must be > 0");

  const double rate_const = params.alpha_d * std::pow(params.phi, params.gamma);
  const double exponent = 1.0 - params.gamma;  // negative
  const auto deriv = [&](double pop) { return -rate_const * std::pow(pop, exponent); };

  // The exact solution hits zero at t0 + time_to_zero(pop0); a first step that
  // jumps past that would drive the state negative inside the singular field.
  if (time_to_zero(params, pop0) <= step)
    throw NumericError(
        "integrate_cascade: step exceeds the collapse horizon from pop0; shrink step");

  CascadeTrajectory traj;
  traj.method = CascadeMethod::rk4;
  double t = t0;
  double pop = pop0;
  traj.points.emplace_back(t, pop);

  while (pop > floor) {
    // Once the true solution would reach zero inside the next step, stop and
    // let the closed-form extrapolation take over.
    if (time_to_zero(params, pop) <= step) break;

    const double k1 = deriv(pop);
    const double p2 = pop + 0.5 * step * k1;
    if (!(p2 > 0)) break;
    const double k2 = deriv(p2);
    const double p3 = pop + 0.5 * step * k2;
    if (!(p3 > 0)) break;
    const double k3 = deriv(p3);
    const double p4 = pop + step * k3;
    if (!(p4 > 0)) break;
    const double k4 = deriv(p4);
    const double next = pop + (step / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
    if (!(next > 0) || !(next < pop)) break;
    t += step;
    pop = next;
    traj.points.emplace_back(t, pop);
  }

  traj.t_collapse = t + time_to_zero(params, pop);
  traj.points.emplace_back(traj.t_collapse, 0.0);
  return traj;
}

}  // namespace gamepop
