#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace gamepop {

// Curve families. Parameters are validated at construction so downstream
// evaluation never has to re-check domains.

struct LogisticParams {
  double K;   // carrying capacity (players)
  double r;   // intrinsic growth rate (1/day)
  double t0;  // inflection time (day)
  LogisticParams(double K, double r, double t0);
};

struct BassParams {
  double p;         // innovation coefficient (1/day)
  double q;         // imitation coefficient (1/day)
  double m_market;  // market potential (players)
  BassParams(double p, double q, double m_market);
};

struct ExponentialDecayParams {
  double p_peak;
  double t_peak;
  double mu;  // decay rate (1/day)
  ExponentialDecayParams(double p_peak, double t_peak, double mu);
};

struct WeibullDecayParams {
  double p_peak;
  double t_peak;
  double theta;  // scale (days)
  double k;      // shape
  WeibullDecayParams(double p_peak, double t_peak, double theta, double k);
};

// P(t) = p_peak (1 + (t - t_peak)/s)^(-a); equals p_peak at the peak like the
// other families so the baselines share the same anchor.
struct PowerLawDecayParams {
  double p_peak;
  double t_peak;
  double a;  // exponent
  double s;  // offset (days)
  PowerLawDecayParams(double p_peak, double t_peak, double a, double s);
};

// P(t) = p_peak * S_LN(t - t_peak), log-normal survival.
struct LogNormalDecayParams {
  double p_peak;
  double t_peak;
  double m_ln;  // location of log-lifetime
  double s_ln;  // scale of log-lifetime
  LogNormalDecayParams(double p_peak, double t_peak, double m_ln, double s_ln);
};

using DecayParams = std::variant<ExponentialDecayParams, WeibullDecayParams, PowerLawDecayParams,
                                 LogNormalDecayParams>;

// Logistic growth joined to a decay branch at t_peak. Construction enforces
// value continuity at the joint to 1e-9 relative.
struct BiphasicParams {
  LogisticParams growth;
  DecayParams decay;
  double t_peak;
  BiphasicParams(LogisticParams growth, DecayParams decay, double t_peak);
};

struct NetworkUtilityParams {
  double alpha_u;  // utility scale
  double beta;     // network exponent (beta = 2 is the classical case)
  NetworkUtilityParams(double alpha_u, double beta);
};

// --- evaluation ------------------------------------------------------------

double eval_logistic(const LogisticParams& params, double t);

// Closed-form Bass adoption: m_market * F(t), F(0) = 0, F(inf) = 1.
// t is time since launch (>= 0).
double eval_bass_cumulative(const BassParams& params, double t);

// Decay-branch value at t >= t_peak; throws for t < t_peak.
double eval_decay(const DecayParams& params, double t);

double eval_biphasic(const BiphasicParams& params, double t);

// Curve value over a time grid (vectorized path; decay grids must satisfy
// t >= t_peak elementwise, which callers guarantee by construction).
void eval_decay_grid(const DecayParams& params, std::span<const double> t, std::span<double> out);
void eval_logistic_grid(const LogisticParams& params, std::span<const double> t,
                        std::span<double> out);

// Time for the curve to halve from its peak. Exponential and Weibull use the
// closed forms; power-law and log-normal bracket and bisect P = p_peak/2 to
// 1e-9 relative.
double half_life(const DecayParams& params);

// U(P) = alpha_u * P^beta
double network_utility(const NetworkUtilityParams& params, double pop);

// dU/dt = alpha_u * beta * P^(beta-1) * dP/dt; singular at pop = 0 for beta < 1.
double utility_loss_rate(const NetworkUtilityParams& params, double pop, double dpop_dt);

// --- family metadata --------------------------------------------------------

enum class Family { logistic, bass, exponential, weibull, power_law, log_normal, biphasic };

std::string family_name(Family family);
std::optional<Family> family_from_name(const std::string& name);
Family decay_family(const DecayParams& params);
double decay_p_peak(const DecayParams& params);
double decay_t_peak(const DecayParams& params);

// Generic bracketing bisection: f must change sign on [lo, hi]. Refines to
// rel_tol on the abscissa. Shared by half_life, crossing projection, and the
// simulators' event refinement.
double bisect_root(double lo, double hi, double f_lo, double f_hi,
                   const std::function<double(double)>& f, double rel_tol);

}  // namespace gamepop
