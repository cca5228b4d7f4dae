#include "gamepop/models.hpp"

#include <cmath>

#include "gamepop/detail/curve_math.hpp"
#include "gamepop/errors.hpp"
#include "gamepop/kernels.hpp"

namespace gamepop {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ValidationError(msg);
}

constexpr double kLn2 = 0.6931471805599453094172321;

}  // namespace

LogisticParams::LogisticParams(double K_, double r_, double t0_) : K(K_), r(r_), t0(t0_) {
  require(K > 0, "logistic: K must be > 0");
  require(r > 0, "logistic: r must be > 0");
  require(std::isfinite(t0), "logistic: t0 must be finite");
}

BassParams::BassParams(double p_, double q_, double m_) : p(p_), q(q_), m_market(m_) {
  require(p > 0, "bass: p must be > 0");
  require(q >= 0, "bass: q must be >= 0");
  require(m_market > 0, "bass: m_market must be > 0");
}

ExponentialDecayParams::ExponentialDecayParams(double p_peak_, double t_peak_, double mu_)
    : p_peak(p_peak_), t_peak(t_peak_), mu(mu_) {
  require(p_peak > 0, "exponential decay: p_peak must be > 0");
  require(mu > 0, "exponential decay: mu must be > 0");
  require(std::isfinite(t_peak), "exponential decay: t_peak must be finite");
}

WeibullDecayParams::WeibullDecayParams(double p_peak_, double t_peak_, double theta_, double k_)
    : p_peak(p_peak_), t_peak(t_peak_), theta(theta_), k(k_) {
  require(p_peak > 0, "weibull decay: p_peak must be > 0");
  require(theta > 0, "weibull decay: theta must be > 0");
  require(k > 0, "weibull decay: k must be > 0");
  require(std::isfinite(t_peak), "weibull decay: t_peak must be finite");
}

PowerLawDecayParams::PowerLawDecayParams(double p_peak_, double t_peak_, double a_, double s_)
    : p_peak(p_peak_), t_peak(t_peak_), a(a_), s(s_) {
  require(p_peak > 0, "power-law decay: p_peak must be > 0");
  require(a > 0, "power-law decay: a must be > 0");
  require(s > 0, "power-law decay: s must be > 0");
  require(std::isfinite(t_peak), "power-law decay: t_peak must be finite");
}

LogNormalDecayParams::LogNormalDecayParams(double p_peak_, double t_peak_, double m_ln_,
                                           double s_ln_)
    : p_peak(p_peak_), t_peak(t_peak_), m_ln(m_ln_), s_ln(s_ln_) {
  require(p_peak > 0, "log-normal decay: p_peak must be > 0");
  require(s_ln > 0, "log-normal decay: s_ln must be > 0");
  require(std::isfinite(m_ln), "log-normal decay: m_ln must be finite");
  require(std::isfinite(t_peak), "log-normal decay: t_peak must be finite");
}

NetworkUtilityParams::NetworkUtilityParams(double alpha_u_, double beta_)
    : alpha_u(alpha_u_), beta(beta_) {
  require(alpha_u > 0, "network utility: alpha_u must be > 0");
  require(beta > 0, "network utility: beta must be > 0");
}

BiphasicParams::BiphasicParams(LogisticParams growth_, DecayParams decay_, double t_peak_)
    : growth(growth_), decay(decay_), t_peak(t_peak_) {
  const double g = eval_logistic(growth, t_peak);
  const double d = eval_decay(decay, std::max(t_peak, decay_t_peak(decay)));
  require(decay_t_peak(decay) == t_peak, "biphasic: decay branch t_peak must equal joint t_peak");
  if (std::abs(g - d) > 1e-9 * std::max(std::abs(g), std::abs(d)))
    throw ValidationError("biphasic: growth and decay branches disagree at t_peak");
}

double eval_logistic(const LogisticParams& params, double t) {
  return detail::logistic_at(t, params.K, params.r, params.t0);
}

double eval_bass_cumulative(const BassParams& params, double t) {
  if (!(t >= 0)) throw ValidationError("bass: t must be >= 0");
  const double decay = std::exp(-(params.p + params.q) * t);
  const double fraction = (1.0 - decay) / (1.0 + (params.q / params.p) * decay);
  return params.m_market * fraction;
}

double eval_decay(const DecayParams& params, double t) {
  const double t_peak = decay_t_peak(params);
  if (t < t_peak) throw ValidationError("eval_decay: t must be >= t_peak");
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialDecayParams>)
          return detail::exp_decay_at(t, p.p_peak, p.t_peak, p.mu);
        else if constexpr (std::is_same_v<T, WeibullDecayParams>)
          return detail::weibull_decay_at(t, p.p_peak, p.t_peak, p.theta, p.k);
        else if constexpr (std::is_same_v<T, PowerLawDecayParams>)
          return detail::power_law_decay_at(t, p.p_peak, p.t_peak, p.a, p.s);
        else
          return detail::log_normal_decay_at(t, p.p_peak, p.t_peak, p.m_ln, p.s_ln);
      },
      params);
}

double eval_biphasic(const BiphasicParams& params, double t) {
  if (t <= params.t_peak) return eval_logistic(params.growth, t);
  return eval_decay(params.decay, t);
}

void eval_logistic_grid(const LogisticParams& params, std::span<const double> t,
                        std::span<double> out) {
  kernels::logistic_curve(t, params.K, params.r, params.t0, out);
}

void eval_decay_grid(const DecayParams& params, std::span<const double> t,
                     std::span<double> out) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialDecayParams>)
          kernels::exp_decay_curve(t, p.p_peak, p.t_peak, p.mu, out);
        else if constexpr (std::is_same_v<T, WeibullDecayParams>)
          kernels::weibull_decay_curve(t, p.p_peak, p.t_peak, p.theta, p.k, out);
        else if constexpr (std::is_same_v<T, PowerLawDecayParams>)
          kernels::power_law_decay_curve(t, p.p_peak, p.t_peak, p.a, p.s, out);
        else
          kernels::log_normal_decay_curve(t, p.p_peak, p.t_peak, p.m_ln, p.s_ln, out);
      },
      params);
}

double bisect_root(double lo, double hi, double f_lo, double f_hi,
                   const std::function<double(double)>& f, double rel_tol) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) throw NumericError("bisect_root: no sign change on bracket");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double half_life(const DecayParams& params) {
  if (const auto* e = std::get_if<ExponentialDecayParams>(&params)) return kLn2 / e->mu;
  if (const auto* w = std::get_if<WeibullDecayParams>(&params))
    return w->theta * std::pow(kLn2, 1.0 / w->k);

  // power-law / log-normal: bracket and bisect P(t_peak + tau) = p_peak / 2
  const double p_peak = decay_p_peak(params);
  const double t_peak = decay_t_peak(params);
  const auto deficit = [&](double tau) { return eval_decay(params, t_peak + tau) - 0.5 * p_peak; };
  double hi = 1.0;
  double f_hi = deficit(hi);
  while (f_hi > 0) {
    hi *= 2.0;
    if (hi > 1e18) throw NumericError("half_life: no halving found");
    f_hi = deficit(hi);
  }
  return bisect_root(0.0, hi, 0.5 * p_peak, f_hi, deficit, 1e-9);
}

double network_utility(const NetworkUtilityParams& params, double pop) {
  if (!(pop >= 0)) throw ValidationError("network_utility: pop must be >= 0");
  if (pop == 0.0) return 0.0;
  return params.alpha_u * std::pow(pop, params.beta);
}

double utility_loss_rate(const NetworkUtilityParams& params, double pop, double dpop_dt) {
  if (pop == 0.0 && params.beta < 1.0)
    throw ValidationError("utility_loss_rate: singular at pop = 0 for beta < 1");
  if (!(pop > 0)) throw ValidationError("utility_loss_rate: pop must be > 0");
  return params.alpha_u * params.beta * std::pow(pop, params.beta - 1.0) * dpop_dt;
}

std::string family_name(Family family) {
  switch (family) {
    case Family::logistic: return "logistic";
    case Family::bass: return "bass";
    case Family::exponential: return "exponential";
    case Family::weibull: return "weibull";
    case Family::power_law: return "power_law";
    case Family::log_normal: return "log_normal";
    case Family::biphasic: return "biphasic";
  }
  return "unknown";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "logistic") return Family::logistic;
  if (name == "bass") return Family::bass;
  if (name == "exponential" || name == "exp") return Family::exponential;
  if (name == "weibull") return Family::weibull;
  if (name == "power_law" || name == "powerlaw") return Family::power_law;
  if (name == "log_normal" || name == "lognormal") return Family::log_normal;
  if (name == "biphasic") return Family::biphasic;
  return std::nullopt;
}

Family decay_family(const DecayParams& params) {
  switch (params.index()) {
    case 0: return Family::exponential;
    case 1: return Family::weibull;
    case 2: return Family::power_law;
    default: return Family::log_normal;
  }
}

double decay_p_peak(const DecayParams& params) {
  return std::visit([](const auto& p) { return p.p_peak; }, params);
}

double decay_t_peak(const DecayParams& params) {
  return std::visit([](const auto& p) { return p.t_peak; }, params);
}

}  // namespace gamepop
