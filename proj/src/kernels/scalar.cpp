#include <cmath>
#include <cstddef>

#include "gamepop/detail/curve_math.hpp"
#include "gamepop/kernels.hpp"

namespace gamepop::kernels::scalar {

void logistic_curve(std::span<const double> t, double cap, double rate, double t_mid,
                    std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = detail::logistic_at(t[i], cap, rate, t_mid);
}

void exp_decay_curve(std::span<const double> t, double p_peak, double t_peak, double mu,
                     std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = detail::exp_decay_at(t[i], p_peak, t_peak, mu);
}

void weibull_decay_curve(std::span<const double> t, double p_peak, double t_peak, double theta,
                         double k, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = detail::weibull_decay_at(t[i], p_peak, t_peak, theta, k);
}

void power_law_decay_curve(std::span<const double> t, double p_peak, double t_peak, double a,
                           double s, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = detail::power_law_decay_at(t[i], p_peak, t_peak, a, s);
}

void log_normal_decay_curve(std::span<const double> t, double p_peak, double t_peak, double m_ln,
                            double s_ln, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = detail::log_normal_decay_at(t[i], p_peak, t_peak, m_ln, s_ln);
}

double sum_log(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += std::log(v);
  return acc;
}

double sum_sq_rel_residual(std::span<const double> obs, std::span<const double> pred) {
  double acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = (obs[i] - pred[i]) / pred[i];
    acc += r * r;
  }
  return acc;
}

double sum_sq_log_ratio(std::span<const double> obs, std::span<const double> pred) {
  double acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = std::log(obs[i]) - std::log(pred[i]);
    acc += r * r;
  }
  return acc;
}

}  // namespace gamepop::kernels::scalar
