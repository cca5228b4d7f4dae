#pragma once

#include <cmath>

// Single-point curve formulas shared by the scalar kernels and the
// point-evaluation API in models.hpp. Keeping one definition guarantees the
// array path and the scalar API agree bit-for-bit.

namespace gamepop::detail {

inline double logistic_at(double t, double cap, double rate, double t_mid) {
  return cap / (1.0 + std::exp(-rate * (t - t_mid)));
}

inline double exp_decay_at(double t, double p_peak, double t_peak, double mu) {
  return p_peak * std::exp(-mu * (t - t_peak));
}

inline double weibull_decay_at(double t, double p_peak, double t_peak, double theta, double k) {
  const double x = (t - t_peak) / theta;
  return p_peak * std::exp(-std::pow(x, k));
}

inline double power_law_decay_at(double t, double p_peak, double t_peak, double a, double s) {
  return p_peak * std::pow(1.0 + (t - t_peak) / s, -a);
}

// Log-normal survival S(x) = P(X > x) for X ~ LogNormal(m_ln, s_ln), with
// S(0) = 1 so the curve anchors at p_peak like the other decay families.
inline double log_normal_survival(double x, double m_ln, double s_ln) {
  if (x <= 0.0) return 1.0;
  const double z = (std::log(x) - m_ln) / (s_ln * 1.4142135623730951);
  return 0.5 * std::erfc(z);
}

inline double log_normal_decay_at(double t, double p_peak, double t_peak, double m_ln,
                                  double s_ln) {
  return p_peak * log_normal_survival(t - t_peak, m_ln, s_ln);
}

}  // namespace gamepop::detail
