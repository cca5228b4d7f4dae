#include <atomic>
#include <cstdlib>

#include "gamepop/kernels.hpp"

namespace gamepop::kernels {
namespace {

bool detect_avx2() {
#if defined(GAMEPOP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<bool> g_force_scalar{std::getenv("GAMEPOP_NO_AVX2") != nullptr};

bool use_avx2() {
  static const bool cpu_ok = detect_avx2();
  return cpu_ok && !g_force_scalar.load(std::memory_order_relaxed);
}

}  // namespace

const CpuFeatures& cpu_features() {
  static const CpuFeatures features{detect_avx2()};
  return features;
}

bool dispatch_uses_avx2() { return use_avx2(); }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

void logistic_curve(std::span<const double> t, double cap, double rate, double t_mid,
                    std::span<double> out) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::logistic_curve(t, cap, rate, t_mid, out);
#endif
  scalar::logistic_curve(t, cap, rate, t_mid, out);
}

void exp_decay_curve(std::span<const double> t, double p_peak, double t_peak, double mu,
                     std::span<double> out) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::exp_decay_curve(t, p_peak, t_peak, mu, out);
#endif
  scalar::exp_decay_curve(t, p_peak, t_peak, mu, out);
}

void weibull_decay_curve(std::span<const double> t, double p_peak, double t_peak, double theta,
                         double k, std::span<double> out) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::weibull_decay_curve(t, p_peak, t_peak, theta, k, out);
#endif
  scalar::weibull_decay_curve(t, p_peak, t_peak, theta, k, out);
}

void power_law_decay_curve(std::span<const double> t, double p_peak, double t_peak, double a,
                           double s, std::span<double> out) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::power_law_decay_curve(t, p_peak, t_peak, a, s, out);
#endif
  scalar::power_law_decay_curve(t, p_peak, t_peak, a, s, out);
}

void log_normal_decay_curve(std::span<const double> t, double p_peak, double t_peak, double m_ln,
                            double s_ln, std::span<double> out) {
  // no vector erfc; scalar on every lane
  scalar::log_normal_decay_curve(t, p_peak, t_peak, m_ln, s_ln, out);
}

double sum_log(std::span<const double> x) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::sum_log(x);
#endif
  return scalar::sum_log(x);
}

double sum_sq_rel_residual(std::span<const double> obs, std::span<const double> pred) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::sum_sq_rel_residual(obs, pred);
#endif
  return scalar::sum_sq_rel_residual(obs, pred);
}

double sum_sq_log_ratio(std::span<const double> obs, std::span<const double> pred) {
#if defined(GAMEPOP_HAVE_AVX2)
  if (use_avx2()) return avx2::sum_sq_log_ratio(obs, pred);
#endif
  return scalar::sum_sq_log_ratio(obs, pred);
}

}  // namespace gamepop::kernels
