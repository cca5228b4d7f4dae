#pragma once

#include <cstddef>
#include <span>

// Array kernels for the curve-evaluation and likelihood inner loops. Each
// kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant; the dispatched entry points pick one at startup based on cpuid.
// The scalar versions are the semantic reference: SIMD variants are
// equivalence-tested against them (see tests/test_kernels.cpp).
//
// Reductions use a fixed summation order per lane count, so results are
// reproducible run-to-run on the same machine.

namespace gamepop::kernels {

struct CpuFeatures {
  bool avx2 = false;
};

const CpuFeatures& cpu_features();

// True when the dispatched entry points route to the AVX2 variants.
bool dispatch_uses_avx2();

// Test/benchmark hook: force the scalar lane regardless of cpu features.
// Honors the GAMEPOP_NO_AVX2 environment variable at startup as well.
void force_scalar(bool on);

// --- dispatched entry points ---------------------------------------------

// out[i] = K / (1 + exp(-r (t[i] - t0)))
void logistic_curve(std::span<const double> t, double cap, double rate, double t_mid,
                    std::span<double> out);

// out[i] = p_peak * exp(-mu (t[i] - t_peak))
void exp_decay_curve(std::span<const double> t, double p_peak, double t_peak, double mu,
                     std::span<double> out);

// out[i] = p_peak * exp(-((t[i] - t_peak)/theta)^k)
void weibull_decay_curve(std::span<const double> t, double p_peak, double t_peak, double theta,
                         double k, std::span<double> out);

// out[i] = p_peak * (1 + (t[i] - t_peak)/s)^(-a)
void power_law_decay_curve(std::span<const double> t, double p_peak, double t_peak, double a,
                           double s, std::span<double> out);

// out[i] = p_peak * S_LN(t[i] - t_peak), log-normal survival. erfc-based;
// scalar on every lane (no vector erfc is provided).
void log_normal_decay_curve(std::span<const double> t, double p_peak, double t_peak, double m_ln,
                            double s_ln, std::span<double> out);

// sum over i of log(x[i])
double sum_log(std::span<const double> x);

// sum over i of ((obs[i] - pred[i]) / pred[i])^2 — proportional-noise residuals
double sum_sq_rel_residual(std::span<const double> obs, std::span<const double> pred);

// sum over i of (log(obs[i]) - log(pred[i]))^2 — log-scale residuals
double sum_sq_log_ratio(std::span<const double> obs, std::span<const double> pred);

// --- per-lane implementations (exposed for equivalence tests) -------------

namespace scalar {
void logistic_curve(std::span<const double> t, double cap, double rate, double t_mid,
                    std::span<double> out);
void exp_decay_curve(std::span<const double> t, double p_peak, double t_peak, double mu,
                     std::span<double> out);
void weibull_decay_curve(std::span<const double> t, double p_peak, double t_peak, double theta,
                         double k, std::span<double> out);
void power_law_decay_curve(std::span<const double> t, double p_peak, double t_peak, double a,
                           double s, std::span<double> out);
void log_normal_decay_curve(std::span<const double> t, double p_peak, double t_peak, double m_ln,
                            double s_ln, std::span<double> out);
double sum_log(std::span<const double> x);
double sum_sq_rel_residual(std::span<const double> obs, std::span<const double> pred);
double sum_sq_log_ratio(std::span<const double> obs, std::span<const double> pred);
}  // namespace scalar

#if defined(GAMEPOP_HAVE_AVX2)
namespace avx2 {
void logistic_curve(std::span<const double> t, double cap, double rate, double t_mid,
                    std::span<double> out);
void exp_decay_curve(std::span<const double> t, double p_peak, double t_peak, double mu,
                     std::span<double> out);
void weibull_decay_curve(std::span<const double> t, double p_peak, double t_peak, double theta,
                         double k, std::span<double> out);
void power_law_decay_curve(std::span<const double> t, double p_peak, double t_peak, double a,
                           double s, std::span<double> out);
double sum_log(std::span<const double> x);
double sum_sq_rel_residual(std::span<const double> obs, std::span<const double> pred);
double sum_sq_log_ratio(std::span<const double> obs, std::span<const double> pred);
}  // namespace avx2
#endif

}  // namespace gamepop::kernels
