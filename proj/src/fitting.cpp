#include "gamepop/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gamepop/errors.hpp"
#include "gamepop/kernels.hpp"
#include "gamepop/rng.hpp"

namespace gamepop {
namespace {

constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kPenalty = 1e300;

// ---------------------------------------------------------------------------
// peak detection
// ---------------------------------------------------------------------------

std::vector<double> moving_average(const std::vector<TimePoint>& pts, int window) {
  const int n = static_cast<int>(pts.size());
  const int lo_span = (window - 1) / 2;
  const int hi_span = window / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - lo_span);
    const int b = std::min(n - 1, i + hi_span);
    double acc = 0.0;
    for (int j = a; j <= b; ++j) acc += pts[j].players;
    out[i] = acc / (b - a + 1);
  }
  return out;
}

}  // namespace

PeakDetection detect_peak(const PopulationSeries& series, int smoothing_window) {
  if (smoothing_window < 1) throw ValidationError("detect_peak: window must be >= 1");
  if (static_cast<int>(series.size()) < 2 * smoothing_window)
    throw ValidationError("detect_peak: series shorter than 2x smoothing window");
  const auto smoothed = moving_average(series.points, smoothing_window);
  std::size_t best = 0;
  for (std::size_t i = 1; i < smoothed.size(); ++i)
    if (smoothed[i] > smoothed[best]) best = i;  // earliest maximum wins ties
  PeakDetection det;
  det.t_peak = series.points[best].t;
  det.p_peak = series.points[best].players;
  det.no_decay_phase = best + 1 == series.size();
  return det;
}

namespace {

// ---------------------------------------------------------------------------
// likelihood machinery
// ---------------------------------------------------------------------------

struct FitData {
  Family family = Family::exponential;
  NoiseModel noise = NoiseModel::gaussian;
  double t_anchor = 0.0;  // t_peak for decay families, first sample for growth
  std::vector<double> t;
  std::vector<double> obs;
  double sum_log_obs = 0.0;  // lognormal constant term
};

bool is_decay(Family f) {
  return f == Family::exponential || f == Family::weibull || f == Family::power_law ||
         f == Family::log_normal;
}

int family_dim(Family f) {
  switch (f) {
    case Family::exponential: return 2;
    case Family::weibull:
    case Family::power_law:
    case Family::log_normal:
    case Family::logistic:
    case Family::bass: return 3;
    default: throw ValidationError("unsupported family for fitting");
  }
}

ModelParams unpack(Family family, const std::vector<double>& x, double t_anchor) {
  switch (family) {
    case Family::exponential:
      return ExponentialDecayParams(std::exp(x[0]), t_anchor, std::exp(x[1]));
    case Family::weibull:
      return WeibullDecayParams(std::exp(x[0]), t_anchor, std::exp(x[1]), std::exp(x[2]));
    case Family::power_law:
      return PowerLawDecayParams(std::exp(x[0]), t_anchor, std::exp(x[1]), std::exp(x[2]));
    case Family::log_normal:
      return LogNormalDecayParams(std::exp(x[0]), t_anchor, x[1], std::exp(x[2]));
    case Family::logistic:
      return LogisticParams(std::exp(x[0]), std::exp(x[1]), x[2]);
    case Family::bass:
      return BassParams(std::exp(x[0]), std::exp(x[1]), std::exp(x[2]));
    default: throw ValidationError("unsupported family for fitting");
  }
}

std::vector<double> pack(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialDecayParams>)
          return {std::log(p.p_peak), std::log(p.mu)};
        else if constexpr (std::is_same_v<T, WeibullDecayParams>)
          return {std::log(p.p_peak), std::log(p.theta), std::log(p.k)};
        else if constexpr (std::is_same_v<T, PowerLawDecayParams>)
          return {std::log(p.p_peak), std::log(p.a), std::log(p.s)};
        else if constexpr (std::is_same_v<T, LogNormalDecayParams>)
          return {std::log(p.p_peak), p.m_ln, std::log(p.s_ln)};
        else if constexpr (std::is_same_v<T, LogisticParams>)
          return {std::log(p.K), std::log(p.r), p.t0};
        else
          return {std::log(p.p), std::log(p.q), std::log(p.m_market)};
      },
      params);
}

void predict(const ModelParams& params, const FitData& data, std::vector<double>& out) {
  out.resize(data.t.size());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogisticParams>) {
          eval_logistic_grid(p, data.t, out);
        } else if constexpr (std::is_same_v<T, BassParams>) {
          for (std::size_t i = 0; i < data.t.size(); ++i)
            out[i] = eval_bass_cumulative(p, data.t[i] - data.t_anchor);
        } else if constexpr (std::is_same_v<T, ExponentialDecayParams>) {
          kernels::exp_decay_curve(data.t, p.p_peak, p.t_peak, p.mu, out);
        } else if constexpr (std::is_same_v<T, WeibullDecayParams>) {
          kernels::weibull_decay_curve(data.t, p.p_peak, p.t_peak, p.theta, p.k, out);
        } else if constexpr (std::is_same_v<T, PowerLawDecayParams>) {
          kernels::power_law_decay_curve(data.t, p.p_peak, p.t_peak, p.a, p.s, out);
        } else {
          kernels::log_normal_decay_curve(data.t, p.p_peak, p.t_peak, p.m_ln, p.s_ln, out);
        }
      },
      params);
}

// Profiled objective: the noise scale has a closed-form MLE given the curve,
// so the simplex only searches the family parameters.
//   gaussian:  f = n/2 log(S/n) + sum log(pred),  S = sum ((obs-pred)/pred)^2
//   lognormal: f = n/2 log(S/n),                  S = sum (log obs - log pred)^2
// Free (non-log) coordinates per family: logistic t0 and log-normal m_ln.
bool coord_is_free(Family family, std::size_t index) {
  return (family == Family::logistic && index == 2) ||
         (family == Family::log_normal && index == 1);
}

double objective(const std::vector<double>& x, const FitData& data, std::vector<double>& pred) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return kPenalty;
    const double bound = coord_is_free(data.family, i) ? 1e9 : 700.0;
    if (std::abs(x[i]) > bound) return kPenalty;
  }
  const ModelParams params = unpack(data.family, x, data.t_anchor);
  predict(params, data, pred);
  for (double v : pred)
    if (!(v > 1e-290) || !std::isfinite(v)) return kPenalty;
  const double n = static_cast<double>(data.t.size());
  // Residual scale floored at 1e-12 relative: below that the surface is flat
  // to machine precision and noiseless data would never satisfy the
  // convergence test.
  const double s_floor = n * 1e-24;
  if (data.noise == NoiseModel::gaussian) {
    const double s = std::max(kernels::sum_sq_rel_residual(data.obs, pred), s_floor);
    return 0.5 * n * std::log(s / n) + kernels::sum_log(pred);
  }
  const double s = std::max(kernels::sum_sq_log_ratio(data.obs, pred), s_floor);
  return 0.5 * n * std::log(s / n);
}

double full_log_likelihood(double obj_value, const FitData& data) {
  // LL = -n/2 (log 2pi + 1) - f, minus the lognormal data constant
  const double n = static_cast<double>(data.t.size());
  double ll = -0.5 * n * (std::log(2.0 * 3.14159265358979323846) + 1.0) - obj_value;
  if (data.noise == NoiseModel::lognormal) ll -= data.sum_log_obs;
  return ll;
}

double fitted_sigma(const ModelParams& params, const FitData& data) {
  std::vector<double> pred;
  predict(params, data, pred);
  const double n = static_cast<double>(data.t.size());
  const double s = data.noise == NoiseModel::gaussian
                       ? kernels::sum_sq_rel_residual(data.obs, pred)
                       : kernels::sum_sq_log_ratio(data.obs, pred);
  return std::sqrt(std::max(s, n * 1e-24) / n);
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex
// ---------------------------------------------------------------------------

struct NmResult {
  std::vector<double> x;
  double f = kPenalty;
  bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, double initial_step, double ftol,
                     int max_iter) {
  const std::size_t dim = x0.size();
  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += initial_step;
  std::vector<double> fs(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fs[i] = f(simplex[i]);

  NmResult result;
  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim);

  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

    bool stalled = std::abs(fs[worst] - fs[best]) <= ftol * (std::abs(fs[best]) + ftol);
    if (!stalled) {
      // simplex collapsed in parameter space: degenerate (noiseless) surfaces
      // bottom out in f long after x has stopped moving
      stalled = true;
      for (std::size_t d = 0; d < dim && stalled; ++d) {
        double lo = simplex[0][d], hi = simplex[0][d];
        for (std::size_t i = 1; i <= dim; ++i) {
          lo = std::min(lo, simplex[i][d]);
          hi = std::max(hi, simplex[i][d]);
        }
        stalled = hi - lo <= 1e-10 * (1.0 + std::abs(simplex[best][d]));
      }
    }
    if (stalled) {
      result.x = simplex[best];
      result.f = fs[best];
      result.converged = true;
      return result;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    const auto propose = [&](double coeff) {
      for (std::size_t d = 0; d < dim; ++d)
        trial[d] = centroid[d] + coeff * (simplex[worst][d] - centroid[d]);
      return f(trial);
    };

    const double f_reflect = propose(-1.0);
    if (f_reflect < fs[best]) {
      const std::vector<double> reflect = trial;
      const double f_expand = propose(-2.0);
      if (f_expand < f_reflect) {
        simplex[worst] = trial;
        fs[worst] = f_expand;
      } else {
        simplex[worst] = reflect;
        fs[worst] = f_reflect;
      }
    } else if (f_reflect < fs[second]) {
      simplex[worst] = trial;
      fs[worst] = f_reflect;
    } else {
      const double f_contract = propose(f_reflect < fs[worst] ? -0.5 : 0.5);
      if (f_contract < std::min(f_reflect, fs[worst])) {
        simplex[worst] = trial;
        fs[worst] = f_contract;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < dim; ++d)
            simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          fs[i] = f(simplex[i]);
        }
      }
    }
  }

  const auto best_it = std::min_element(fs.begin(), fs.end());
  result.x = simplex[static_cast<std::size_t>(best_it - fs.begin())];
  result.f = *best_it;
  result.converged = false;
  return result;
}

// ---------------------------------------------------------------------------
// initialization grids
// ---------------------------------------------------------------------------

struct ExpRegression {
  double log_p = 0.0;
  double mu = 0.0;
  bool ok = false;
};

// least squares of log(obs) on (t - anchor), positive observations only
ExpRegression exp_regression(const FitData& data) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    if (!(data.obs[i] > 0)) continue;
    const double x = data.t[i] - data.t_anchor;
    const double y = std::log(data.obs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  ExpRegression reg;
  if (n < 2) return reg;
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return reg;
  const double slope = (n * sxy - sx * sy) / denom;
  reg.log_p = (sy - slope * sx) / n;
  reg.mu = -slope;
  reg.ok = reg.mu > 0 && std::isfinite(reg.log_p);
  return reg;
}

// Half-life grid spanning the hypothesized genre ranges (6..120 months at 30
// days per month) plus data-driven spans; every start gets a local search.
const double kTauMonthsGrid[] = {6, 12, 18, 24, 30, 36, 48, 60, 84, 96, 120};

std::vector<std::vector<double>> make_starts(const FitData& data) {
  const double span = std::max(data.t.back() - data.t.front(), 1e-6);
  const double p0 = *std::max_element(data.obs.begin(), data.obs.end());
  const double log_p0 = std::log(std::max(p0, 1e-12));

  const ExpRegression reg = exp_regression(data);
  std::vector<double> mu_starts;
  if (reg.ok) mu_starts.push_back(reg.mu);
  mu_starts.push_back(2.0 * kLn2 / span);
  mu_starts.push_back(10.0 * kLn2 / span);
  for (double months : kTauMonthsGrid) mu_starts.push_back(kLn2 / (30.0 * months));
  const double mu_best = mu_starts.front();
  const double tau_best = kLn2 / mu_best;
  const double log_p_best = reg.ok ? reg.log_p : log_p0;

  std::vector<std::vector<double>> starts;
  switch (data.family) {
    case Family::exponential:
      for (double mu : mu_starts) starts.push_back({log_p_best, std::log(mu)});
      break;
    case Family::weibull:
      // theta/k grid around the exponential solution (k = 1, theta = 1/mu)
      for (double k : {1.0, 0.7, 1.5, 2.5}) {
        const double theta = tau_best / std::pow(kLn2, 1.0 / k);
        starts.push_back({log_p_best, std::log(theta), std::log(k)});
      }
      starts.push_back({log_p0, std::log(span / 2.0), std::log(1.0)});
      break;
    case Family::power_law:
      for (double a : {0.5, 1.0, 2.0, 4.0}) {
        const double s = tau_best / (std::pow(2.0, 1.0 / a) - 1.0);
        starts.push_back({log_p_best, std::log(a), std::log(s)});
      }
      break;
    case Family::log_normal:
      for (double s_ln : {0.5, 1.0, 2.0})
        starts.push_back({log_p_best, std::log(tau_best), std::log(s_ln)});
      break;
    case Family::logistic: {
      const double cap = 1.05 * p0;
      // time of half-capacity crossing as the inflection guess
      double t_mid = 0.5 * (data.t.front() + data.t.back());
      for (std::size_t i = 0; i < data.t.size(); ++i)
        if (data.obs[i] >= 0.5 * cap) {
          t_mid = data.t[i];
          break;
        }
      for (double r : {4.0 / span, 10.0 / span, 1.0 / span})
        starts.push_back({std::log(cap), std::log(r), t_mid});
      break;
    }
    case Family::bass: {
      const double m = 1.05 * p0;
      for (double p : {0.003, 0.01, 0.03})
        for (double q : {0.1, 0.3})
          starts.push_back({std::log(p), std::log(q), std::log(m)});
      break;
    }
    default: throw ValidationError("unsupported family for fitting");
  }
  return starts;
}

FitData prepare_decay_data(const PopulationSeries& series, Family family, double t_peak,
                           NoiseModel noise) {
  if (!is_decay(family)) throw ValidationError("fit_decay: not a decay family");
  FitData data;
  data.family = family;
  data.noise = noise;
  data.t_anchor = t_peak;
  for (const auto& p : series.points) {
    if (p.t < t_peak) continue;
    data.t.push_back(p.t);
    data.obs.push_back(p.players);
  }
  if (data.t.size() < 8) throw ValidationError("fit_decay: need >= 8 points after t_peak");
  if (noise == NoiseModel::lognormal) {
    for (double v : data.obs)
      if (!(v > 0))
        throw ValidationError("fit_decay: lognormal noise requires positive post-peak counts");
    data.sum_log_obs = kernels::sum_log(data.obs);
  }
  return data;
}

FitData prepare_growth_data(const PopulationSeries& series, Family family, double t_peak,
                            NoiseModel noise) {
  if (family != Family::logistic && family != Family::bass)
    throw ValidationError("fit_growth: family must be logistic or bass");
  FitData data;
  data.family = family;
  data.noise = noise;
  for (const auto& p : series.points) {
    if (p.t > t_peak) break;
    data.t.push_back(p.t);
    data.obs.push_back(p.players);
  }
  if (!data.t.empty()) data.t_anchor = data.t.front();
  if (family == Family::bass && !data.t.empty()) {
    // the Bass curve pins P = 0 at the anchor, so that sample carries no
    // likelihood information; drop it
    data.t.erase(data.t.begin());
    data.obs.erase(data.obs.begin());
  }
  if (data.t.size() < 4) throw ValidationError("fit_growth: need >= 4 pre-peak points");
  if (noise == NoiseModel::lognormal) {
    for (double v : data.obs)
      if (!(v > 0))
        throw ValidationError("fit_growth: lognormal noise requires positive counts");
    data.sum_log_obs = kernels::sum_log(data.obs);
  }
  return data;
}

FitReport fit_prepared(const FitData& data) {
  std::vector<double> pred;
  const auto obj = [&](const std::vector<double>& x) { return objective(x, data, pred); };

  const auto starts = make_starts(data);
  NmResult best;
  bool any_converged = false;
  for (const auto& start : starts) {
    NmResult r = nelder_mead(obj, start, 0.3, 1e-12, 600 * static_cast<int>(start.size()));
    if (r.f < best.f || best.x.empty()) best = r;
    any_converged = any_converged || r.converged;
  }
  // polish from the best vertex with a tighter simplex
  NmResult polished = nelder_mead(obj, best.x, 0.02, 1e-13, 800 * static_cast<int>(best.x.size()));
  if (polished.f <= best.f) {
    any_converged = any_converged || polished.converged;
    best = polished;
  }
  if (!any_converged || best.f >= kPenalty)
    throw NumericError("fit: optimizer failed to converge after " +
                       std::to_string(starts.size()) + " starts (best objective " +
                       std::to_string(best.f) + ")");

  FitReport report;
  report.family = data.family;
  report.noise_model = data.noise;
  report.params = unpack(data.family, best.x, data.t_anchor);
  report.sigma = fitted_sigma(report.params, data);
  report.residual_sd = report.sigma;
  report.n_points = static_cast<int>(data.t.size());
  report.k_params = family_dim(data.family) + 1;  // noise scale is estimated too
  report.log_likelihood = full_log_likelihood(best.f, data);
  report.aic = 2.0 * report.k_params - 2.0 * report.log_likelihood;
  report.bic = report.k_params * std::log(static_cast<double>(report.n_points)) -
               2.0 * report.log_likelihood;
  if (is_decay(data.family)) {
    const DecayParams decay = std::visit(
        [](const auto& p) -> DecayParams {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ExponentialDecayParams> ||
                        std::is_same_v<T, WeibullDecayParams> ||
                        std::is_same_v<T, PowerLawDecayParams> ||
                        std::is_same_v<T, LogNormalDecayParams>)
            return DecayParams(p);
          else
            throw ValidationError("internal: decay family expected");
        },
        report.params);
    report.half_life_days = half_life(decay);
  }
  return report;
}

DecayParams to_decay(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> DecayParams {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialDecayParams> ||
                      std::is_same_v<T, WeibullDecayParams> ||
                      std::is_same_v<T, PowerLawDecayParams> ||
                      std::is_same_v<T, LogNormalDecayParams>)
          return DecayParams(p);
        else
          throw ValidationError("expected a decay-family parameter set");
      },
      params);
}

}  // namespace

FitReport fit_decay(const PopulationSeries& series, Family family, double t_peak,
                    NoiseModel noise_model) {
  return fit_prepared(prepare_decay_data(series, family, t_peak, noise_model));
}

FitReport fit_growth(const PopulationSeries& series, Family family, double t_peak,
                     NoiseModel noise_model) {
  return fit_prepared(prepare_growth_data(series, family, t_peak, noise_model));
}

ModelComparison compare_models(const PopulationSeries& series, const std::vector<Family>& families,
                               double t_peak, NoiseModel noise_model) {
  if (families.empty()) throw ValidationError("compare_models: no families given");
  ModelComparison cmp;
  bool any_numeric_failure = false;
  for (Family family : families) {
    try {
      cmp.reports.push_back(fit_decay(series, family, t_peak, noise_model));
    } catch (const NumericError& e) {
      any_numeric_failure = true;
      cmp.failures[family_name(family)] = e.what();
    } catch (const std::exception& e) {
      cmp.failures[family_name(family)] = e.what();
    }
  }
  if (cmp.reports.empty()) {
    // the aggregate error keeps the class of the underlying failures
    const std::string msg = "compare_models: every family failed to fit (first: " +
                            cmp.failures.begin()->second + ")";
    if (any_numeric_failure) throw NumericError(msg);
    throw ValidationError(msg);
  }

  double min_aic = cmp.reports.front().aic;
  for (const auto& r : cmp.reports) min_aic = std::min(min_aic, r.aic);
  const FitReport* winner = nullptr;
  for (const auto& r : cmp.reports) {
    cmp.delta_aic[family_name(r.family)] = r.aic - min_aic;
    const bool tied_at_min = r.aic - min_aic < 1e-9;
    if (!tied_at_min) continue;
    // ties break toward fewer parameters, then fixed family order
    if (!winner || r.k_params < winner->k_params ||
        (r.k_params == winner->k_params &&
         static_cast<int>(r.family) < static_cast<int>(winner->family)))
      winner = &r;
  }
  cmp.winner = winner->family;
  return cmp;
}

BootstrapResult bootstrap_fit(const PopulationSeries& series, Family family, double t_peak,
                              NoiseModel noise_model, int n_boot, std::uint64_t seed) {
  if (n_boot < 100) throw ValidationError("bootstrap: n_boot must be >= 100");
  const FitData data = prepare_decay_data(series, family, t_peak, noise_model);
  const FitReport base = fit_prepared(data);

  std::vector<double> pred;
  predict(base.params, data, pred);
  const std::size_t n = data.t.size();
  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i)
    residuals[i] = noise_model == NoiseModel::gaussian
                       ? (data.obs[i] - pred[i]) / pred[i]
                       : std::log(data.obs[i]) - std::log(pred[i]);

  const std::vector<double> start = pack(base.params);
  BootstrapResult result;
  std::vector<std::map<std::string, double>> replicate_values;

  FitData replica = data;
  std::vector<double> scratch;
  for (int b = 0; b < n_boot; ++b) {
    Rng rng(Rng::mix_stream(seed, static_cast<std::uint64_t>(b)));
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residuals[static_cast<std::size_t>(rng.uniform() * n) % n];
      replica.obs[i] = noise_model == NoiseModel::gaussian ? pred[i] * (1.0 + r)
                                                           : pred[i] * std::exp(r);
    }
    if (noise_model == NoiseModel::lognormal)
      replica.sum_log_obs = kernels::sum_log(replica.obs);

    const auto obj = [&](const std::vector<double>& x) { return objective(x, replica, scratch); };
    NmResult r = nelder_mead(obj, start, 0.1, 1e-12, 500 * static_cast<int>(start.size()));
    if (!r.converged || r.f >= kPenalty) {
      ++result.n_failed;
      continue;
    }
    ModelParams params = unpack(family, r.x, data.t_anchor);
    result.replicates.push_back(params);
    auto values = named_params(params);
    values["sigma"] = fitted_sigma(params, replica);
    replicate_values.push_back(std::move(values));
  }

  if (result.n_failed * 5 > n_boot)
    throw NumericError("bootstrap: " + std::to_string(result.n_failed) + " of " +
                       std::to_string(n_boot) + " replicate fits failed (> 20%)");

  auto point = named_params(base.params);
  point.erase("t_peak");  // fixed at fit time, not an estimated parameter
  point["sigma"] = base.sigma;

  // type-7 percentile with linear interpolation, fixed reduction order
  const auto percentile = [](std::vector<double>& v, double p) {
    std::sort(v.begin(), v.end());
    const double h = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };

  for (const auto& [name, estimate] : point) {
    std::vector<double> values;
    values.reserve(replicate_values.size());
    for (const auto& m : replicate_values) values.push_back(m.at(name));
    double lo = percentile(values, 0.025);
    double hi = percentile(values, 0.975);
    // the interval always brackets the point estimate
    lo = std::min(lo, estimate);
    hi = std::max(hi, estimate);
    result.ci[name] = {lo, hi};
  }
  return result;
}

std::map<std::string, std::pair<double, double>> bootstrap_ci(const PopulationSeries& series,
                                                              Family family, double t_peak,
                                                              NoiseModel noise_model, int n_boot,
                                                              std::uint64_t seed) {
  return bootstrap_fit(series, family, t_peak, noise_model, n_boot, seed).ci;
}

PhiCrossing project_phi_crossing(const FitReport& report, double phi) {
  if (!(phi > 0)) throw ValidationError("project_phi_crossing: phi must be > 0");
  const DecayParams decay = to_decay(report.params);
  const double p_peak = decay_p_peak(decay);
  const double t_peak = decay_t_peak(decay);

  PhiCrossing crossing;
  if (phi >= p_peak) {  // already sub-critical at the peak
    crossing.day = t_peak;
    crossing.already_subcritical = true;
    return crossing;
  }
  const double tau = half_life(decay);
  const double t_end = t_peak + 100.0 * tau;
  if (eval_decay(decay, t_end) >= phi) return crossing;  // no drop within 100 half-lives

  double lo = t_peak, hi = t_end;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (eval_decay(decay, mid) < phi)
      hi = mid;
    else
      lo = mid;
  }
  crossing.day = 0.5 * (lo + hi);
  return crossing;
}

HoldoutResult holdout_evaluate(const PopulationSeries& series, Family family, double t_peak,
                               NoiseModel noise_model, double train_frac) {
  if (!(train_frac > 0) || !(train_frac < 1))
    throw ValidationError("holdout: train_frac must be in (0, 1)");
  std::vector<TimePoint> post;
  for (const auto& p : series.points)
    if (p.t >= t_peak) post.push_back(p);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(post.size())));
  if (n_train < 8) throw ValidationError("holdout: training split has fewer than 8 points");
  if (n_train >= post.size()) throw ValidationError("holdout: no points left for testing");

  PopulationSeries train = series;
  train.points.assign(post.begin(), post.begin() + static_cast<long>(n_train));
  train.t_shutdown.reset();

  HoldoutResult result;
  result.fit = fit_decay(train, family, t_peak, noise_model);
  result.n_train = static_cast<int>(n_train);
  result.n_test = static_cast<int>(post.size() - n_train);

  const DecayParams decay = to_decay(result.fit.params);
  double ss = 0.0;
  for (std::size_t i = n_train; i < post.size(); ++i) {
    const double err = post[i].players - eval_decay(decay, post[i].t);
    ss += err * err;
  }
  result.rmse = std::sqrt(ss / static_cast<double>(result.n_test));
  return result;
}

std::map<std::string, double> named_params(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> std::map<std::string, double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialDecayParams>)
          return {{"p_peak", p.p_peak}, {"t_peak", p.t_peak}, {"mu", p.mu}};
        else if constexpr (std::is_same_v<T, WeibullDecayParams>)
          return {{"p_peak", p.p_peak}, {"t_peak", p.t_peak}, {"theta", p.theta}, {"k", p.k}};
        else if constexpr (std::is_same_v<T, PowerLawDecayParams>)
          return {{"p_peak", p.p_peak}, {"t_peak", p.t_peak}, {"a", p.a}, {"s", p.s}};
        else if constexpr (std::is_same_v<T, LogNormalDecayParams>)
          return {{"p_peak", p.p_peak}, {"t_peak", p.t_peak}, {"m_ln", p.m_ln},
                  {"s_ln", p.s_ln}};
        else if constexpr (std::is_same_v<T, LogisticParams>)
          return {{"K", p.K}, {"r", p.r}, {"t0", p.t0}};
        else
          return {{"p", p.p}, {"q", p.q}, {"m_market", p.m_market}};
      },
      params);
}

}  // namespace gamepop
