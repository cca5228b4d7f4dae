#include "gamepop/novelty.hpp"

#include <algorithm>
#include <cmath>

#include "gamepop/errors.hpp"

namespace gamepop {

ContentSchedule::ContentSchedule(std::vector<Segment> segments_, double cap_)
    : segments(std::move(segments_)), cap(cap_) {
  if (!std::isfinite(cap) || !(cap > 0))
    throw ValidationError("content schedule: cap must be finite and > 0");
  double prev = -1.0;
  for (const auto& seg : segments) {
    if (!(seg.rate >= 0)) throw ValidationError("content schedule: rates must be >= 0");
    if (!(seg.t_start >= 0)) throw ValidationError("content schedule: t_start must be >= 0");
    if (!(seg.t_start > prev))
      throw ValidationError("content schedule: segment starts must be strictly increasing");
    prev = seg.t_start;
  }
}

NoveltyParams::NoveltyParams(double eta_, double h_bar_, double mu0_, double kappa_)
    : eta(eta_), h_bar(h_bar_), mu0(mu0_), kappa(kappa_) {
  if (!(eta > 0)) throw ValidationError("novelty: eta must be > 0");
  if (!(h_bar > 0)) throw ValidationError("novelty: h_bar must be > 0");
  if (!(mu0 > 0)) throw ValidationError("novelty: mu0 must be > 0");
  if (!(kappa > 0)) throw ValidationError("novelty: kappa must be > 0");
}

double cumulative_content(const ContentSchedule& schedule, double t) {
  if (!(t >= 0)) throw ValidationError("cumulative_content: t must be >= 0");
  double total = 0.0;
  const auto& segs = schedule.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double seg_start = segs[i].t_start;
    if (t <= seg_start) break;
    const double seg_end = (i + 1 < segs.size()) ? segs[i + 1].t_start : t;
    total += segs[i].rate * (std::min(t, seg_end) - seg_start);
    if (total >= schedule.cap) return schedule.cap;
  }
  return std::min(total, schedule.cap);
}

double exposure(const std::vector<std::pair<double, double>>& pop_trajectory, double h_bar,
                double t) {
  if (pop_trajectory.empty()) throw ValidationError("exposure: empty trajectory");
  if (t < pop_trajectory.front().first || t > pop_trajectory.back().first)
    throw ValidationError("exposure: t outside trajectory domain");
  double acc = 0.0;
  for (std::size_t i = 1; i < pop_trajectory.size(); ++i) {
    const auto& [ta, pa] = pop_trajectory[i - 1];
    const auto& [tb, pb] = pop_trajectory[i];
    if (t <= ta) break;
    if (t >= tb) {
      acc += 0.5 * (pa + pb) * (tb - ta);
    } else {
      const double w = (t - ta) / (tb - ta);
      const double pt = pa + w * (pb - pa);
      acc += 0.5 * (pa + pt) * (t - ta);
      break;
    }
  }
  return acc * h_bar;
}

double novelty(double content, double eta, double exposure_value) {
  return content - eta * exposure_value;
}

double coupled_decay_rate(const NoveltyParams& params, double novelty_value) {
  if (novelty_value > 0) return 0.0;
  return params.mu0 * (1.0 + params.kappa * std::abs(novelty_value));
}

namespace {

struct SimState {
  double pop = 0.0;
  double exposure = 0.0;
};

}  // namespace

LifecycleSimResult simulate_lifecycle(const LogisticParams& growth,
                                      const ContentSchedule& schedule,
                                      const NoveltyParams& nparams, double phi,
                                      std::optional<double> t_service, double step,
                                      double horizon) {
  if (!(step > 0)) throw ValidationError("simulate_lifecycle: step must be > 0");
  if (!(horizon > 0)) throw ValidationError("simulate_lifecycle: horizon must be > 0");
  if (step > horizon) throw ValidationError("simulate_lifecycle: step exceeds horizon");
  if (!(phi > 0)) throw ValidationError("simulate_lifecycle: phi must be > 0");
  if (t_service && !(*t_service > 0))
    throw ValidationError("simulate_lifecycle: t_service must be > 0");

  LifecycleSimResult result;
  result.never_viable = phi >= growth.K;

  const double t_end = t_service ? std::min(horizon, *t_service) : horizon;
  const bool service_cut = t_service && *t_service <= horizon;

  const auto content_at = [&](double t) { return cumulative_content(schedule, t); };

  // decay-phase dynamics: dP/dt = -mu(N) P, dE/dt = h_bar P, N = C(t) - eta E
  const auto rhs = [&](double t, const SimState& s) -> SimState {
    const double n = content_at(t) - nparams.eta * s.exposure;
    const double mu = coupled_decay_rate(nparams, n);
    return {-mu * s.pop, nparams.h_bar * s.pop};
  };
  const auto rk4_step = [&](double t, const SimState& s, double h) -> SimState {
    if (h == 0.0) return s;
    const SimState k1 = rhs(t, s);
    const SimState k2 =
        rhs(t + 0.5 * h, {s.pop + 0.5 * h * k1.pop, s.exposure + 0.5 * h * k1.exposure});
    const SimState k3 =
        rhs(t + 0.5 * h, {s.pop + 0.5 * h * k2.pop, s.exposure + 0.5 * h * k2.exposure});
    const SimState k4 = rhs(t + h, {s.pop + h * k3.pop, s.exposure + h * k3.exposure});
    return {s.pop + (h / 6.0) * (k1.pop + 2.0 * (k2.pop + k3.pop) + k4.pop),
            s.exposure + (h / 6.0) * (k1.exposure + 2.0 * (k2.exposure + k3.exposure) +
                                      k4.exposure)};
  };

  // absolute-tolerance bisection to 1e-6 day on a monotone predicate
  const auto bisect_abs = [](double lo, double hi, const auto& past_event) {
    for (int i = 0; i < 80 && hi - lo > 1e-6; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (past_event(mid))
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  const auto record = [&](double t, const SimState& s) {
    const double c = content_at(t);
    const double n = c - nparams.eta * s.exposure;
    result.trajectory.push_back({t, s.pop, c, s.exposure, n, coupled_decay_rate(nparams, n)});
  };

  const auto finish_crossing = [&](double t_cross, const SimState& at_cross) {
    record(t_cross, at_cross);
    result.t_star = result.never_viable ? 0.0 : t_cross;
    result.terminal_reason = TerminalReason::phi_crossing;
  };

  // The run always opens in the growth phase: N(0) = C(0) >= 0, and the
  // first-step refinement below lands t_novelty_exhaustion at ~0 when the
  // schedule genuinely provides nothing.
  bool decay_phase = false;
  SimState state{eval_logistic(growth, 0.0), 0.0};
  double t_prev = 0.0;
  record(0.0, state);

  for (std::size_t i = 1; t_prev < t_end; ++i) {
    const double t_next = std::min(static_cast<double>(i) * step, t_end);
    const double h = t_next - t_prev;
    if (!(h > 0)) break;

    // Origin of the decay sub-segment inside this step, when one exists.
    bool has_decay_segment = decay_phase;
    double seg_t = t_prev;
    SimState seg_state = state;
    SimState next_state;

    if (!decay_phase) {
      // Growth phase: population follows the logistic closed form; exposure
      // accumulates by trapezoid, matching the exposure() contract.
      const double pop_next = eval_logistic(growth, t_next);
      next_state = {pop_next,
                    state.exposure + 0.5 * h * (state.pop + pop_next) * nparams.h_bar};
      const double n_next = content_at(t_next) - nparams.eta * next_state.exposure;
      if (n_next <= 0.0) {
        const auto exhausted = [&](double t) {
          const double pop_t = eval_logistic(growth, t);
          const double e_t =
              state.exposure + 0.5 * (t - t_prev) * (state.pop + pop_t) * nparams.h_bar;
          return content_at(t) - nparams.eta * e_t <= 0.0;
        };
        const double t_exhaust = bisect_abs(t_prev, t_next, exhausted);
        result.t_novelty_exhaustion = t_exhaust;
        decay_phase = true;
        has_decay_segment = true;
        seg_t = t_exhaust;
        seg_state = {eval_logistic(growth, t_exhaust),
                     state.exposure + 0.5 * (t_exhaust - t_prev) *
                         (state.pop + eval_logistic(growth, t_exhaust)) * nparams.h_bar};
        next_state = rk4_step(seg_t, seg_state, t_next - seg_t);
      }
    } else {
      next_state = rk4_step(seg_t, seg_state, h);
    }

    // Viability downcrossing can only happen on a decay sub-segment (growth
    // is non-decreasing); the simulation stops there.
    if (has_decay_segment && !result.never_viable && seg_state.pop >= phi &&
        next_state.pop < phi) {
      const auto below_phi = [&](double t) {
        return rk4_step(seg_t, seg_state, t - seg_t).pop < phi;
      };
      const double t_cross = bisect_abs(seg_t, t_next, below_phi);
      finish_crossing(t_cross, rk4_step(seg_t, seg_state, t_cross - seg_t));
      return result;
    }

    state = next_state;
    t_prev = t_next;
    record(t_next, state);
  }

  if (result.never_viable) {
    result.t_star = 0.0;
    result.terminal_reason = TerminalReason::phi_crossing;
  } else if (service_cut) {
    result.t_star = t_end;
    result.terminal_reason = TerminalReason::service_horizon;
  } else {
    result.terminal_reason = TerminalReason::horizon_end;
  }
  return result;
}

}  // namespace gamepop
