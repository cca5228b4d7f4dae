#include "gamepop/matchmaking.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "gamepop/errors.hpp"
#include "gamepop/rng.hpp"

namespace gamepop {

void OperationalProfile::validate() const {
  if (match_size < 2) throw ValidationError("profile: match_size must be >= 2");
  if (!(rho_per_hour > 0)) throw ValidationError("profile: rho must be > 0");
  if (!(q_max_minutes > 0)) throw ValidationError("profile: q_max must be > 0");
  if (!(m_max > 0)) throw ValidationError("profile: m_max must be > 0");
  if (!(skill_spread > 0)) throw ValidationError("profile: skill_spread must be > 0");
  if (regions < 1) throw ValidationError("profile: regions must be >= 1");
  if (!role_quota.empty()) {
    int total = 0;
    for (const auto& [role, count] : role_quota) {
      if (count <= 0) throw ValidationError("profile: role quota counts must be positive");
      total += count;
    }
    if (total != match_size)
      throw ValidationError("profile: role quota must sum to match_size");
    if (!role_mix.empty()) {
      for (const auto& [role, count] : role_quota) {
        auto it = role_mix.find(role);
        if (it == role_mix.end() || !(it->second > 0))
          throw ValidationError("profile: role '" + role + "' has quota but zero mix probability");
      }
    }
  }
  if (!role_mix.empty()) {
    double total = 0.0;
    for (const auto& [role, prob] : role_mix) {
      if (!(prob > 0)) throw ValidationError("profile: role mix probabilities must be positive");
      total += prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ValidationError("profile: role mix probabilities must sum to 1");
  }
}

double queue_time_analytic(const OperationalProfile& profile, double pop) {
  profile.validate();
  if (!(pop >= 1)) throw ValidationError("queue_time_analytic: pop must be >= 1");
  const double arrivals_per_hour = pop * profile.rho_per_hour / profile.regions;
  return profile.match_size * 60.0 / arrivals_per_hour;
}

ViabilityEstimate phi_analytic(const OperationalProfile& profile) {
  profile.validate();
  ViabilityEstimate est;
  est.method = PhiMethod::analytic;

  long long candidate = profile.match_size;
  if (std::isfinite(profile.q_max_minutes)) {
    const double target = profile.match_size * 60.0 * profile.regions /
                          (profile.rho_per_hour * profile.q_max_minutes);
    candidate = std::max<long long>(profile.match_size,
                                    static_cast<long long>(std::ceil(target - 1e-9)));
    // settle FP edge cases with the exact predicate
    while (queue_time_analytic(profile, static_cast<double>(candidate)) >
           profile.q_max_minutes)
      ++candidate;
    while (candidate - 1 >= profile.match_size &&
           queue_time_analytic(profile, static_cast<double>(candidate - 1)) <=
               profile.q_max_minutes)
      --candidate;
  }
  est.phi = candidate;
  est.mean_queue_at_phi = queue_time_analytic(profile, static_cast<double>(candidate));
  est.mean_imbalance_at_phi = 0.0;  // skill constraint not modeled analytically
  return est;
}

namespace {

struct ReplicationStats {
  double mean_assembly_unit_time = 0.0;  // unit-rate time per match formation
  double mean_imbalance = 0.0;           // skill-spread units
};

// One matchmaking replication at unit arrival rate. Queue durations at a real
// arrival rate lambda are these times divided by lambda, so a single
// replication serves every candidate population in the binary search; that
// also makes phi exactly monotone in the tolerances for a fixed seed.
ReplicationStats run_replication(const OperationalProfile& profile, Rng& rng, int n_matches) {
  const bool constrained = !profile.role_quota.empty();

  std::vector<std::string> roles;
  std::vector<double> cumulative;
  std::vector<int> quota;
  if (constrained) {
    const auto& mix_source = profile.role_mix;
    double acc = 0.0;
    if (!mix_source.empty()) {
      for (const auto& [role, prob] : mix_source) {
        roles.push_back(role);
        acc += prob;
        cumulative.push_back(acc);
      }
    } else {
      // default mix proportional to the quota
      for (const auto& [role, count] : profile.role_quota) {
        roles.push_back(role);
        acc += static_cast<double>(count) / profile.match_size;
        cumulative.push_back(acc);
      }
    }
    cumulative.back() = 1.0;
    quota.resize(roles.size(), 0);
    for (std::size_t i = 0; i < roles.size(); ++i) {
      auto it = profile.role_quota.find(roles[i]);
      quota[i] = it == profile.role_quota.end() ? 0 : it->second;
    }
  }

  struct Waiting {
    int role;
    double skill;
  };
  std::deque<Waiting> queue;
  std::vector<int> queued_per_role(roles.size(), 0);

  double t = 0.0;
  double t_last_match = 0.0;
  double assembly_sum = 0.0;
  double imbalance_sum = 0.0;
  int matches_formed = 0;
  long long arrivals = 0;
  const long long arrival_cap = static_cast<long long>(n_matches) * profile.match_size * 100000;

  while (matches_formed < n_matches) {
    if (++arrivals > arrival_cap)
      throw NumericError("estimate_phi_sim: matcher starved (role mix too skewed)");
    t += rng.exponential(1.0);
    int role = 0;
    if (constrained) {
      const double u = rng.uniform();
      role = static_cast<int>(std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                              cumulative.begin());
      if (role >= static_cast<int>(roles.size())) role = static_cast<int>(roles.size()) - 1;
      if (quota[role] == 0) {
        rng.normal(0.0, profile.skill_spread);  // keep the draw order fixed
        continue;  // role exists in the mix but no quota slot: never matchable
      }
      ++queued_per_role[role];
    }
    queue.push_back({role, rng.normal(0.0, profile.skill_spread)});

    bool formable;
    if (constrained) {
      formable = true;
      for (std::size_t r = 0; r < quota.size(); ++r)
        if (queued_per_role[r] < quota[r]) {
          formable = false;
          break;
        }
    } else {
      formable = static_cast<int>(queue.size()) >= profile.match_size;
    }
    if (!formable) continue;

    // greedy FIFO selection honoring the quota
    std::vector<double> skills;
    skills.reserve(profile.match_size);
    if (constrained) {
      std::vector<int> still_needed = quota;
      std::deque<Waiting> remaining;
      for (auto& w : queue) {
        if (still_needed[w.role] > 0) {
          --still_needed[w.role];
          --queued_per_role[w.role];
          skills.push_back(w.skill);
        } else {
          remaining.push_back(w);
        }
      }
      queue.swap(remaining);
    } else {
      for (int j = 0; j < profile.match_size; ++j) {
        skills.push_back(queue.front().skill);
        queue.pop_front();
      }
    }

    double mean = 0.0;
    for (double sk : skills) mean += sk;
    mean /= static_cast<double>(skills.size());
    double ss = 0.0;
    for (double sk : skills) ss += (sk - mean) * (sk - mean);
    const double sd = std::sqrt(ss / static_cast<double>(skills.size() - 1));

    assembly_sum += t - t_last_match;
    imbalance_sum += sd / profile.skill_spread;
    t_last_match = t;
    ++matches_formed;
  }

  return {assembly_sum / n_matches, imbalance_sum / n_matches};
}

}  // namespace

ViabilityEstimate estimate_phi_sim(const OperationalProfile& profile, std::uint64_t seed,
                                   int replications, long long pop_hi) {
  profile.validate();
  if (replications < 1) throw ValidationError("estimate_phi_sim: replications must be >= 1");
  if (pop_hi < profile.match_size)
    throw ValidationError("estimate_phi_sim: pop_hi below match_size");

  constexpr int kMatchesPerReplication = 200;

  double assembly_mean = 0.0;
  double imbalance_mean = 0.0;
  for (int r = 0; r < replications; ++r) {
    Rng rng(Rng::mix_stream(seed, static_cast<std::uint64_t>(r)));
    const ReplicationStats stats = run_replication(profile, rng, kMatchesPerReplication);
    assembly_mean += stats.mean_assembly_unit_time;
    imbalance_mean += stats.mean_imbalance;
  }
  assembly_mean /= replications;
  imbalance_mean /= replications;

  // queue minutes at population pop (arrival rate pop * rho / regions per hour)
  const auto mean_queue_minutes = [&](long long pop) {
    return assembly_mean * 60.0 * profile.regions /
           (static_cast<double>(pop) * profile.rho_per_hour);
  };
  const auto feasible = [&](long long pop) {
    return mean_queue_minutes(pop) <= profile.q_max_minutes && imbalance_mean <= profile.m_max;
  };

  if (!feasible(pop_hi)) {
    if (imbalance_mean > profile.m_max)
      throw ValidationError(
          "estimate_phi_sim: imbalance tolerance unsatisfiable (binding constraint: m_max)");
    throw ValidationError(
        "estimate_phi_sim: queue tolerance unsatisfiable at pop_hi (binding constraint: q_max)");
  }

  long long lo = profile.match_size;  // may itself be feasible
  long long hi = pop_hi;
  if (feasible(lo)) {
    hi = lo;
  } else {
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      if (feasible(mid))
        hi = mid;
      else
        lo = mid;
    }
  }

  ViabilityEstimate est;
  est.phi = hi;
  est.mean_queue_at_phi = mean_queue_minutes(hi);
  est.mean_imbalance_at_phi = imbalance_mean;
  est.method = PhiMethod::discrete_event;
  est.seed = seed;
  est.replications = replications;
  return est;
}

}  // namespace gamepop
