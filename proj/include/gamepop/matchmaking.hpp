#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace gamepop {

// Matchmaking conditioning variables. The viability threshold is defined only
// relative to one of these profiles; the scalar estimates below are
// projections of a higher-dimensional boundary onto that profile.
struct OperationalProfile {
  int match_size = 2;
  std::map<std::string, int> role_quota;     // empty = no role constraint
  std::map<std::string, double> role_mix;    // empty = roles unsampled (or quota-proportional)
  double rho_per_hour = 1.0;                 // session initiations per player per hour
  double q_max_minutes = 1.0;                // queue tolerance; +inf disables
  double m_max = std::numeric_limits<double>::infinity();  // imbalance tolerance; +inf disables
  double skill_spread = 1.0;                 // sd of player skill (rating points)
  int regions = 1;                           // independent pool partitions

  void validate() const;
};

enum class PhiMethod { analytic, discrete_event };

struct ViabilityEstimate {
  long long phi = 0;
  double mean_queue_at_phi = 0.0;      // minutes
  double mean_imbalance_at_phi = 0.0;  // skill-spread units
  PhiMethod method = PhiMethod::analytic;
  std::optional<std::uint64_t> seed;
  int replications = 0;
};

// Expected minutes to gather match_size Poisson arrivals from one regional
// pool: match_size * 60 * regions / (pop * rho). Strictly decreasing in pop.
double queue_time_analytic(const OperationalProfile& profile, double pop);

// Smallest integer population whose analytic queue time meets q_max, floored
// at match_size. Ignores role and skill constraints: a documented lower bound.
ViabilityEstimate phi_analytic(const OperationalProfile& profile);

// Discrete-event estimate: Poisson arrivals with sampled roles and Normal
// skills, greedy FIFO matcher with role filling, match imbalance = within-
// match skill sd in skill-spread units. Binary search for the smallest pop
// meeting both tolerances on the replication means. Deterministic given seed.
ViabilityEstimate estimate_phi_sim(const OperationalProfile& profile, std::uint64_t seed,
                                   int replications, long long pop_hi);

// Published critical-mass estimates for specific operational profiles (see
// reference_data.hpp for the full table with notes).
std::vector<std::tuple<std::string, long long, std::string>> phi_reference_table();

}  // namespace gamepop
