#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gamepop {

// Packaged reference constants: hypothesized half-life ranges by genre,
// published critical-mass estimates, and the illustrative case parameters.
// These are order-of-magnitude reference values, not fitted results.

struct GenreHalfLife {
  std::string genre;
  double tau_lo_months = 0.0;
  std::optional<double> tau_hi_months;  // open-ended ranges have no upper bound
  std::string primary_driver;
};

struct PhiReference {
  std::string label;
  long long phi = 0;
  std::string note;
};

struct CaseDecayReference {
  std::string title;
  double p_peak = 0.0;        // peak concurrent players (subscribers for WoW)
  double tau_months = 0.0;    // approximate digital half-life
  std::string decay_label;    // exponential / biphasic / sawtooth
  std::string terminal_state; // lifecycle stage label
};

const std::vector<GenreHalfLife>& genre_half_life_table();
const std::vector<CaseDecayReference>& case_decay_table();

std::optional<long long> phi_reference_lookup(const std::string& label);

}  // namespace gamepop
