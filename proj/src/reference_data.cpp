#include "gamepop/reference_data.hpp"

#include "gamepop/matchmaking.hpp"

namespace gamepop {

const std::vector<GenreHalfLife>& genre_half_life_table() {
  static const std::vector<GenreHalfLife> table = {
      {"Annual FPS franchise", 12, 18, "Franchise cannibalization"},
      {"Hero shooter", 6, 24, "Competitor displacement"},
      {"Battle Royale", 18, 30, "Meta-fatigue"},
      {"MMORPG (subscription)", 36, 84, "Content exhaustion"},
      {"MMORPG (free-to-play)", 24, 60, "Monetization fatigue"},
      {"Survival sandbox", 24, 48, "Community fragmentation"},
      {"Competitive MOBA", 48, 96, "Skill-barrier ossification"},
      {"Modding-enabled sandbox", 120, std::nullopt, "Mod-ecosystem decay"},
  };
  return table;
}

const std::vector<CaseDecayReference>& case_decay_table() {
  static const std::vector<CaseDecayReference> table = {
      {"LawBreakers", 7571, 2.1, "exponential", "Omega3"},
      {"H1Z1", 151331, 3.4, "exponential", "Omega1"},
      {"Evolve", 27403, 4.8, "biphasic", "Omega1"},
      {"New World", 913027, 8.2, "sawtooth", "Omega1"},
      {"World of Warcraft", 12000000, 42, "sawtooth", "Active"},
  };
  return table;
}

namespace {

const std::vector<PhiReference>& phi_references() {
  static const std::vector<PhiReference> table = {
      {"3v3 competitive, region-split", 58000,
       "viability estimate for a 3v3 competitive title with region splitting, skill brackets, "
       "and mode selection (~5M monthly actives)"},
      {"stylized configuration", 8000,
       "representative matchmaking threshold calculation for one stylized configuration"},
  };
  return table;
}

}  // namespace

std::optional<long long> phi_reference_lookup(const std::string& label) {
  for (const auto& row : phi_references())
    if (row.label == label) return row.phi;
  return std::nullopt;
}

std::vector<std::tuple<std::string, long long, std::string>> phi_reference_table() {
  std::vector<std::tuple<std::string, long long, std::string>> rows;
  for (const auto& row : phi_references()) rows.emplace_back(row.label, row.phi, row.note);
  return rows;
}

}  // namespace gamepop
