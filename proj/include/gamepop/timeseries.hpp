#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gamepop {

// One observation: timestamp in real-valued days since 1970-01-01, player
// count (kept real-valued internally; CSV ingestion enforces integers).
struct TimePoint {
  double t = 0.0;
  double players = 0.0;
};

// Concurrent-player time series plus the launch/shutdown metadata the
// lifecycle classifier depends on. Calendar parsing happens only at the CSV
// boundary; everything downstream works in continuous days.
struct PopulationSeries {
  std::vector<TimePoint> points;
  std::optional<double> t_launch;
  std::optional<double> t_shutdown;
  double activity_window_days = 30.0;  // delta of the active-player definition
  std::string label;

  // Throws ValidationError unless: timestamps strictly increasing, counts
  // >= 0, t_launch < t_shutdown when both present, and no positive counts
  // at or after t_shutdown.
  void validate() const;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  double first_t() const { return points.front().t; }
  double last_t() const { return points.back().t; }
};

struct SeriesStats {
  double p_peak = 0.0;
  double t_peak = 0.0;  // earliest timestamp attaining the maximum
  double total_span = 0.0;
  std::vector<std::pair<double, double>> zero_runs;  // maximal [start, end] intervals
};

// Activity-window presets; alternative values yield the same qualitative
// structure, so these are defaults rather than constraints.
inline constexpr double kPersistentWorldWindowDays = 30.0;
inline constexpr double kSessionBasedWindowDays = 7.0;

struct ParseOptions {
  double activity_window_days = kPersistentWorldWindowDays;
  std::string label;
};

// CSV with header `date,players`; dates ISO-8601 (YYYY-MM-DD, optional
// THH:MM:SS) or fractional-day floats. Rows are sorted by date; duplicate
// timestamps, negative counts, and malformed rows are errors (with line
// numbers). Header-only input is an "empty input" error.
PopulationSeries parse_series(const std::string& csv_text, const ParseOptions& options = {});

// Inverse of parse_series for valid series: writes fractional-day timestamps
// at full precision so parse(serialize(s)) reproduces s exactly.
std::string serialize_series(const PopulationSeries& series);

// Applies a metadata sidecar (JSON text) to the series: t_launch, t_shutdown,
// label, activity_window_days. Dates may be ISO strings or day numbers.
void apply_metadata_json(PopulationSeries& series, const std::string& json_text);

SeriesStats compute_stats(const PopulationSeries& series);

// Uniform grid from first to last timestamp (last grid point <= last
// timestamp), linear interpolation, counts rounded to nearest integer.
PopulationSeries resample(const PopulationSeries& series, double step);

// Linear interpolation at an arbitrary time inside the observed span
// (unrounded). Used by resample and by tests of the resampling contract.
double interpolate_at(const PopulationSeries& series, double t);

// Days since 1970-01-01 for an ISO-8601 date/time string.
double parse_date_to_days(const std::string& text);

}  // namespace gamepop
