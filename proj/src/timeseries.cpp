#include "gamepop/timeseries.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gamepop/errors.hpp"

namespace gamepop {
namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Howard Hinnant's days-from-civil algorithm.
long long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool looks_like_date(const std::string& s) {
  return s.size() >= 10 && s[4] == '-' && s[7] == '-';
}

}  // namespace

double parse_date_to_days(const std::string& text) {
  const std::string s = strip(text);
  if (!looks_like_date(s)) throw ValidationError("not an ISO-8601 date: '" + s + "'");
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0;
  double sec = 0.0;
  const int n = std::sscanf(s.c_str(), "%d-%u-%u", &y, &mo, &d);
  if (n != 3 || mo < 1 || mo > 12 || d < 1 || d > 31)
    throw ValidationError("malformed date: '" + s + "'");
  double frac = 0.0;
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ')
      throw ValidationError("malformed date-time: '" + s + "'");
    if (std::sscanf(s.c_str() + 11, "%d:%d:%lf", &h, &mi, &sec) < 2)
      throw ValidationError("malformed time in '" + s + "'");
    frac = (h * 3600.0 + mi * 60.0 + sec) / 86400.0;
  }
  return static_cast<double>(days_from_civil(y, mo, d)) + frac;
}

void PopulationSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].players >= 0.0))
      throw ValidationError("negative player count at t=" + std::to_string(points[i].t));
    if (i > 0 && !(points[i].t > points[i - 1].t))
      throw ValidationError("timestamps not strictly increasing at t=" +
                            std::to_string(points[i].t));
  }
  if (t_launch && t_shutdown && !(*t_launch < *t_shutdown))
    throw ValidationError("t_launch must precede t_shutdown");
  if (t_shutdown) {
    for (const auto& p : points)
      if (p.t >= *t_shutdown && p.players > 0.0)
        throw ValidationError("positive player count after shutdown at t=" +
                              std::to_string(p.t));
  }
}

PopulationSeries parse_series(const std::string& csv_text, const ParseOptions& options) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty input: no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::string header = strip(line);
    std::transform(header.begin(), header.end(), header.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (header != "date,players")
      throw ValidationError("expected header 'date,players', got '" + line + "'");
  }

  PopulationSeries series;
  series.activity_window_days = options.activity_window_days;
  series.label = options.label;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'date,players'");
    const std::string date_field = strip(line.substr(0, comma));
    const std::string count_field = strip(line.substr(comma + 1));

    double t;
    if (looks_like_date(date_field)) {
      t = parse_date_to_days(date_field);
    } else {
      const char* b = date_field.data();
      const char* e = b + date_field.size();
      auto [ptr, ec] = std::from_chars(b, e, t);
      if (ec != std::errc() || ptr != e)
        throw ValidationError("line " + std::to_string(line_no) + ": bad date '" + date_field +
                              "'");
    }

    long long players;
    {
      const char* b = count_field.data();
      const char* e = b + count_field.size();
      auto [ptr, ec] = std::from_chars(b, e, players);
      if (ec != std::errc() || ptr != e)
        throw ValidationError("line " + std::to_string(line_no) + ": bad player count '" +
                              count_field + "'");
    }
    if (players < 0)
      throw ValidationError("line " + std::to_string(line_no) + ": negative player count");
    series.points.push_back({t, static_cast<double>(players)});
  }

  if (series.points.empty()) throw ValidationError("empty input: no data rows");

  std::stable_sort(series.points.begin(), series.points.end(),
                   [](const TimePoint& a, const TimePoint& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < series.points.size(); ++i)
    if (series.points[i].t == series.points[i - 1].t)
      throw ValidationError("duplicate timestamp " + std::to_string(series.points[i].t));

  series.validate();
  return series;
}

std::string serialize_series(const PopulationSeries& series) {
  std::ostringstream out;
  out << "date,players\n";
  char buf[40];
  for (const auto& p : series.points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.t);
    out << buf << ',' << static_cast<long long>(std::llround(p.players)) << '\n';
  }
  return out.str();
}

void apply_metadata_json(PopulationSeries& series, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("metadata JSON: ") + e.what());
  }
  auto read_day = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (j[key].is_string()) return parse_date_to_days(j[key].get<std::string>());
    if (j[key].is_number()) return j[key].get<double>();
    throw ValidationError(std::string("metadata field '") + key + "' must be a date or number");
  };
  if (auto v = read_day("t_launch")) series.t_launch = v;
  if (auto v = read_day("t_shutdown")) series.t_shutdown = v;
  if (j.contains("label") && j["label"].is_string()) series.label = j["label"].get<std::string>();
  if (j.contains("activity_window_days")) {
    const double w = j["activity_window_days"].get<double>();
    if (!(w > 0)) throw ValidationError("activity_window_days must be > 0");
    series.activity_window_days = w;
  }
  series.validate();
}

SeriesStats compute_stats(const PopulationSeries& series) {
  if (series.empty()) throw ValidationError("compute_stats: empty series");
  SeriesStats stats;
  stats.p_peak = series.points.front().players;
  stats.t_peak = series.points.front().t;
  for (const auto& p : series.points) {
    if (p.players > stats.p_peak) {  // earliest maximum wins ties
      stats.p_peak = p.players;
      stats.t_peak = p.t;
    }
  }
  stats.total_span = series.last_t() - series.first_t();

  std::optional<std::size_t> run_start;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const bool zero = series.points[i].players == 0.0;
    if (zero && !run_start) run_start = i;
    if (!zero && run_start) {
      stats.zero_runs.emplace_back(series.points[*run_start].t, series.points[i - 1].t);
      run_start.reset();
    }
  }
  if (run_start)
    stats.zero_runs.emplace_back(series.points[*run_start].t, series.points.back().t);
  return stats;
}

double interpolate_at(const PopulationSeries& series, double t) {
  const auto& pts = series.points;
  if (pts.empty()) throw ValidationError("interpolate_at: empty series");
  if (t < pts.front().t || t > pts.back().t)
    throw ValidationError("interpolate_at: t outside observed span");
  auto it = std::lower_bound(pts.begin(), pts.end(), t,
                             [](const TimePoint& p, double v) { return p.t < v; });
  if (it != pts.end() && it->t == t) return it->players;
  const TimePoint& hi = *it;
  const TimePoint& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.players + w * (hi.players - lo.players);
}

PopulationSeries resample(const PopulationSeries& series, double step) {
  if (!(step > 0.0)) throw ValidationError("resample: step must be > 0");
  if (series.size() < 2) throw ValidationError("resample: need at least 2 points");
  PopulationSeries out = series;
  out.points.clear();
  const double t0 = series.first_t();
  const double t1 = series.last_t();
  for (std::size_t i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    if (t > t1 + 1e-12 * std::max(1.0, std::abs(t1))) break;
    const double v = interpolate_at(series, std::min(t, t1));
    out.points.push_back({t, std::round(v)});
  }
  out.validate();
  return out;
}

}  // namespace gamepop
