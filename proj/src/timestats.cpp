#include "evseq/timestats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace evseq {

using namespace std::chrono;

namespace {

constexpr double kMsPerHour = 3'600'000.0;
constexpr double kMsPerDay = 86'400'000.0;

double ms_since(Timestamp t, Timestamp origin) { return static_cast<double>((t - origin).count()); }

// Component of `t` in the kind's native unit (see TimeScaleSpec).
double component(Timestamp t, TimeScaleKind kind) {
  auto day_start = floor<days>(t);
  double in_day = ms_since(t, Timestamp{day_start});
  Date ymd{day_start};
  switch (kind) {
    case TimeScaleKind::HourOfDay:
      return in_day / kMsPerHour;
    case TimeScaleKind::DayOfWeek: {
      auto monday = day_start - days{weekday_index(ymd)};
      return ms_since(t, Timestamp{monday}) / kMsPerDay;
    }
    case TimeScaleKind::DayOfMonth:
      return (static_cast<double>(static_cast<unsigned>(ymd.day())) - 1.0) + in_day / kMsPerDay;
    case TimeScaleKind::MonthOfYear: {
      auto first = sys_days{ymd.year() / ymd.month() / 1};
      auto next = sys_days{(ymd.year() / ymd.month() + months{1}) / 1};
      double span = ms_since(Timestamp{next}, Timestamp{first});
      return (static_cast<double>(static_cast<unsigned>(ymd.month())) - 1.0) +
             ms_since(t, Timestamp{first}) / span;
    }
    case TimeScaleKind::Absolute:
      return static_cast<double>(t.time_since_epoch().count());
  }
  return 0.0;
}

}  // namespace

const char* to_string(TimeScaleKind kind) {
  switch (kind) {
    case TimeScaleKind::HourOfDay: return "hour-of-day";
    case TimeScaleKind::DayOfWeek: return "day-of-week";
    case TimeScaleKind::DayOfMonth: return "day-of-month";
    case TimeScaleKind::MonthOfYear: return "month-of-year";
    case TimeScaleKind::Absolute: return "absolute";
  }
  return "?";
}

std::optional<TimeScaleKind> parse_time_scale_kind(std::string_view name) {
  for (auto k : {TimeScaleKind::HourOfDay, TimeScaleKind::DayOfWeek, TimeScaleKind::DayOfMonth,
                 TimeScaleKind::MonthOfYear, TimeScaleKind::Absolute}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

bool is_cyclic(TimeScaleKind kind) { return kind != TimeScaleKind::Absolute; }

TimeScaleSpec TimeScaleSpec::full(TimeScaleKind kind) {
  switch (kind) {
    case TimeScaleKind::HourOfDay: return {kind, 0.0, 24.0};
    case TimeScaleKind::DayOfWeek: return {kind, 0.0, 7.0};
    case TimeScaleKind::DayOfMonth: return {kind, 0.0, 31.0};
    case TimeScaleKind::MonthOfYear: return {kind, 0.0, 12.0};
    case TimeScaleKind::Absolute: break;
  }
  throw StatsError(StatsErrorKind::InvalidScale, "absolute scale has no full cycle");
}

TimeScaleSpec TimeScaleSpec::absolute(Timestamp from, Timestamp to) {
  return {TimeScaleKind::Absolute, static_cast<double>(from.time_since_epoch().count()),
          static_cast<double>(to.time_since_epoch().count())};
}

void TimeScaleSpec::validate() const {
  if (!(t0 < tN)) throw StatsError(StatsErrorKind::InvalidConfig, "time scale requires t0 < tN");
}

int TimeScaleSpec::categories() const {
  switch (kind) {
    case TimeScaleKind::HourOfDay: return 24;
    case TimeScaleKind::DayOfWeek: return 7;
    case TimeScaleKind::DayOfMonth: return 31;
    case TimeScaleKind::MonthOfYear: return 12;
    case TimeScaleKind::Absolute: return 0;
  }
  return 0;
}

double project_occurrence(Timestamp t, const TimeScaleSpec& scale) {
  scale.validate();
  double c = component(t, scale.kind);
  if (scale.kind == TimeScaleKind::Absolute) {
    if (c < scale.t0 || c > scale.tN) {
      throw StatsError(StatsErrorKind::OutOfRange, "timestamp " + format_timestamp(t) + " outside absolute scale");
    }
    return (c - scale.t0) / (scale.tN - scale.t0);
  }
  return std::clamp((c - scale.t0) / (scale.tN - scale.t0), 0.0, 1.0);
}

int color_key_of(Timestamp t, const TimeScaleSpec& color_scale) {
  if (!is_cyclic(color_scale.kind)) {
    throw StatsError(StatsErrorKind::InvalidScale, "color scale must be cyclic");
  }
  auto day_start = floor<days>(t);
  Date ymd{day_start};
  switch (color_scale.kind) {
    case TimeScaleKind::HourOfDay: return static_cast<int>(duration_cast<hours>(t - day_start).count());
    case TimeScaleKind::DayOfWeek: return weekday_index(ymd);
    case TimeScaleKind::DayOfMonth: return static_cast<int>(static_cast<unsigned>(ymd.day())) - 1;
    case TimeScaleKind::MonthOfYear: return static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
    case TimeScaleKind::Absolute: break;
  }
  return 0;
}

std::string color_label(TimeScaleKind kind, int key) {
  char buf[8];
  switch (kind) {
    case TimeScaleKind::HourOfDay:
      std::snprintf(buf, sizeof buf, "%02d:00", key);
      return buf;
    case TimeScaleKind::DayOfWeek: return weekday_name(key);
    case TimeScaleKind::DayOfMonth: return std::to_string(key + 1);
    case TimeScaleKind::MonthOfYear: return month_name(key);
    case TimeScaleKind::Absolute: break;
  }
  return {};
}

void StatsConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw StatsError(StatsErrorKind::InvalidConfig, "k must be > 0");
}

Quartiles quartiles(std::vector<double> x) {
  if (x.empty()) throw StatsError(StatsErrorKind::EmptyInput, "quartiles of an empty multiset");
  const std::size_t n = x.size();
  Quartiles q{};
  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  q[0] = *lo_it;
  q[4] = *hi_it;
  constexpr std::array<double, 3> kProbs = {0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < kProbs.size(); ++i) {
    double h = static_cast<double>(n - 1) * kProbs[i];
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto nth = x.begin() + static_cast<std::ptrdiff_t>(lo);
    std::nth_element(x.begin(), nth, x.end());
    double x_lo = *nth;
    double x_hi = lo + 1 < n ? *std::min_element(nth + 1, x.end()) : x_lo;
    q[i + 1] = x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
  }
  return q;
}

Fence tukey_fence(const Quartiles& q, double k) {
  double iqr = q[3] - q[1];
  return {q[1] - k * iqr, q[3] + k * iqr};
}

OutlierPartition classify_outliers(const std::vector<double>& durations, const Quartiles& q, double k) {
  Fence f = tukey_fence(q, k);
  OutlierPartition p;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    (is_outlier(durations[i], f) ? p.outliers : p.quartile_points).push_back(i);
  }
  return p;
}

std::size_t EventBox::outlier_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const DataPoint& p) { return p.is_outlier; }));
}

EventBox build_event_box(const std::string& event_type, const std::vector<Occurrence>& occurrences,
                         const TimeScaleSpec& axis, const std::optional<TimeScaleSpec>& color,
                         const StatsConfig& cfg) {
  if (occurrences.empty()) throw StatsError(StatsErrorKind::EmptyInput, "event box without occurrences");
  cfg.validate();
  if (color && !is_cyclic(color->kind)) {
    throw StatsError(StatsErrorKind::InvalidScale, "color scale must be cyclic");
  }

  std::vector<double> durations;
  durations.reserve(occurrences.size());
  for (const auto& o : occurrences) durations.push_back(o.duration);

  EventBox box;
  box.event_type = event_type;
  box.count = occurrences.size();
  box.q = quartiles(durations);
  box.fence = tukey_fence(box.q, cfg.k);
  box.points.reserve(occurrences.size());
  for (const auto& o : occurrences) {
    DataPoint p;
    p.duration = o.duration;
    p.occurrence = o.start;
    p.axis_pos = project_occurrence(o.start, axis);
    if (color) p.color_key = color_key_of(o.start, *color);
    p.is_outlier = is_outlier(o.duration, box.fence);
    p.member_ref = o.member_ref;
    box.points.push_back(std::move(p));
  }
  return box;
}

// Flag table, one distinct configuration per preset:
//   preset                  collapsed  outliers  quartile pts  color
//   point                   yes        no        no            time-scale
//   interval-no-outliers    no         no        no            time-scale
//   interval-with-outliers  no         yes       yes           time-scale
//   detailed-quartiles      no         no        yes           time-scale
//   plain-quartiles         no         yes       no            time-scale
//   uncolored               no         yes       yes           uniform-alpha
bool DetailLevel::collapsed() const { return preset == DetailPreset::Point; }

bool DetailLevel::show_outlier_points() const {
  return preset == DetailPreset::IntervalWithOutliers || preset == DetailPreset::PlainQuartiles ||
         preset == DetailPreset::Uncolored;
}

bool DetailLevel::show_quartile_points() const {
  return preset == DetailPreset::IntervalWithOutliers || preset == DetailPreset::DetailedQuartiles ||
         preset == DetailPreset::Uncolored;
}

ColorMode DetailLevel::color_mode() const {
  return preset == DetailPreset::Uncolored ? ColorMode::UniformAlpha : ColorMode::TimeScale;
}

const char* to_string(DetailPreset preset) {
  switch (preset) {
    case DetailPreset::Point: return "point";
    case DetailPreset::IntervalNoOutliers: return "interval-no-outliers";
    case DetailPreset::IntervalWithOutliers: return "interval-with-outliers";
    case DetailPreset::DetailedQuartiles: return "detailed-quartiles";
    case DetailPreset::PlainQuartiles: return "plain-quartiles";
    case DetailPreset::Uncolored: return "uncolored";
  }
  return "?";
}

std::optional<DetailPreset> parse_detail_preset(std::string_view name) {
  for (auto p : {DetailPreset::Point, DetailPreset::IntervalNoOutliers, DetailPreset::IntervalWithOutliers,
                 DetailPreset::DetailedQuartiles, DetailPreset::PlainQuartiles, DetailPreset::Uncolored}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

const char* to_string(ColorMode mode) {
  return mode == ColorMode::TimeScale ? "time-scale" : "uniform-alpha";
}

void FilterSpec::validate() const {
  if (date_from && date_to && *date_to < *date_from) {
    throw StatsError(StatsErrorKind::InvalidConfig, "date_from must not be after date_to");
  }
  if (days_of_week) {
    if (days_of_week->empty()) throw StatsError(StatsErrorKind::InvalidConfig, "days_of_week must be nonempty");
    for (int d : *days_of_week) {
      if (d < 0 || d > 6) throw StatsError(StatsErrorKind::InvalidConfig, "weekday index out of range");
    }
  }
}

bool FilterSpec::accepts(Date start_date) const {
  if (date_from && start_date < *date_from) return false;
  if (date_to && *date_to < start_date) return false;
  if (days_of_week && !days_of_week->contains(weekday_index(start_date))) return false;
  return true;
}

std::vector<EventSequence> apply_filter(const std::vector<EventSequence>& sequences, const FilterSpec& f) {
  if (f.empty()) return sequences;
  std::vector<EventSequence> out;
  for (const auto& s : sequences) {
    if (f.accepts(s.start_date)) out.push_back(s);
  }
  return out;
}

std::vector<SubRow> breakdown_row(const UniqueSequence& row, BreakdownCriterion criterion) {
  (void)criterion;  // day-of-week is the only criterion
  std::array<std::vector<const EventSequence*>, 7> groups;
  for (const auto* m : row.members) groups[static_cast<std::size_t>(weekday_index(m->start_date))].push_back(m);
  std::vector<SubRow> out;
  for (int d = 0; d < 7; ++d) {
    auto& g = groups[static_cast<std::size_t>(d)];
    if (g.empty()) continue;
    out.push_back(SubRow{d, UniqueSequence{row.signature, std::move(g)}});
  }
  return out;
}

}  // namespace evseq
