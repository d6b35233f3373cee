#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evseq/sequence.hpp"
#include "evseq/time.hpp"

namespace evseq {

enum class StatsErrorKind { EmptyInput, OutOfRange, InvalidScale, InvalidConfig };

class StatsError : public std::invalid_argument {
 public:
  StatsError(StatsErrorKind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  StatsErrorKind kind() const { return kind_; }

 private:
  StatsErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Time scales
// ---------------------------------------------------------------------------

enum class TimeScaleKind { HourOfDay, DayOfWeek, DayOfMonth, MonthOfYear, Absolute };

const char* to_string(TimeScaleKind kind);
std::optional<TimeScaleKind> parse_time_scale_kind(std::string_view name);
bool is_cyclic(TimeScaleKind kind);

// Window [t0, tN] on one scale. Units depend on the kind:
//   hour-of-day   hours since midnight UTC       (full cycle [0, 24])
//   day-of-week   days since Monday 00:00        (full cycle [0, 7])
//   day-of-month  days since the 1st, 00:00      (full cycle [0, 31])
//   month-of-year months since Jan 1st, 00:00    (full cycle [0, 12])
//   absolute      milliseconds since the epoch
struct TimeScaleSpec {
  TimeScaleKind kind = TimeScaleKind::HourOfDay;
  double t0 = 0.0;
  double tN = 24.0;

  // Full-cycle window for cyclic kinds. Absolute scales need explicit bounds.
  static TimeScaleSpec full(TimeScaleKind kind);
  static TimeScaleSpec absolute(Timestamp from, Timestamp to);

  // Throws StatsError(InvalidConfig) unless t0 < tN.
  void validate() const;
  // Number of categories when used as a color scale; 0 for absolute.
  int categories() const;

  friend bool operator==(const TimeScaleSpec&, const TimeScaleSpec&) = default;
};

// Position of `t` on the scale's window as a fraction in [0, 1]. Cyclic
// scales clamp components outside the window; absolute throws OutOfRange.
double project_occurrence(Timestamp t, const TimeScaleSpec& scale);

// Category index of `t`: hour 0-23, Monday=0..Sunday=6, day 0-30, January=0..December=11.
int color_key_of(Timestamp t, const TimeScaleSpec& color_scale);
std::string color_label(TimeScaleKind kind, int key);

// ---------------------------------------------------------------------------
// Quartiles and outliers
// ---------------------------------------------------------------------------

using Quartiles = std::array<double, 5>;  // Q0 (min) .. Q4 (max)

struct StatsConfig {
  double k = 1.5;
  void validate() const;
  friend bool operator==(const StatsConfig&, const StatsConfig&) = default;
};

// Linear interpolation of order statistics at rank (n-1)·p.
Quartiles quartiles(std::vector<double> durations);

struct Fence {
  double lower;
  double upper;
};

Fence tukey_fence(const Quartiles& q, double k);

// A point is an outlier iff its duration lies strictly outside the fence.
inline bool is_outlier(double duration, const Fence& f) { return duration < f.lower || duration > f.upper; }

struct OutlierPartition {
  std::vector<std::size_t> quartile_points;  // indices into the input
  std::vector<std::size_t> outliers;
};

OutlierPartition classify_outliers(const std::vector<double>& durations, const Quartiles& q, double k);

// ---------------------------------------------------------------------------
// Event boxes
// ---------------------------------------------------------------------------

struct Occurrence {
  double duration;
  Timestamp start;
  std::string member_ref;
};

struct DataPoint {
  double duration = 0.0;
  Timestamp occurrence;
  double axis_pos = 0.0;
  std::optional<int> color_key;
  bool is_outlier = false;
  std::string member_ref;
};

struct EventBox {
  std::string event_type;
  std::size_t count = 0;
  Quartiles q{};
  Fence fence{0.0, 0.0};
  std::vector<DataPoint> points;

  std::size_t outlier_count() const;
};

EventBox build_event_box(const std::string& event_type, const std::vector<Occurrence>& occurrences,
                         const TimeScaleSpec& axis, const std::optional<TimeScaleSpec>& color,
                         const StatsConfig& cfg);

// ---------------------------------------------------------------------------
// Levels of detail
// ---------------------------------------------------------------------------

enum class DetailPreset {
  Point,
  IntervalNoOutliers,
  IntervalWithOutliers,
  DetailedQuartiles,
  PlainQuartiles,
  Uncolored,
};

enum class ColorMode { TimeScale, UniformAlpha };

struct DetailLevel {
  DetailPreset preset = DetailPreset::IntervalWithOutliers;

  bool collapsed() const;
  bool show_outlier_points() const;
  bool show_quartile_points() const;
  ColorMode color_mode() const;

  friend bool operator==(const DetailLevel&, const DetailLevel&) = default;
};

const char* to_string(DetailPreset preset);
std::optional<DetailPreset> parse_detail_preset(std::string_view name);
const char* to_string(ColorMode mode);

// ---------------------------------------------------------------------------
// Filters and breakdowns
// ---------------------------------------------------------------------------

struct FilterSpec {
  std::optional<Date> date_from;
  std::optional<Date> date_to;
  std::optional<std::set<int>> days_of_week;  // Monday = 0

  bool empty() const { return !date_from && !date_to && !days_of_week; }
  // Throws StatsError(InvalidConfig).
  void validate() const;
  bool accepts(Date start_date) const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

std::vector<EventSequence> apply_filter(const std::vector<EventSequence>& sequences, const FilterSpec& f);

enum class BreakdownCriterion { DayOfWeek };

struct SubRow {
  int weekday;  // Monday = 0
  UniqueSequence row;
};

// Members split by weekday of their start date, Monday first; empty groups omitted.
std::vector<SubRow> breakdown_row(const UniqueSequence& row,
                                  BreakdownCriterion criterion = BreakdownCriterion::DayOfWeek);

}  // namespace evseq
