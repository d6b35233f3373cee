#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evseq/alignment.hpp"
#include "evseq/ingest.hpp"
#include "evseq/layout.hpp"
#include "evseq/sequence.hpp"
#include "evseq/timestats.hpp"

#include <json.hpp>

namespace evseq {

// A loaded event log with its per-identifier sequences.
class Dataset {
 public:
  explicit Dataset(EventLog log);

  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;

  const EventLog& log() const { return log_; }
  const std::vector<EventSequence>& sequences() const { return sequences_; }
  std::size_t unique_sequence_count() const { return unique_count_; }

 private:
  EventLog log_;
  std::vector<EventSequence> sequences_;
  std::size_t unique_count_ = 0;
};

nlohmann::json dataset_summary(const Dataset& ds);

// The vertical axis request. An absolute axis without a window spans the
// filtered data.
struct AxisRequest {
  TimeScaleKind kind = TimeScaleKind::HourOfDay;
  std::optional<std::pair<double, double>> window;
  friend bool operator==(const AxisRequest&, const AxisRequest&) = default;
};

struct CellKey {
  std::size_t row;
  std::size_t column;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

// Everything that determines an overview.
struct OverviewParams {
  AnchorSet anchors;
  FilterSpec filter;
  AxisRequest axis;
  std::optional<TimeScaleSpec> color = TimeScaleSpec::full(TimeScaleKind::DayOfWeek);
  StatsConfig stats;
  double coverage = 0.8;
  std::size_t min_frequency = 1;
  std::map<std::string, DetailPreset> lods_by_type;
  std::map<CellKey, DetailPreset> lods_by_cell;  // display (row, column)
  std::set<Signature> breakdowns;
  LayoutConfig layout;
};

// Validation failure for one parameter field.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Throws ParamError naming the offending field.
void validate_params(const OverviewParams& params, const Dataset& ds);

// JSON state form, keys: anchors, filter, axis_scale, color_scale, stats,
// coverage, lods, breakdowns. to_json always emits every key.
nlohmann::json params_to_json(const OverviewParams& params);
// Applies the keys present in `patch` on top of `base`. Throws ParamError on
// malformed fields.
OverviewParams apply_patch(const OverviewParams& base, const nlohmann::json& patch);

TimeScaleSpec time_scale_from_json(const nlohmann::json& j, const std::string& field);

// Runs filter, coverage selection, similarity ordering, alignment, event
// boxes and layout.
OverviewLayout compute_overview(const Dataset& ds, const OverviewParams& params);

}  // namespace evseq
