#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evseq/alignment.hpp"
#include "evseq/timestats.hpp"

#include <json.hpp>

namespace evseq {

inline constexpr int kLayoutSchemaVersion = 1;

struct LayoutConfig {
  double width_per_second = 0.05;  // 1 hour = 180 px
  double min_box_width = 12.0;
  double point_box_width = 6.0;
  double min_row_height = 10.0;
  double height_per_member = 0.5;
  double gap_x = 8.0;
  double gap_y = 4.0;
  double margin_x = 16.0;
  double margin_top = 40.0;  // room for the axis header
  double legend_height = 24.0;

  void validate() const;
};

class InconsistentInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OverviewTotals {
  std::size_t n_event_types = 0;
  std::size_t n_sequences = 0;
  std::size_t n_unique_sequences = 0;           // before coverage selection
  std::size_t n_selected_unique_sequences = 0;  // after coverage selection
  std::size_t n_selected_sequences = 0;
  double coverage_threshold = 0.0;
  double coverage_ratio = 0.0;
  std::optional<TimeExtent> time_extent;
};

// One displayed row: a selected unique sequence, or one weekday sub-row of it.
struct RowInput {
  Signature signature;
  std::size_t frequency = 0;
  std::size_t grid_row = 0;           // index into ColumnGrid::placements
  std::optional<int> breakdown_weekday;
  std::vector<EventBox> boxes;        // one per signature position
  std::vector<DetailLevel> lods;      // one per signature position
};

struct OverviewInput {
  ColumnGrid grid;
  AnchorSet anchors;
  std::vector<RowInput> rows;  // display order
  TimeScaleSpec axis;
  std::optional<TimeScaleSpec> color;
  OverviewTotals totals;
};

struct PlacedPoint {
  double x = 0.0;
  double y = 0.0;
  double duration = 0.0;
  double axis_pos = 0.0;
  Timestamp occurrence;
  std::optional<int> color_key;
  bool is_outlier = false;
  bool visible = false;
  std::string member_ref;
};

struct QuartileRect {
  double x = 0.0;
  double width = 0.0;
  int fill = 0;  // 0: Q0-Q1, 1: Q1-Q2, 2: Q2-Q3, 3: Q3-Q4
};

struct PlacedBox {
  std::size_t column = 0;
  std::size_t position = 0;
  std::string event_type;
  double x = 0.0, y = 0.0, width = 0.0, height = 0.0;
  std::size_t count = 0;
  Quartiles q{};
  Fence fence{0.0, 0.0};
  DetailLevel lod;
  std::vector<QuartileRect> quartile_rects;  // empty when collapsed
  std::vector<PlacedPoint> points;
};

struct LayoutRow {
  std::size_t index = 0;
  Signature signature;
  std::size_t frequency = 0;
  std::optional<int> breakdown_weekday;
  double y = 0.0;
  double height = 0.0;
  std::vector<PlacedBox> boxes;
};

struct LayoutColumn {
  std::size_t index = 0;
  double x = 0.0;
  double width = 0.0;
  std::optional<std::string> anchor;
};

struct LegendEntry {
  int index;
  std::string label;
};

struct OverviewLayout {
  std::vector<LayoutRow> rows;
  std::vector<LayoutColumn> columns;
  TimeScaleSpec axis;
  std::optional<TimeScaleSpec> color;
  std::vector<LegendEntry> color_legend;
  OverviewTotals totals;
  double width = 0.0;
  double height = 0.0;
};

double row_height(std::size_t frequency, const LayoutConfig& cfg);
double box_width(const Quartiles& q, const DetailLevel& lod, const LayoutConfig& cfg);

OverviewLayout compute_layout(const OverviewInput& input, const LayoutConfig& cfg = {});

nlohmann::json layout_to_json(const OverviewLayout& layout);
// Canonical serialized layout document.
std::string layout_document(const OverviewLayout& layout);

std::string render_svg(const OverviewLayout& layout);

nlohmann::json time_scale_to_json(const TimeScaleSpec& scale);

}  // namespace evseq
