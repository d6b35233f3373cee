#include "evseq/layout.hpp"

#include <algorithm>
#include <cmath>

namespace evseq {

using nlohmann::json;

void LayoutConfig::validate() const {
  for (double v : {width_per_second, min_box_width, point_box_width, min_row_height, height_per_member}) {
    if (!(v > 0.0)) throw std::invalid_argument("layout scale factors must be > 0");
  }
  for (double v : {gap_x, gap_y, margin_x, margin_top, legend_height}) {
    if (v < 0.0) throw std::invalid_argument("layout gaps and margins must be >= 0");
  }
}

double row_height(std::size_t frequency, const LayoutConfig& cfg) {
  return std::max(cfg.min_row_height, cfg.height_per_member * static_cast<double>(frequency));
}

double box_width(const Quartiles& q, const DetailLevel& lod, const LayoutConfig& cfg) {
  if (lod.collapsed()) return cfg.point_box_width;
  return std::max(cfg.min_box_width, cfg.width_per_second * (q[4] - q[0]));
}

namespace {

double x_fraction(double duration, const Quartiles& q) {
  double span = q[4] - q[0];
  if (!(span > 0.0)) return 0.0;
  return (duration - q[0]) / span;
}

void check_consistent(const OverviewInput& in) {
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const auto& row = in.rows[r];
    if (row.grid_row >= in.grid.placements.size()) {
      throw InconsistentInput("row " + std::to_string(r) + " references missing grid row");
    }
    std::size_t positions = in.grid.placements[row.grid_row].size();
    if (row.signature.size() != positions || row.boxes.size() != positions || row.lods.size() != positions) {
      throw InconsistentInput("row " + std::to_string(r) + " disagrees with grid placements");
    }
    for (std::size_t p = 0; p < positions; ++p) {
      if (in.grid.placements[row.grid_row][p] >= in.grid.total_columns) {
        throw InconsistentInput("placement outside grid");
      }
      if (row.boxes[p].event_type != row.signature[p]) {
        throw InconsistentInput("box event type disagrees with signature");
      }
    }
  }
}

}  // namespace

OverviewLayout compute_layout(const OverviewInput& in, const LayoutConfig& cfg) {
  cfg.validate();
  check_consistent(in);

  OverviewLayout out;
  out.axis = in.axis;
  out.color = in.color;
  out.totals = in.totals;
  if (in.color) {
    for (int c = 0; c < in.color->categories(); ++c) out.color_legend.push_back({c, color_label(in.color->kind, c)});
  }

  const std::size_t ncols = in.rows.empty() ? 0 : in.grid.total_columns;
  std::vector<double> col_width(ncols, 0.0);
  for (const auto& row : in.rows) {
    const auto& place = in.grid.placements[row.grid_row];
    for (std::size_t p = 0; p < place.size(); ++p) {
      col_width[place[p]] = std::max(col_width[place[p]], box_width(row.boxes[p].q, row.lods[p], cfg));
    }
  }
  double x = cfg.margin_x;
  for (std::size_t c = 0; c < ncols; ++c) {
    LayoutColumn col{c, x, col_width[c], std::nullopt};
    for (std::size_t a = 0; a < in.grid.anchor_columns.size(); ++a) {
      if (in.grid.anchor_columns[a] == c) col.anchor = in.anchors.anchors().at(a);
    }
    out.columns.push_back(col);
    x += col_width[c] + cfg.gap_x;
  }
  out.width = std::max(x, 2.0 * cfg.margin_x) + cfg.margin_x;

  double y = cfg.margin_top;
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const auto& row = in.rows[r];
    LayoutRow lr;
    lr.index = r;
    lr.signature = row.signature;
    lr.frequency = row.frequency;
    lr.breakdown_weekday = row.breakdown_weekday;
    lr.y = y;
    lr.height = row_height(row.frequency, cfg);

    const auto& place = in.grid.placements[row.grid_row];
    for (std::size_t p = 0; p < place.size(); ++p) {
      const EventBox& eb = row.boxes[p];
      const DetailLevel& lod = row.lods[p];
      PlacedBox box;
      box.column = place[p];
      box.position = p;
      box.event_type = eb.event_type;
      box.x = out.columns[place[p]].x;
      box.y = lr.y;
      box.width = box_width(eb.q, lod, cfg);
      box.height = lr.height;
      box.count = eb.count;
      box.q = eb.q;
      box.fence = eb.fence;
      box.lod = lod;
      if (!lod.collapsed()) {
        for (int i = 0; i < 4; ++i) {
          double x0 = box.x + box.width * x_fraction(eb.q[static_cast<std::size_t>(i)], eb.q);
          double x1 = box.x + box.width * x_fraction(eb.q[static_cast<std::size_t>(i) + 1], eb.q);
          box.quartile_rects.push_back({x0, x1 - x0, i});
        }
      }
      box.points.reserve(eb.points.size());
      for (const auto& dp : eb.points) {
        PlacedPoint pp;
        pp.duration = dp.duration;
        pp.axis_pos = dp.axis_pos;
        pp.occurrence = dp.occurrence;
        pp.color_key = dp.color_key;
        pp.is_outlier = dp.is_outlier;
        pp.member_ref = dp.member_ref;
        pp.x = box.x + box.width * x_fraction(dp.duration, eb.q);
        pp.y = box.y + box.height * dp.axis_pos;
        pp.visible = !lod.collapsed() && (dp.is_outlier ? lod.show_outlier_points() : lod.show_quartile_points());
        box.points.push_back(std::move(pp));
      }
      lr.boxes.push_back(std::move(box));
    }
    y += lr.height + cfg.gap_y;
    out.rows.push_back(std::move(lr));
  }
  out.height = y + cfg.legend_height + cfg.gap_y;
  return out;
}

json time_scale_to_json(const TimeScaleSpec& scale) {
  json j;
  j["kind"] = to_string(scale.kind);
  if (scale.kind == TimeScaleKind::Absolute) {
    j["t0"] = format_timestamp(Timestamp{std::chrono::milliseconds{std::llround(scale.t0)}});
    j["tN"] = format_timestamp(Timestamp{std::chrono::milliseconds{std::llround(scale.tN)}});
  } else {
    j["t0"] = scale.t0;
    j["tN"] = scale.tN;
  }
  return j;
}

namespace {

json lod_to_json(const DetailLevel& lod) {
  return json{{"preset", to_string(lod.preset)},
              {"collapsed", lod.collapsed()},
              {"show_outlier_points", lod.show_outlier_points()},
              {"show_quartile_points", lod.show_quartile_points()},
              {"color_mode", to_string(lod.color_mode())}};
}

json point_to_json(const PlacedPoint& p) {
  json j{{"x", p.x},
         {"y", p.y},
         {"duration", p.duration},
         {"axis_pos", p.axis_pos},
         {"occurrence", format_timestamp(p.occurrence)},
         {"is_outlier", p.is_outlier},
         {"visible", p.visible},
         {"member_ref", p.member_ref}};
  j["color_key"] = p.color_key ? json(*p.color_key) : json(nullptr);
  return j;
}

json box_to_json(const PlacedBox& b) {
  json rects = json::array();
  for (const auto& r : b.quartile_rects) rects.push_back({{"x", r.x}, {"width", r.width}, {"fill", r.fill}});
  json points = json::array();
  for (const auto& p : b.points) points.push_back(point_to_json(p));
  return json{{"column", b.column},
              {"position", b.position},
              {"event_type", b.event_type},
              {"x", b.x},
              {"y", b.y},
              {"width", b.width},
              {"height", b.height},
              {"count", b.count},
              {"q", b.q},
              {"fence", {b.fence.lower, b.fence.upper}},
              {"lod", lod_to_json(b.lod)},
              {"quartile_boxes", rects},
              {"points", points}};
}

}  // namespace

json layout_to_json(const OverviewLayout& layout) {
  json rows = json::array();
  for (const auto& r : layout.rows) {
    json boxes = json::array();
    for (const auto& b : r.boxes) boxes.push_back(box_to_json(b));
    json row{{"index", r.index},
             {"signature", r.signature},
             {"frequency", r.frequency},
             {"y", r.y},
             {"height", r.height},
             {"boxes", boxes}};
    row["breakdown"] = r.breakdown_weekday ? json(weekday_name(*r.breakdown_weekday)) : json(nullptr);
    rows.push_back(std::move(row));
  }
  json columns = json::array();
  for (const auto& c : layout.columns) {
    json col{{"index", c.index}, {"x", c.x}, {"width", c.width}};
    col["anchor"] = c.anchor ? json(*c.anchor) : json(nullptr);
    columns.push_back(std::move(col));
  }
  json legend = json::array();
  for (const auto& e : layout.color_legend) legend.push_back({{"index", e.index}, {"label", e.label}});

  const auto& t = layout.totals;
  json totals{{"n_event_types", t.n_event_types},
              {"n_sequences", t.n_sequences},
              {"n_unique_sequences", t.n_unique_sequences},
              {"n_selected_unique_sequences", t.n_selected_unique_sequences},
              {"n_selected_sequences", t.n_selected_sequences},
              {"coverage_threshold", t.coverage_threshold},
              {"coverage_ratio", t.coverage_ratio}};
  totals["time_extent"] = t.time_extent ? json{format_timestamp(t.time_extent->first),
                                               format_timestamp(t.time_extent->last)}
                                        : json(nullptr);

  json doc{{"schema_version", kLayoutSchemaVersion},
           {"rows", rows},
           {"columns", columns},
           {"axis", time_scale_to_json(layout.axis)},
           {"color_legend", {{"scale", layout.color ? json(time_scale_to_json(*layout.color)) : json(nullptr)},
                             {"entries", legend}}},
           {"totals", totals},
           {"width", layout.width},
           {"height", layout.height}};
  return doc;
}

std::string layout_document(const OverviewLayout& layout) { return layout_to_json(layout).dump(); }

}  // namespace evseq
