#include "evseq/engine.hpp"

#include <algorithm>
#include <cmath>

#include "evseq/similarity.hpp"

namespace evseq {

using nlohmann::json;

Dataset::Dataset(EventLog log) : log_(std::move(log)), sequences_(build_sequences(log_)) {
  unique_count_ = extract_unique_sequences(sequences_).size();
}

namespace {

json extent_json(const TimeExtent& e) { return json{format_timestamp(e.first), format_timestamp(e.last)}; }

std::optional<TimeExtent> extent_of(const std::vector<EventSequence>& seqs) {
  std::optional<TimeExtent> out;
  for (const auto& s : seqs) {
    for (const auto& e : s.events) {
      Timestamp last = e.end.value_or(e.start);
      if (!out) {
        out = TimeExtent{e.start, last};
      } else {
        out->first = std::min(out->first, e.start);
        out->last = std::max(out->last, last);
      }
    }
  }
  return out;
}

TimeScaleSpec resolve_axis(const AxisRequest& req, const std::optional<TimeExtent>& extent) {
  if (req.kind != TimeScaleKind::Absolute) {
    if (req.window) return {req.kind, req.window->first, req.window->second};
    return TimeScaleSpec::full(req.kind);
  }
  if (req.window) return {req.kind, req.window->first, req.window->second};
  if (!extent) return {req.kind, 0.0, 1.0};
  auto s = TimeScaleSpec::absolute(extent->first, extent->last);
  if (!(s.t0 < s.tN)) s.tN = s.t0 + 1.0;
  return s;
}

}  // namespace

json dataset_summary(const Dataset& ds) {
  return json{{"n_event_types", ds.log().type_catalog().size()},
              {"n_sequences", ds.sequences().size()},
              {"n_unique_sequences", ds.unique_sequence_count()},
              {"n_records", ds.log().size()},
              {"time_extent", extent_json(ds.log().time_extent())}};
}

void validate_params(const OverviewParams& p, const Dataset& ds) {
  const auto& catalog = ds.log().type_catalog();
  for (const auto& a : p.anchors.anchors()) {
    if (!catalog.contains(a)) throw ParamError("anchors", "unknown event type '" + a + "'");
  }
  try {
    p.filter.validate();
  } catch (const StatsError& e) {
    throw ParamError("filter", e.what());
  }
  if (p.axis.window) {
    if (!(p.axis.window->first < p.axis.window->second)) throw ParamError("axis_scale", "requires t0 < tN");
    if (p.axis.kind == TimeScaleKind::Absolute) {
      const auto& ext = ds.log().time_extent();
      auto full = TimeScaleSpec::absolute(ext.first, ext.last);
      if (p.axis.window->first > full.t0 || p.axis.window->second < full.tN) {
        throw ParamError("axis_scale", "absolute window must cover the dataset time extent");
      }
    }
  }
  if (p.color) {
    if (!is_cyclic(p.color->kind)) throw ParamError("color_scale", "color scale must be cyclic");
    if (!(p.color->t0 < p.color->tN)) throw ParamError("color_scale", "requires t0 < tN");
  }
  if (!(p.stats.k > 0.0) || !std::isfinite(p.stats.k)) throw ParamError("stats", "k must be > 0");
  if (!(p.coverage > 0.0 && p.coverage <= 1.0)) throw ParamError("coverage", "threshold must be in (0, 1]");
  if (p.min_frequency < 1) throw ParamError("coverage", "min_frequency must be >= 1");
  for (const auto& [type, _] : p.lods_by_type) {
    if (!catalog.contains(type)) throw ParamError("lods", "unknown event type '" + type + "'");
  }
  try {
    p.layout.validate();
  } catch (const std::invalid_argument& e) {
    throw ParamError("layout", e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON state form
// ---------------------------------------------------------------------------

TimeScaleSpec time_scale_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParamError(field, "expected an object with a string 'kind'");
  }
  auto kind = parse_time_scale_kind(j["kind"].get<std::string>());
  if (!kind) throw ParamError(field, "unknown time scale kind '" + j["kind"].get<std::string>() + "'");
  bool has0 = j.contains("t0") && !j["t0"].is_null();
  bool hasN = j.contains("tN") && !j["tN"].is_null();
  if (has0 != hasN) throw ParamError(field, "t0 and tN must be given together");
  if (!has0) {
    if (*kind == TimeScaleKind::Absolute) return {*kind, 0.0, 0.0};
    return TimeScaleSpec::full(*kind);
  }
  auto bound = [&](const json& v) -> double {
    if (*kind == TimeScaleKind::Absolute) {
      if (!v.is_string()) throw ParamError(field, "absolute bounds must be ISO-8601 timestamps");
      auto t = parse_timestamp(v.get<std::string>());
      if (!t) throw ParamError(field, "unparseable timestamp '" + v.get<std::string>() + "'");
      return static_cast<double>(t->time_since_epoch().count());
    }
    if (!v.is_number()) throw ParamError(field, "bounds must be numbers");
    return v.get<double>();
  };
  TimeScaleSpec s{*kind, bound(j["t0"]), bound(j["tN"])};
  if (!(s.t0 < s.tN)) throw ParamError(field, "requires t0 < tN");
  return s;
}

namespace {

json axis_to_json(const AxisRequest& a) {
  if (a.window) return time_scale_to_json(TimeScaleSpec{a.kind, a.window->first, a.window->second});
  return json{{"kind", to_string(a.kind)}, {"t0", nullptr}, {"tN", nullptr}};
}

AxisRequest axis_from_json(const json& j) {
  TimeScaleSpec s = time_scale_from_json(j, "axis_scale");
  bool explicit_window = j.contains("t0") && !j["t0"].is_null();
  AxisRequest a{s.kind, std::nullopt};
  if (explicit_window) a.window = std::make_pair(s.t0, s.tN);
  return a;
}

json filter_to_json(const FilterSpec& f) {
  json j;
  j["date_from"] = f.date_from ? json(format_date(*f.date_from)) : json(nullptr);
  j["date_to"] = f.date_to ? json(format_date(*f.date_to)) : json(nullptr);
  if (f.days_of_week) {
    json days = json::array();
    for (int d : *f.days_of_week) days.push_back(weekday_name(d));
    j["days_of_week"] = days;
  } else {
    j["days_of_week"] = nullptr;
  }
  return j;
}

FilterSpec filter_from_json(const json& j) {
  if (!j.is_object()) throw ParamError("filter", "expected an object");
  FilterSpec f;
  auto date = [&](const char* key) -> std::optional<Date> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw ParamError("filter", std::string(key) + " must be a YYYY-MM-DD string");
    auto d = parse_date(j[key].get<std::string>());
    if (!d) throw ParamError("filter", std::string("unparseable ") + key);
    return d;
  };
  f.date_from = date("date_from");
  f.date_to = date("date_to");
  if (j.contains("days_of_week") && !j["days_of_week"].is_null()) {
    if (!j["days_of_week"].is_array()) throw ParamError("filter", "days_of_week must be an array");
    std::set<int> days;
    for (const auto& d : j["days_of_week"]) {
      if (!d.is_string()) throw ParamError("filter", "days_of_week entries must be weekday names");
      auto w = parse_weekday(d.get<std::string>());
      if (!w) throw ParamError("filter", "unknown weekday '" + d.get<std::string>() + "'");
      days.insert(*w);
    }
    f.days_of_week = days;
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "date_from" && key != "date_to" && key != "days_of_week") {
      throw ParamError("filter", "unknown key '" + key + "'");
    }
  }
  try {
    f.validate();
  } catch (const StatsError& e) {
    throw ParamError("filter", e.what());
  }
  return f;
}

DetailPreset preset_from_json(const json& j) {
  if (!j.is_string()) throw ParamError("lods", "preset must be a string");
  auto p = parse_detail_preset(j.get<std::string>());
  if (!p) throw ParamError("lods", "unknown level of detail '" + j.get<std::string>() + "'");
  return *p;
}

std::vector<std::string> strings_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParamError(field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParamError(field, "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

json params_to_json(const OverviewParams& p) {
  json by_type = json::object();
  for (const auto& [type, preset] : p.lods_by_type) by_type[type] = to_string(preset);
  json by_cell = json::array();
  for (const auto& [cell, preset] : p.lods_by_cell) {
    by_cell.push_back({{"row", cell.row}, {"column", cell.column}, {"preset", to_string(preset)}});
  }
  json breakdowns = json::array();
  for (const auto& sig : p.breakdowns) breakdowns.push_back(sig);

  return json{{"anchors", p.anchors.anchors()},
              {"filter", filter_to_json(p.filter)},
              {"axis_scale", axis_to_json(p.axis)},
              {"color_scale", p.color ? time_scale_to_json(*p.color) : json(nullptr)},
              {"stats", {{"k", p.stats.k}}},
              {"coverage", {{"threshold", p.coverage}, {"min_frequency", p.min_frequency}}},
              {"lods", {{"by_type", by_type}, {"by_cell", by_cell}}},
              {"breakdowns", breakdowns}};
}

OverviewParams apply_patch(const OverviewParams& base, const json& patch) {
  if (!patch.is_object()) throw ParamError("", "patch must be a JSON object");
  OverviewParams p = base;
  for (const auto& [key, value] : patch.items()) {
    if (key == "anchors") {
      try {
        p.anchors = AnchorSet(strings_from_json(value, "anchors"));
      } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const ParamError*>(&e)) throw;
        throw ParamError("anchors", e.what());
      }
    } else if (key == "filter") {
      p.filter = filter_from_json(value);
    } else if (key == "axis_scale") {
      p.axis = axis_from_json(value);
    } else if (key == "color_scale") {
      if (value.is_null()) {
        p.color.reset();
      } else {
        auto s = time_scale_from_json(value, "color_scale");
        if (!is_cyclic(s.kind)) throw ParamError("color_scale", "color scale must be cyclic");
        p.color = s;
      }
    } else if (key == "stats") {
      if (!value.is_object() || !value.contains("k") || !value["k"].is_number()) {
        throw ParamError("stats", "expected {\"k\": number}");
      }
      p.stats.k = value["k"].get<double>();
      if (!(p.stats.k > 0.0)) throw ParamError("stats", "k must be > 0");
    } else if (key == "coverage") {
      if (!value.is_object()) throw ParamError("coverage", "expected an object");
      if (value.contains("threshold")) {
        if (!value["threshold"].is_number()) throw ParamError("coverage", "threshold must be a number");
        p.coverage = value["threshold"].get<double>();
      }
      if (value.contains("min_frequency")) {
        if (!value["min_frequency"].is_number_integer() || value["min_frequency"].get<long long>() < 1) {
          throw ParamError("coverage", "min_frequency must be an integer >= 1");
        }
        p.min_frequency = value["min_frequency"].get<std::size_t>();
      }
      if (!(p.coverage > 0.0 && p.coverage <= 1.0)) throw ParamError("coverage", "threshold must be in (0, 1]");
    } else if (key == "lods") {
      if (!value.is_object()) throw ParamError("lods", "expected an object");
      p.lods_by_type.clear();
      p.lods_by_cell.clear();
      if (value.contains("by_type")) {
        if (!value["by_type"].is_object()) throw ParamError("lods", "by_type must be an object");
        for (const auto& [type, preset] : value["by_type"].items()) p.lods_by_type[type] = preset_from_json(preset);
      }
      if (value.contains("by_cell")) {
        if (!value["by_cell"].is_array()) throw ParamError("lods", "by_cell must be an array");
        for (const auto& c : value["by_cell"]) {
          auto index = [&](const char* key) {
            return c.contains(key) && c[key].is_number_integer() && c[key].get<long long>() >= 0;
          };
          if (!c.is_object() || !index("row") || !index("column") || !c.contains("preset")) {
            throw ParamError("lods", "by_cell entries need unsigned row, column and a preset");
          }
          p.lods_by_cell[CellKey{c["row"].get<std::size_t>(), c["column"].get<std::size_t>()}] =
              preset_from_json(c["preset"]);
        }
      }
    } else if (key == "breakdowns") {
      if (!value.is_array()) throw ParamError("breakdowns", "expected an array of signatures");
      p.breakdowns.clear();
      for (const auto& sig : value) p.breakdowns.insert(strings_from_json(sig, "breakdowns"));
    } else {
      throw ParamError(key, "unknown session field '" + key + "'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

OverviewLayout compute_overview(const Dataset& ds, const OverviewParams& params) {
  validate_params(params, ds);

  const std::vector<EventSequence> filtered = apply_filter(ds.sequences(), params.filter);
  std::optional<TimeExtent> extent = extent_of(filtered);

  OverviewInput in;
  in.anchors = params.anchors;
  in.axis = resolve_axis(params.axis, extent ? extent : std::optional<TimeExtent>(ds.log().time_extent()));
  in.color = params.color;
  in.totals.coverage_threshold = params.coverage;
  in.totals.n_sequences = filtered.size();
  in.totals.time_extent = extent;
  {
    std::set<std::string> types;
    for (const auto& s : filtered)
      for (const auto& e : s.events) types.insert(e.event_type);
    in.totals.n_event_types = types.size();
  }

  if (filtered.empty()) return compute_layout(in, params.layout);

  const auto uniques = extract_unique_sequences(filtered);
  const auto selection = select_by_coverage(uniques, params.coverage, params.min_frequency);
  in.totals.n_unique_sequences = uniques.size();
  in.totals.n_selected_unique_sequences = selection.selected.size();
  in.totals.coverage_ratio = selection.coverage_ratio;
  for (const auto& u : selection.selected) in.totals.n_selected_sequences += u.frequency();
  if (selection.selected.empty()) return compute_layout(in, params.layout);

  std::vector<Signature> signatures;
  std::vector<std::size_t> frequencies;
  for (const auto& u : selection.selected) {
    signatures.push_back(u.signature);
    frequencies.push_back(u.frequency());
  }
  const auto tree = complete_link_cluster(distance_matrix(signatures));
  const auto base_order = leaf_ordering(tree, frequencies);

  std::vector<AnchorMatch> matches;
  matches.reserve(signatures.size());
  for (std::size_t r = 0; r < signatures.size(); ++r) matches.push_back(match_anchors(signatures[r], params.anchors, r));
  in.grid = build_column_grid(signatures, matches, base_order, params.anchors);

  auto make_row = [&](const UniqueSequence& u, std::size_t grid_row, std::optional<int> weekday) {
    RowInput row;
    row.signature = u.signature;
    row.frequency = u.frequency();
    row.grid_row = grid_row;
    row.breakdown_weekday = weekday;
    const std::size_t display_row = in.rows.size();
    for (std::size_t pos = 0; pos < u.signature.size(); ++pos) {
      std::vector<Occurrence> occ;
      occ.reserve(u.members.size());
      for (const auto* m : u.members) {
        const auto& ev = m->events[pos];
        occ.push_back(Occurrence{duration_of(ev), ev.start, m->identifier});
      }
      row.boxes.push_back(build_event_box(u.signature[pos], occ, in.axis, in.color, params.stats));

      DetailLevel lod;
      std::size_t column = in.grid.placements[grid_row][pos];
      if (auto it = params.lods_by_cell.find(CellKey{display_row, column}); it != params.lods_by_cell.end()) {
        lod.preset = it->second;
      } else if (auto jt = params.lods_by_type.find(u.signature[pos]); jt != params.lods_by_type.end()) {
        lod.preset = jt->second;
      }
      row.lods.push_back(lod);
    }
    in.rows.push_back(std::move(row));
  };

  for (std::size_t grid_row : in.grid.row_order) {
    const auto& u = selection.selected[grid_row];
    if (params.breakdowns.contains(u.signature)) {
      for (const auto& sub : breakdown_row(u)) make_row(sub.row, grid_row, sub.weekday);
    } else {
      make_row(u, grid_row, std::nullopt);
    }
  }
  return compute_layout(in, params.layout);
}

}  // namespace evseq
