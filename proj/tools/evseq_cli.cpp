// evseq: batch front end for the event-sequence engine.
//
//   evseq ingest-check LOG.csv
//   evseq overview LOG.csv [--coverage F] [--min-freq N] [--align TYPE]... [--from D] [--to D]
//                          [--days Mon,Thu] [--axis KIND] [--color KIND|none] [--k F]
//                          [--format json|svg] [--out PATH]
//   evseq generate SPEC.json [--seed N] [--out PATH]
//   evseq trend LOG.csv [--event TYPE] [--axis KIND]
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evseq/engine.hpp"
#include "evseq/synthetic.hpp"
#include "evseq/trend.hpp"

using nlohmann::json;
using namespace evseq;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw std::runtime_error("cannot write " + path);
}

struct OverviewArgs {
  std::string input;
  std::optional<double> coverage;
  std::optional<std::size_t> min_freq;
  std::vector<std::string> align;
  std::string from, to, days;
  std::string axis, color;
  std::optional<double> k;
  std::string format = "json";
  std::string out;
};

// The flags become a session patch so the CLI and the service share one
// parameter path.
json overview_patch(const OverviewArgs& a) {
  json patch = json::object();
  if (!a.align.empty()) patch["anchors"] = a.align;
  if (!a.from.empty() || !a.to.empty() || !a.days.empty()) {
    json f = json::object();
    if (!a.from.empty()) f["date_from"] = a.from;
    if (!a.to.empty()) f["date_to"] = a.to;
    if (!a.days.empty()) f["days_of_week"] = split_commas(a.days);
    patch["filter"] = f;
  }
  if (!a.axis.empty()) patch["axis_scale"] = {{"kind", a.axis}};
  if (!a.color.empty()) patch["color_scale"] = a.color == "none" ? json(nullptr) : json{{"kind", a.color}};
  if (a.k) patch["stats"] = {{"k", *a.k}};
  if (a.coverage || a.min_freq) {
    json c = json::object();
    if (a.coverage) c["threshold"] = *a.coverage;
    if (a.min_freq) c["min_frequency"] = *a.min_freq;
    patch["coverage"] = c;
  }
  return patch;
}

std::string period_of(const std::optional<TimeExtent>& extent) {
  if (!extent) return "-";
  using namespace std::chrono;
  auto days = duration_cast<duration<double, std::ratio<86400>>>(extent->last - extent->first).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f days", days);
  return format_date(date_of(extent->first)) + " .. " + format_date(date_of(extent->last)) + " (" + buf + ")";
}

int run_ingest_check(const std::string& input) {
  Dataset ds(load_event_log(input));
  std::cout << dataset_summary(ds).dump(2) << '\n';
  return 0;
}

int run_overview(const OverviewArgs& a) {
  if (a.format != "json" && a.format != "svg") throw UsageError("--format must be json or svg");
  Dataset ds(load_event_log(a.input));
  OverviewParams params = apply_patch(OverviewParams{}, overview_patch(a));
  OverviewLayout layout = compute_overview(ds, params);
  write_output(a.out, a.format == "svg" ? render_svg(layout) : layout_document(layout));

  // Summary on stdout only when the document went to a file.
  if (!a.out.empty() && a.out != "-") {
    const auto& t = layout.totals;
    std::printf("event types        %zu\n", t.n_event_types);
    std::printf("sequences          %zu\n", t.n_sequences);
    std::printf("unique sequences   %zu\n", t.n_unique_sequences);
    std::printf("selected unique    %zu (%zu sequences, coverage %.4f of threshold %.4f)\n",
                t.n_selected_unique_sequences, t.n_selected_sequences, t.coverage_ratio, t.coverage_threshold);
    std::printf("time period        %s\n", period_of(t.time_extent).c_str());
    std::printf("rows               %zu\n", layout.rows.size());
  }
  return 0;
}

int run_generate(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out) {
  SyntheticSpec spec = load_synthetic_spec(spec_path);
  if (seed) spec.seed = *seed;
  spec.validate();
  write_output(out, event_log_to_csv(generate_event_log(spec)));
  return 0;
}

int run_trend(const std::string& input, const std::string& event, const std::string& axis_name) {
  Dataset ds(load_event_log(input));
  auto kind = parse_time_scale_kind(axis_name);
  if (!kind) throw UsageError("unknown time scale '" + axis_name + "'");
  if (!event.empty() && !ds.log().type_catalog().contains(event)) {
    throw ParamError("event", "event type '" + event + "' is not in the log");
  }
  TimeScaleSpec axis = TimeScaleSpec::full(*kind);
  if (*kind == TimeScaleKind::Absolute) {
    auto ext = ds.log().time_extent();
    if (ext.last == ext.first) ext.last += std::chrono::milliseconds(1);
    axis = TimeScaleSpec::absolute(ext.first, ext.last);
  }
  std::printf("%-32s %8s %10s\n", "event_type", "points", "spearman");
  for (const auto& row : trend_report(ds.sequences(), event, axis)) {
    std::printf("%-32s %8zu %10.4f\n", row.event_type.c_str(), row.points, row.correlation);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-sequence overview engine"};
  app.require_subcommand(1);

  std::string check_input;
  auto* check = app.add_subcommand("ingest-check", "Validate an event log and print its summary");
  check->add_option("input", check_input, "CSV event log")->required();

  OverviewArgs ov;
  auto* overview = app.add_subcommand("overview", "Compute the overview layout document");
  overview->add_option("input", ov.input, "CSV event log")->required();
  overview->add_option("--coverage", ov.coverage, "Coverage threshold in (0, 1]");
  overview->add_option("--min-freq", ov.min_freq, "Minimum unique-sequence frequency");
  overview->add_option("--align", ov.align, "Anchor event type, repeatable, in order");
  overview->add_option("--from", ov.from, "First start date, YYYY-MM-DD");
  overview->add_option("--to", ov.to, "Last start date, YYYY-MM-DD");
  overview->add_option("--days", ov.days, "Comma-separated weekdays, e.g. Mon,Thu");
  overview->add_option("--axis", ov.axis, "Vertical time scale");
  overview->add_option("--color", ov.color, "Color time scale, or none");
  overview->add_option("--k", ov.k, "Tukey fence multiplier");
  overview->add_option("--format", ov.format, "json or svg");
  overview->add_option("--out", ov.out, "Output path (stdout when omitted)");

  std::string spec_path, gen_out;
  std::optional<std::uint64_t> seed;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic event log from a spec file");
  generate->add_option("spec", spec_path, "Synthetic spec JSON")->required();
  generate->add_option("--seed", seed, "Override the spec's seed");
  generate->add_option("--out", gen_out, "Output CSV path (stdout when omitted)");

  std::string trend_input, trend_event, trend_axis = "hour-of-day";
  auto* trend = app.add_subcommand("trend", "Spearman correlation of duration against time of occurrence");
  trend->add_option("input", trend_input, "CSV event log")->required();
  trend->add_option("--event", trend_event, "Restrict to one event type");
  trend->add_option("--axis", trend_axis, "Time scale for occurrence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*check) return run_ingest_check(check_input);
    if (*overview) return run_overview(ov);
    if (*generate) return run_generate(spec_path, seed, gen_out);
    if (*trend) return run_trend(trend_input, trend_event, trend_axis);
  } catch (const UsageError& e) {
    std::cerr << "evseq: " << e.what() << '\n';
    return kUsage;
  } catch (const IngestError& e) {
    std::cerr << "evseq: " << to_string(e.kind());
    if (e.line() > 0) std::cerr << " at line " << e.line();
    std::cerr << ": " << e.what() << '\n';
    return kData;
  } catch (const ParamError& e) {
    std::cerr << "evseq: invalid " << (e.field().empty() ? "parameters" : e.field()) << ": " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "evseq: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
