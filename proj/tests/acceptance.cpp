// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
// A limit of 0 means the criterion states no runtime bound; the scale test
// times only the overview computation, inside its body.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evseq/engine.hpp"
#include "evseq/service.hpp"
#include "evseq/synthetic.hpp"
#include "evseq/trend.hpp"
#include "oracles.hpp"

using namespace evseq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && limit_s > 0 && secs >= limit_s) o.fail("too slow");
  char limit[32] = "no time limit";
  if (limit_s > 0) std::snprintf(limit, sizeof limit, "limit %g s", limit_s);
  std::printf("%s  %-36s %7.3f s (%s)%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, limit,
              o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

Signature chars(const std::string& s) {
  Signature out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void metric_suite(Outcome& o) {
  std::mt19937_64 rng(1001);
  auto random_seq = [&](std::size_t alpha) {
    std::vector<int> s(rng() % 21);
    for (auto& x : s) x = static_cast<int>(rng() % alpha);
    return s;
  };
  for (int t = 0; t < 1000; ++t) {
    std::size_t alpha = 1 + rng() % 18;
    auto a = random_seq(alpha), b = random_seq(alpha), c = random_seq(alpha);
    auto d = [](const std::vector<int>& x, const std::vector<int>& y) { return edit_distance<int>(x, y); };
    std::size_t ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c);
    if (ab != ba) o.fail("symmetry");
    if (d(a, a) != 0 || (ab == 0) != (a == b)) o.fail("identity");
    if (ac > ab + bc) o.fail("triangle inequality");
    std::size_t lo = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    if (ab < lo || ab > std::max(a.size(), b.size())) o.fail("length bounds");
    if (t % 10 == 0 && ab != oracle::edit_distance(a, b)) o.fail("disagrees with oracle");
  }
  std::size_t pair = edit_distance(chars("ABCDE"), chars("BCDFG"));
  if (pair != oracle::edit_distance(chars("ABCDE"), chars("BCDFG")) || pair != 3) {
    o.fail("ABCDE/BCDFG distance " + std::to_string(pair));
  }
}

void quartile_oracle(Outcome& o) {
  std::mt19937_64 rng(2002);
  std::lognormal_distribution<double> lognormal(4.0, 1.8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(1 + rng() % 1000);
    for (auto& x : v) {
      switch (t % 4) {
        case 0: x = lognormal(rng); break;
        case 1: x = 10.0 / std::pow(1.0 - unit(rng), 1.0 / 1.2); break;  // Pareto, alpha 1.2
        case 2: x = std::floor(lognormal(rng) / 20.0); break;            // heavy ties
        default: x = unit(rng) < 0.05 ? 1e5 * unit(rng) : 60.0 * unit(rng); break;
      }
    }
    auto q = quartiles(v);
    if (q != oracle::quartiles(v)) o.fail("quartiles differ at trial " + std::to_string(t));
    auto part = classify_outliers(v, q, 1.5);
    if (std::set<std::size_t>(part.outliers.begin(), part.outliers.end()) != oracle::outliers(v, 1.5)) {
      o.fail("outlier partition differs at trial " + std::to_string(t));
    }
    if (part.outliers.size() + part.quartile_points.size() != v.size()) o.fail("partition incomplete");
  }
}

void complete_link(Outcome& o) {
  std::mt19937_64 rng(3003);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + rng() % 50;
    DistanceMatrix d(n);
    int levels = t % 3 == 0 ? 3 : 1000;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, static_cast<double>(1 + rng() % levels));
    auto tree = complete_link_cluster(d);
    for (std::size_t k = 1; k < tree.merges.size(); ++k) {
      if (tree.merges[k - 1].height > tree.merges[k].height) o.fail("merge heights decrease");
    }
    auto ref = oracle::complete_link(d);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const auto& m = tree.merges[k];
      if (m.a != ref[k].a || m.b != ref[k].b || m.height != ref[k].height) o.fail("disagrees with naive oracle");
    }
    std::vector<std::size_t> freqs(n);
    for (auto& f : freqs) f = 1 + rng() % 100;
    for (const auto& order : {tree.leaf_order, leaf_ordering(tree, freqs)}) {
      std::vector<std::size_t> sorted = order, iota(n);
      std::sort(sorted.begin(), sorted.end());
      std::iota(iota.begin(), iota.end(), std::size_t{0});
      if (sorted != iota) o.fail("leaf order is not a permutation");
      std::vector<std::size_t> pos(n);
      for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;
      std::vector<std::pair<std::size_t, std::size_t>> span(2 * n - 1);
      std::vector<std::size_t> count(2 * n - 1, 1);
      for (std::size_t i = 0; i < n; ++i) span[i] = {pos[i], pos[i]};
      for (std::size_t k = 0; k + 1 < n; ++k) {
        auto [a, b] = std::pair{tree.merges[k].a, tree.merges[k].b};
        span[n + k] = {std::min(span[a].first, span[b].first), std::max(span[a].second, span[b].second)};
        count[n + k] = count[a] + count[b];
        if (span[n + k].second - span[n + k].first + 1 != count[n + k]) o.fail("cluster not contiguous");
      }
    }
  }
}

void alignment(Outcome& o) {
  std::mt19937_64 rng(4004);
  for (int t = 0; t < 200; ++t) {
    std::size_t alpha = 2 + rng() % 17;
    std::vector<Signature> rows(1 + rng() % 40);
    for (auto& r : rows) {
      r.resize(1 + rng() % 20);
      for (auto& e : r) e = "e" + std::to_string(rng() % alpha);
    }
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < alpha; ++i) pool.push_back("e" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + rng() % std::min<std::size_t>(alpha, 5));
    std::vector<std::size_t> base(rows.size());
    std::iota(base.begin(), base.end(), std::size_t{0});
    std::shuffle(base.begin(), base.end(), rng);

    for (const AnchorSet& anchors : {AnchorSet(pool), AnchorSet{}}) {
      std::vector<AnchorMatch> matches;
      for (std::size_t r = 0; r < rows.size(); ++r) matches.push_back(match_anchors(rows[r], anchors, r));
      auto g = build_column_grid(rows, matches, base, anchors);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& p = g.placements[r];
        for (std::size_t i = 1; i < p.size(); ++i)
          if (p[i - 1] >= p[i]) o.fail("placements not strictly increasing");
        for (const auto& hit : matches[r].matched)
          if (p[hit.position] != g.anchor_columns[hit.anchor]) o.fail("matched anchor off its column");
        if (anchors.empty()) {
          for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] != i) o.fail("empty anchors not left-aligned");
        }
      }
      if (anchors.empty() && g.row_order != base) o.fail("empty anchors changed base order");
    }
  }
}

// Finds the display row for a signature in a layout document.
const json* row_with(const json& doc, const Signature& sig) {
  for (const auto& r : doc["rows"])
    if (r["signature"].get<Signature>() == sig) return &r;
  return nullptr;
}

void planted_scenario(Outcome& o) {
  SyntheticSpec spec = load_synthetic_spec(EVSEQ_DEMO_SPEC);
  EventLog log = generate_event_log(spec);
  std::set<std::string> identifiers;
  for (const auto& r : log.records()) identifiers.insert(r.identifier);

  Service svc;
  auto call = [&](const std::string& m, const std::string& path, const std::string& body = "") {
    auto r = svc.handle({m, path, body});
    if (r.status >= 300) throw std::runtime_error(m + " " + path + " -> " + std::to_string(r.status) + " " + r.body);
    return json::parse(r.body);
  };
  json ds = call("POST", "/datasets", event_log_to_csv(log));
  std::string sid = call("POST", "/datasets/" + ds["dataset_id"].get<std::string>() + "/sessions")["session_id"];
  call("PATCH", "/sessions/" + sid, R"({"coverage": {"threshold": 1.0}})");
  json doc = call("GET", "/sessions/" + sid + "/overview");

  // Class I: unique sequences by frequency.
  if (doc["totals"]["n_unique_sequences"] != 5 || doc["rows"].size() != 5) o.fail("expected 5 unique sequences");
  if (doc["totals"]["n_sequences"] != 100) o.fail("expected 100 sequences");

  // Class IV: planted duration outliers, traced through the detail endpoint.
  const auto& planted = spec.planted_outliers.at(0);
  const auto& tmpl = spec.templates[planted.template_index];
  const json* row = row_with(doc, tmpl.signature);
  if (!row) {
    o.fail("planted template row missing");
  } else {
    std::size_t column = (*row)["boxes"][planted.position]["column"];
    json detail = call("GET", "/sessions/" + sid + "/eventbox/" + std::to_string((*row)["index"].get<std::size_t>()) +
                                  "/" + std::to_string(column));
    double value = planted.multiplier * tmpl.durations[planted.position].upper().value();
    std::size_t flagged = 0;
    for (const auto& p : detail["points"]) {
      bool is_planted = std::abs(p["duration"].get<double>() - value) < 1e-6;
      if (p["is_outlier"].get<bool>() != is_planted) o.fail("outlier flags do not match the planted points");
      if (p["is_outlier"].get<bool>()) {
        ++flagged;
        if (!identifiers.contains(p["member_ref"].get<std::string>())) o.fail("outlier not traceable");
      }
    }
    if (flagged != planted.count) o.fail("flagged " + std::to_string(flagged) + " outliers");
  }

  // Class III: planted decreasing duration against hour of day.
  const auto& trend = *spec.planted_trend;
  const std::string trend_type = spec.templates[trend.template_index].signature[trend.position];
  Dataset dataset(log);
  auto rep = trend_report(dataset.sequences(), trend_type, TimeScaleSpec::full(TimeScaleKind::HourOfDay));
  if (rep.size() != 1 || !(rep[0].correlation <= -0.8)) {
    o.fail("trend correlation " + (rep.empty() ? std::string("missing") : std::to_string(rep[0].correlation)));
  }

  // Class II: the shorter day-case template is a subsequence of the longer
  // one; anchoring on its events puts every one of them in a shared column.
  const Signature& shorter = spec.templates[2].signature;
  const Signature& longer = spec.templates[3].signature;
  call("PATCH", "/sessions/" + sid, json{{"anchors", shorter}}.dump());
  json aligned = call("GET", "/sessions/" + sid + "/overview");
  const json* rs = row_with(aligned, shorter);
  const json* rl = row_with(aligned, longer);
  if (!rs || !rl) {
    o.fail("template pair rows missing");
  } else {
    std::vector<std::size_t> cs, cl;
    for (const auto& b : (*rs)["boxes"]) cs.push_back(b["column"]);
    for (const auto& b : (*rl)["boxes"])
      if (std::find(shorter.begin(), shorter.end(), b["event_type"].get<std::string>()) != shorter.end())
        cl.push_back(b["column"]);
    if (cs != cl) o.fail("common subsequence not aligned");
    if (edit_distance(shorter, longer) != 1) o.fail("pair does not differ by one event");
  }
}

SyntheticSpec scale_spec() {
  SyntheticSpec spec;
  spec.seed = 26455;
  spec.days = 365;
  spec.start_date = Date{std::chrono::year{2018}, std::chrono::month{1}, std::chrono::day{1}};
  std::mt19937_64 rng(161);
  std::set<Signature> seen;
  const std::size_t kTemplates = 160, kSequences = 25000;
  // Zipf-like frequencies summing to kSequences.
  std::vector<double> w(kTemplates);
  for (std::size_t i = 0; i < kTemplates; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  std::size_t assigned = 0;
  while (spec.templates.size() < kTemplates) {
    Signature sig(3 + rng() % 10);
    for (auto& e : sig) e = "type" + std::to_string(rng() % 18);
    if (!seen.insert(sig).second) continue;
    std::size_t i = spec.templates.size();
    Template t;
    t.name = "t" + std::to_string(i);
    t.signature = sig;
    t.frequency = std::max<std::size_t>(1, static_cast<std::size_t>(w[i] / wsum * kSequences));
    if (i + 1 == kTemplates) t.frequency = std::max<std::size_t>(1, kSequences - assigned);
    assigned += t.frequency;
    t.durations.assign(sig.size(), DurationDist{DurationDist::Kind::LogNormal, 5.5, 0.8});
    spec.templates.push_back(std::move(t));
  }
  return spec;
}

void scale_smoke(Outcome& o) {
  SyntheticSpec spec = scale_spec();
  Dataset ds(generate_event_log(spec));
  auto t0 = std::chrono::steady_clock::now();
  OverviewParams p;
  p.coverage = 1.0;
  auto layout = compute_overview(ds, p);
  std::string doc = layout_document(layout);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu sequences, %zu unique, %zu rows, overview %.2f s, %zu KiB", ds.sequences().size(),
                layout.totals.n_unique_sequences, layout.rows.size(), secs, doc.size() / 1024);
  o.detail = buf;
  if (ds.sequences().size() < 24000 || ds.sequences().size() > 26000) o.fail("sequence count off target");
  if (layout.totals.n_unique_sequences != 160) o.fail("unique count off target");
  if (secs >= 30.0) o.fail("overview too slow");
}

int run_cli(const std::string& args) {
  int status = std::system((std::string(EVSEQ_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(Outcome& o) {
  fs::path dir = fs::temp_directory_path() / ("evseq-accept-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const std::string csv = (dir / "demo.csv").string();
  if (run_cli("generate " + std::string(EVSEQ_DEMO_SPEC) + " --out " + csv) != 0) {
    o.fail("generate failed");
    return;
  }
  Service svc;
  std::string id = json::parse(svc.handle({"POST", "/datasets", slurp(csv)}).body)["dataset_id"];

  const std::vector<std::pair<std::string, json>> cases = {
      {"", json::object()},
      {"--align \"In Consultation\" --coverage 1.0", {{"anchors", {"In Consultation"}}, {"coverage", {{"threshold", 1.0}}}}},
      {"--days Thu,Fri --axis day-of-week --color none --k 3",
       {{"filter", {{"days_of_week", {"Thu", "Fri"}}}}, {"axis_scale", {{"kind", "day-of-week"}}},
        {"color_scale", nullptr}, {"stats", {{"k", 3}}}}},
      {"--from 2019-03-11 --to 2019-03-24 --min-freq 2 --coverage 0.95 --axis absolute --color month-of-year",
       {{"filter", {{"date_from", "2019-03-11"}, {"date_to", "2019-03-24"}}},
        {"coverage", {{"threshold", 0.95}, {"min_frequency", 2}}},
        {"axis_scale", {{"kind", "absolute"}}},
        {"color_scale", {{"kind", "month-of-year"}}}}},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string out = (dir / ("case" + std::to_string(i) + ".json")).string();
    if (run_cli("overview " + csv + " " + cases[i].first + " --out " + out) != 0) {
      o.fail("CLI failed on case " + std::to_string(i));
      continue;
    }
    auto s = svc.handle({"POST", "/datasets/" + id + "/sessions", ""});
    std::string sid = json::parse(s.body)["session_id"];
    svc.handle({"PATCH", "/sessions/" + sid, cases[i].second.dump()});
    std::string served = svc.handle({"GET", "/sessions/" + sid + "/overview", ""}).body;
    if (slurp(out) != served) o.fail("bytes differ on case " + std::to_string(i));
  }
  fs::remove_all(dir);
}

}  // namespace

int main() {
  criterion("edit-distance metric suite", 5, metric_suite);
  criterion("quartile/outlier oracle equivalence", 5, quartile_oracle);
  criterion("complete-link monotonicity", 10, complete_link);
  criterion("alignment coherence", 5, alignment);
  criterion("end-to-end planted scenario", 10, planted_scenario);
  criterion("scale smoke test (overview < 30 s)", 0, scale_smoke);
  criterion("CLI/service determinism", 0, determinism);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
