#include "evseq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

namespace evseq {

using nlohmann::json;

std::optional<double> DurationDist::upper() const {
  switch (kind) {
    case Kind::Point: return 0.0;
    case Kind::Constant: return a;
    case Kind::Uniform: return b;
    case Kind::LogNormal: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> DurationDist::lower() const {
  switch (kind) {
    case Kind::Point: return 0.0;
    case Kind::Constant: return a;
    case Kind::Uniform: return a;
    case Kind::LogNormal: return 0.0;
  }
  return std::nullopt;
}

namespace {

// Portable draws on top of mt19937_64, whose output sequence is fixed by the
// standard (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  double normal() {
    // Box-Muller; one value per call keeps the stream simple to reason about.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

double sample(const DurationDist& d, Rng& rng) {
  switch (d.kind) {
    case DurationDist::Kind::Point: return 0.0;
    case DurationDist::Kind::Constant: return d.a;
    case DurationDist::Kind::Uniform: return rng.uniform(d.a, d.b);
    case DurationDist::Kind::LogNormal: return std::exp(d.a + d.b * rng.normal());
  }
  return 0.0;
}

std::size_t floor_rank(std::size_t n, double p) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n - 1) * p));
}
std::size_t ceil_rank(std::size_t n, double p) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n - 1) * p));
}

}  // namespace

double SyntheticSpec::multiplier_bound(const PlantedOutliers& planted) const {
  const auto& dist = templates.at(planted.template_index).durations.at(planted.position);
  double hi = dist.upper().value_or(0.0);
  double lo = dist.lower().value_or(0.0);
  if (!(hi > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 + fence_k * (hi - lo) / hi;
}

void SyntheticSpec::validate() const {
  if (templates.empty()) throw SpecError("spec needs at least one template");
  if (days < 1) throw SpecError("days must be >= 1");
  if (!(fence_k > 0.0)) throw SpecError("fence_k must be > 0");
  std::set<std::vector<std::string>> signatures;
  for (const auto& t : templates) {
    if (t.signature.empty()) throw SpecError("template '" + t.name + "' has an empty signature");
    for (const auto& e : t.signature) {
      if (e.empty()) throw SpecError("template '" + t.name + "' has an empty event type");
    }
    if (t.frequency < 1) throw SpecError("template '" + t.name + "' needs frequency >= 1");
    if (t.durations.size() != t.signature.size()) {
      throw SpecError("template '" + t.name + "' needs one duration distribution per event");
    }
    for (const auto& d : t.durations) {
      if (d.kind == DurationDist::Kind::Uniform && !(d.a >= 0.0 && d.a <= d.b)) {
        throw SpecError("template '" + t.name + "': uniform needs 0 <= min <= max");
      }
      if (d.kind == DurationDist::Kind::Constant && d.a < 0.0) {
        throw SpecError("template '" + t.name + "': constant duration must be >= 0");
      }
      if (d.kind == DurationDist::Kind::LogNormal && !(d.b >= 0.0)) {
        throw SpecError("template '" + t.name + "': lognormal sigma must be >= 0");
      }
    }
    if (!(t.arrival.hour_from >= 0.0 && t.arrival.hour_from < t.arrival.hour_to && t.arrival.hour_to <= 24.0)) {
      throw SpecError("template '" + t.name + "': arrival hours must satisfy 0 <= from < to <= 24");
    }
    if (t.arrival.days_of_week && t.arrival.days_of_week->empty()) {
      throw SpecError("template '" + t.name + "': days_of_week must be nonempty");
    }
    if (!(t.gap_min >= 0.0 && t.gap_min <= t.gap_max)) {
      throw SpecError("template '" + t.name + "': gap needs 0 <= min <= max");
    }
    if (!signatures.insert(t.signature).second) {
      throw SpecError("template '" + t.name + "' repeats another template's signature");
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> planted_cells;
  for (const auto& p : planted_outliers) {
    if (p.template_index >= templates.size()) throw SpecError("planted outliers reference a missing template");
    const auto& t = templates[p.template_index];
    if (p.position >= t.signature.size()) throw SpecError("planted outliers reference a missing position");
    if (!planted_cells.insert({p.template_index, p.position}).second) {
      throw SpecError("at most one outlier plant per event position");
    }
    const auto& dist = t.durations[p.position];
    if (dist.kind != DurationDist::Kind::Uniform && dist.kind != DurationDist::Kind::Constant) {
      throw SpecError("outliers can only be planted on uniform or constant durations");
    }
    if (p.count < 1) throw SpecError("planted outlier count must be >= 1");
    const std::size_t n = t.frequency;
    if (p.count >= n) throw SpecError("planted outlier count must be below the template frequency");
    // The upper-quartile order statistics must come from the base sample.
    if (floor_rank(n, 0.75) + 1 > n - 1 - p.count) {
      throw SpecError("planted outlier count too large for template '" + t.name + "'");
    }
    double bound = multiplier_bound(p);
    if (!(p.multiplier > bound)) {
      throw SpecError("planted multiplier " + std::to_string(p.multiplier) + " must exceed the fence bound " +
                      std::to_string(bound));
    }
    if (dist.kind == DurationDist::Kind::Uniform && dist.b > dist.a) {
      // Base values are stratified, so x_(j) lies in [lo + R j/m, lo + R (j+1)/m].
      // Require the lower fence to stay at or below lo in the worst case.
      const double m = static_cast<double>(n - p.count);
      double q1_max = (static_cast<double>(ceil_rank(n, 0.25)) + 1.0) / m;
      double q3_min = static_cast<double>(floor_rank(n, 0.75)) / m;
      if ((1.0 + fence_k) * q1_max - fence_k * q3_min > 0.0) {
        throw SpecError("template '" + t.name + "' is too small to keep base durations inside the fence");
      }
    }
  }

  if (planted_trend) {
    const auto& tr = *planted_trend;
    if (tr.template_index >= templates.size()) throw SpecError("planted trend references a missing template");
    const auto& t = templates[tr.template_index];
    if (tr.position >= t.signature.size()) throw SpecError("planted trend references a missing position");
    if (planted_cells.contains({tr.template_index, tr.position})) {
      throw SpecError("planted trend and outliers cannot share an event position");
    }
    if (tr.noise_seconds < 0.0) throw SpecError("trend noise must be >= 0");
    // Calibration: the noise band must stay within a quarter of the swing over the arrival window.
    double swing = std::abs(tr.slope_seconds_per_hour) * (t.arrival.hour_to - t.arrival.hour_from);
    if (tr.slope_seconds_per_hour == 0.0 || 4.0 * tr.noise_seconds > swing) {
      throw SpecError("trend noise must not exceed a quarter of the slope swing over the arrival window");
    }
  }
}

EventLog generate_event_log(const SyntheticSpec& spec) {
  spec.validate();
  using namespace std::chrono;
  Rng rng(spec.seed);

  const sys_days first_day{spec.start_date};
  std::size_t serial = 0;
  std::vector<EventRecord> records;

  for (std::size_t ti = 0; ti < spec.templates.size(); ++ti) {
    const auto& t = spec.templates[ti];

    std::vector<sys_days> allowed;
    for (int d = 0; d < spec.days; ++d) {
      sys_days day = first_day + days{d};
      if (!t.arrival.days_of_week || t.arrival.days_of_week->contains(weekday_index(Date{day}))) {
        allowed.push_back(day);
      }
    }
    if (allowed.empty()) throw SpecError("template '" + t.name + "' has no arrival day in the date range");

    // Per position: member index -> planted role.
    std::vector<std::vector<int>> role(t.signature.size(), std::vector<int>(t.frequency, 0));
    std::vector<std::vector<double>> strata(t.signature.size());
    std::vector<double> outlier_value(t.signature.size(), 0.0);
    for (const auto& p : spec.planted_outliers) {
      if (p.template_index != ti) continue;
      std::vector<std::size_t> members(t.frequency);
      std::iota(members.begin(), members.end(), std::size_t{0});
      rng.shuffle(members);
      for (std::size_t i = 0; i < p.count; ++i) role[p.position][members[i]] = 1;
      const auto& dist = t.durations[p.position];
      outlier_value[p.position] = p.multiplier * dist.upper().value();
      std::size_t m = t.frequency - p.count;
      std::vector<double> values;
      for (std::size_t j = 0; j < m; ++j) {
        double lo = dist.lower().value(), hi = dist.upper().value();
        values.push_back(lo + (hi - lo) * (static_cast<double>(j) + rng.uniform()) / static_cast<double>(m));
      }
      rng.shuffle(values);
      strata[p.position] = std::move(values);
    }

    std::vector<std::size_t> strata_cursor(t.signature.size(), 0);
    for (std::size_t member = 0; member < t.frequency; ++member) {
      char id[32];
      std::snprintf(id, sizeof id, "%s%05zu", spec.identifier_prefix.c_str(), ++serial);
      sys_days day = allowed[rng.index(allowed.size())];
      double hour = rng.uniform(t.arrival.hour_from, t.arrival.hour_to);
      Timestamp cursor = Timestamp{day} + seconds{static_cast<long long>(std::floor(hour * 3600.0))};

      for (std::size_t pos = 0; pos < t.signature.size(); ++pos) {
        const auto& dist = t.durations[pos];
        double duration = 0.0;
        bool point = dist.kind == DurationDist::Kind::Point;
        if (spec.planted_trend && spec.planted_trend->template_index == ti && spec.planted_trend->position == pos) {
          const auto& tr = *spec.planted_trend;
          double start_hour = static_cast<double>((cursor - floor<days>(cursor)).count()) / 3'600'000.0;
          duration = tr.intercept_seconds + tr.slope_seconds_per_hour * start_hour +
                     rng.uniform(-tr.noise_seconds, tr.noise_seconds);
          duration = std::max(duration, 0.0);
          point = false;
        } else if (role[pos][member] == 1) {
          duration = outlier_value[pos];
        } else if (!strata[pos].empty()) {
          duration = strata[pos][strata_cursor[pos]++];
        } else {
          duration = sample(dist, rng);
        }

        EventRecord rec{id, t.signature[pos], cursor, std::nullopt};
        Timestamp next = cursor;
        if (!point) {
          rec.end = cursor + milliseconds{std::llround(duration * 1000.0)};
          next = *rec.end;
        }
        records.push_back(std::move(rec));
        double gap = rng.uniform(t.gap_min, t.gap_max);
        cursor = next + seconds{static_cast<long long>(std::llround(gap))};
      }
    }
  }
  return EventLog(std::move(records));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

DurationDist dist_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw SpecError("duration distribution needs a 'kind'");
  std::string kind = j["kind"].get<std::string>();
  DurationDist d;
  if (kind == "point") {
    d.kind = DurationDist::Kind::Point;
    d.a = d.b = 0.0;
  } else if (kind == "constant") {
    d.kind = DurationDist::Kind::Constant;
    d.a = d.b = j.at("value").get<double>();
  } else if (kind == "uniform") {
    d.kind = DurationDist::Kind::Uniform;
    d.a = j.at("min").get<double>();
    d.b = j.at("max").get<double>();
  } else if (kind == "lognormal") {
    d.kind = DurationDist::Kind::LogNormal;
    d.a = j.at("mu").get<double>();
    d.b = j.at("sigma").get<double>();
  } else {
    throw SpecError("unknown duration distribution '" + kind + "'");
  }
  return d;
}

std::set<int> weekdays_from_json(const json& j) {
  std::set<int> out;
  for (const auto& d : j) {
    auto w = parse_weekday(d.get<std::string>());
    if (!w) throw SpecError("unknown weekday '" + d.get<std::string>() + "'");
    out.insert(*w);
  }
  return out;
}

std::size_t template_ref(const json& j, const std::vector<Template>& templates) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_string()) {
    for (std::size_t i = 0; i < templates.size(); ++i) {
      if (templates[i].name == j.get<std::string>()) return i;
    }
    throw SpecError("unknown template '" + j.get<std::string>() + "'");
  }
  throw SpecError("template reference must be an index or a name");
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const json& j) {
  try {
    SyntheticSpec s;
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("start_date")) {
      auto d = parse_date(j["start_date"].get<std::string>());
      if (!d) throw SpecError("unparseable start_date");
      s.start_date = *d;
    }
    s.days = j.value("days", 28);
    s.fence_k = j.value("fence_k", 1.5);
    s.identifier_prefix = j.value("identifier_prefix", std::string("p"));

    for (const auto& tj : j.at("templates")) {
      Template t;
      t.name = tj.value("name", "template" + std::to_string(s.templates.size()));
      t.signature = tj.at("signature").get<std::vector<std::string>>();
      t.frequency = tj.at("frequency").get<std::size_t>();
      const json& dj = tj.contains("durations") ? tj["durations"] : json{{"kind", "uniform"}, {"min", 60}, {"max", 300}};
      if (dj.is_array()) {
        for (const auto& d : dj) t.durations.push_back(dist_from_json(d));
      } else {
        t.durations.assign(t.signature.size(), dist_from_json(dj));
      }
      if (tj.contains("arrival")) {
        const auto& aj = tj["arrival"];
        t.arrival.hour_from = aj.value("hour_from", 8.0);
        t.arrival.hour_to = aj.value("hour_to", 17.0);
        if (aj.contains("days_of_week")) t.arrival.days_of_week = weekdays_from_json(aj["days_of_week"]);
      }
      if (tj.contains("gap_seconds")) {
        t.gap_min = tj["gap_seconds"].value("min", 0.0);
        t.gap_max = tj["gap_seconds"].value("max", 120.0);
      }
      s.templates.push_back(std::move(t));
    }
    if (j.contains("planted_outliers")) {
      for (const auto& pj : j["planted_outliers"]) {
        PlantedOutliers p;
        p.template_index = template_ref(pj.at("template"), s.templates);
        p.position = pj.at("position").get<std::size_t>();
        p.count = pj.at("count").get<std::size_t>();
        p.multiplier = pj.at("multiplier").get<double>();
        s.planted_outliers.push_back(p);
      }
    }
    if (j.contains("planted_trend") && !j["planted_trend"].is_null()) {
      const auto& tj = j["planted_trend"];
      PlantedTrend tr;
      tr.template_index = template_ref(tj.at("template"), s.templates);
      tr.position = tj.at("position").get<std::size_t>();
      tr.intercept_seconds = tj.at("intercept_seconds").get<double>();
      tr.slope_seconds_per_hour = tj.at("slope_seconds_per_hour").get<double>();
      tr.noise_seconds = tj.value("noise_seconds", 0.0);
      s.planted_trend = tr;
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed synthetic spec: ") + e.what());
  }
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SpecError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return synthetic_spec_from_json(j);
}

}  // namespace evseq
