#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evseq/ingest.hpp"

#include <json.hpp>

namespace evseq {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DurationDist {
  enum class Kind { Point, Constant, Uniform, LogNormal };
  Kind kind = Kind::Uniform;
  double a = 60.0;   // constant value, uniform min, lognormal mu
  double b = 300.0;  // uniform max, lognormal sigma

  // Hard upper bound of the support; nullopt when unbounded.
  std::optional<double> upper() const;
  std::optional<double> lower() const;
};

struct ArrivalDist {
  double hour_from = 8.0;
  double hour_to = 17.0;
  std::optional<std::set<int>> days_of_week;  // Monday = 0
};

struct Template {
  std::string name;
  std::vector<std::string> signature;
  std::size_t frequency = 1;
  std::vector<DurationDist> durations;  // one per position
  ArrivalDist arrival;
  double gap_min = 0.0;
  double gap_max = 120.0;
};

struct PlantedOutliers {
  std::size_t template_index = 0;
  std::size_t position = 0;
  std::size_t count = 0;
  double multiplier = 0.0;  // outlier duration = multiplier * upper bound of the base distribution
};

struct PlantedTrend {
  std::size_t template_index = 0;
  std::size_t position = 0;
  double intercept_seconds = 0.0;
  double slope_seconds_per_hour = 0.0;  // against the event's own start hour (UTC)
  double noise_seconds = 0.0;           // uniform in [-noise, +noise]
};

struct SyntheticSpec {
  std::uint64_t seed = 1;
  Date start_date{std::chrono::year{2019}, std::chrono::month{3}, std::chrono::day{4}};
  int days = 28;
  double fence_k = 1.5;
  std::string identifier_prefix = "p";
  std::vector<Template> templates;
  std::vector<PlantedOutliers> planted_outliers;
  std::optional<PlantedTrend> planted_trend;

  // Throws SpecError. Checks, among others, that each planted multiplier
  // exceeds multiplier_bound() and that planted counts stay below the
  // upper quartile's order statistics.
  void validate() const;
  // Smallest multiplier whose outliers clear the Tukey fence for any sample
  // of the base distribution.
  double multiplier_bound(const PlantedOutliers& planted) const;
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
SyntheticSpec load_synthetic_spec(const std::string& path);

// Deterministic for a fixed spec (including seed).
EventLog generate_event_log(const SyntheticSpec& spec);

}  // namespace evseq
