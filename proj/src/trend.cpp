#include "evseq/trend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace evseq {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<TrendRow> trend_report(const std::vector<EventSequence>& sequences, const std::string& event_type,
                                   const TimeScaleSpec& axis) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
  if (!event_type.empty()) series[event_type];
  for (const auto& s : sequences) {
    for (const auto& e : s.events) {
      if (!event_type.empty() && e.event_type != event_type) continue;
      auto& [durations, positions] = series[e.event_type];
      durations.push_back(duration_of(e));
      positions.push_back(project_occurrence(e.start, axis));
    }
  }
  std::vector<TrendRow> out;
  for (const auto& [type, xy] : series) {
    out.push_back(TrendRow{type, xy.first.size(), spearman(xy.first, xy.second)});
  }
  return out;
}

}  // namespace evseq
