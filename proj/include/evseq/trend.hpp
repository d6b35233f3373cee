#pragma once

#include <string>
#include <vector>

#include "evseq/sequence.hpp"
#include "evseq/timestats.hpp"

namespace evseq {

// Ranks with ties sharing their average 1-based rank.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rank correlation (Pearson on average ranks). Returns 0 when
// either series is constant or fewer than two points are given.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct TrendRow {
  std::string event_type;
  std::size_t points = 0;
  double correlation = 0.0;  // duration vs projected occurrence
};

// One row per event type (sorted by name), or only `event_type` when nonempty.
std::vector<TrendRow> trend_report(const std::vector<EventSequence>& sequences, const std::string& event_type,
                                   const TimeScaleSpec& axis);

}  // namespace evseq
