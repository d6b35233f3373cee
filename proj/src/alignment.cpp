#include "evseq/alignment.hpp"

#include <algorithm>
#include <set>

#include "evseq/similarity.hpp"

namespace evseq {

AnchorSet::AnchorSet(std::vector<std::string> anchors) : anchors_(std::move(anchors)) {
  std::set<std::string> seen;
  for (const auto& a : anchors_) {
    if (a.empty()) throw std::invalid_argument("anchor event type must be non-empty");
    if (!seen.insert(a).second) throw std::invalid_argument("duplicate anchor '" + a + "'");
  }
}

AnchorMatch match_anchors(const Signature& signature, const AnchorSet& anchors, std::size_t row) {
  AnchorMatch m;
  m.row = row;
  std::size_t from = 0;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    auto it = std::find(signature.begin() + static_cast<std::ptrdiff_t>(from), signature.end(),
                        anchors.anchors()[k]);
    if (it == signature.end()) {
      m.unmatched.push_back(k);
      continue;
    }
    std::size_t pos = static_cast<std::size_t>(it - signature.begin());
    m.matched.push_back(AnchorHit{k, pos});
    from = pos + 1;
  }
  return m;
}

namespace {

// Where one row's events fall relative to the anchor regions.
struct RowRegions {
  // (region, first position, count, right-aligned)
  struct Run {
    std::size_t region;
    std::size_t first;
    std::size_t count;
    bool right_aligned;
  };
  std::vector<Run> runs;
};

RowRegions assign_regions(const Signature& row, const AnchorMatch& match) {
  RowRegions out;
  const auto& hits = match.matched;
  if (hits.empty()) {
    out.runs.push_back({0, 0, row.size(), false});
    return out;
  }
  out.runs.push_back({hits.front().anchor, 0, hits.front().position, true});
  for (std::size_t t = 0; t + 1 < hits.size(); ++t) {
    std::size_t first = hits[t].position + 1;
    out.runs.push_back({hits[t].anchor + 1, first, hits[t + 1].position - first, false});
  }
  std::size_t first = hits.back().position + 1;
  out.runs.push_back({hits.back().anchor + 1, first, row.size() - first, false});
  return out;
}

}  // namespace

ColumnGrid build_column_grid(const std::vector<Signature>& rows,
                             const std::vector<AnchorMatch>& matches,
                             const std::vector<std::size_t>& base_order,
                             const AnchorSet& anchors) {
  const std::size_t n = rows.size();
  const std::size_t k = anchors.size();
  if (matches.size() != n) throw std::invalid_argument("build_column_grid: matches not aligned with rows");
  if (base_order.size() != n) throw std::invalid_argument("build_column_grid: base_order size mismatch");
  std::vector<std::size_t> base_pos(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (base_order[i] >= n || base_pos[base_order[i]] != n) {
      throw std::invalid_argument("build_column_grid: base_order is not a permutation");
    }
    base_pos[base_order[i]] = i;
  }

  std::vector<RowRegions> regions;
  regions.reserve(n);
  ColumnGrid grid;
  grid.region_widths.assign(k + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    regions.push_back(assign_regions(rows[r], matches[r]));
    for (const auto& run : regions.back().runs) {
      grid.region_widths[run.region] = std::max(grid.region_widths[run.region], run.count);
    }
  }

  std::vector<std::size_t> region_start(k + 1, 0);
  grid.anchor_columns.resize(k);
  std::size_t col = 0;
  for (std::size_t a = 0; a <= k; ++a) {
    region_start[a] = col;
    col += grid.region_widths[a];
    if (a < k) grid.anchor_columns[a] = col++;
  }
  grid.total_columns = col;

  grid.placements.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto& place = grid.placements[r];
    place.assign(rows[r].size(), 0);
    for (const auto& hit : matches[r].matched) place[hit.position] = grid.anchor_columns[hit.anchor];
    for (const auto& run : regions[r].runs) {
      if (run.count > grid.region_widths[run.region]) {
        throw GridOverflow("row " + std::to_string(r) + " overflows region " + std::to_string(run.region));
      }
      std::size_t origin = run.right_aligned
                               ? region_start[run.region] + grid.region_widths[run.region] - run.count
                               : region_start[run.region];
      for (std::size_t i = 0; i < run.count; ++i) place[run.first + i] = origin + i;
    }
  }

  std::vector<std::size_t> anchor_distance(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    Signature matched_types;
    for (const auto& hit : matches[r].matched) matched_types.push_back(anchors.anchors()[hit.anchor]);
    anchor_distance[r] = edit_distance(matched_types, anchors.anchors());
  }
  grid.row_order = base_order;
  std::stable_sort(grid.row_order.begin(), grid.row_order.end(), [&](std::size_t a, std::size_t b) {
    std::size_t ma = matches[a].matched.size(), mb = matches[b].matched.size();
    if (ma != mb) return ma > mb;
    if (anchor_distance[a] != anchor_distance[b]) return anchor_distance[a] < anchor_distance[b];
    return base_pos[a] < base_pos[b];
  });
  return grid;
}

}  // namespace evseq
