#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evseq/sequence.hpp"

namespace evseq {

// User-selected alignment events, in selection order. Construction rejects
// duplicates.
class AnchorSet {
 public:
  AnchorSet() = default;
  explicit AnchorSet(std::vector<std::string> anchors);

  const std::vector<std::string>& anchors() const { return anchors_; }
  std::size_t size() const { return anchors_.size(); }
  bool empty() const { return anchors_.empty(); }

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;

 private:
  std::vector<std::string> anchors_;
};

struct AnchorHit {
  std::size_t anchor;    // index into the anchor set
  std::size_t position;  // index into the signature
  friend bool operator==(const AnchorHit&, const AnchorHit&) = default;
};

struct AnchorMatch {
  std::size_t row = 0;
  std::vector<AnchorHit> matched;
  std::vector<std::size_t> unmatched;
};

// Greedy leftmost subsequence match with skip-and-continue.
AnchorMatch match_anchors(const Signature& signature, const AnchorSet& anchors, std::size_t row = 0);

class GridOverflow : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ColumnGrid {
  std::vector<std::size_t> anchor_columns;
  std::vector<std::size_t> region_widths;  // anchors.size() + 1 regions
  std::size_t total_columns = 0;
  std::vector<std::vector<std::size_t>> placements;  // per row, column of each position
  std::vector<std::size_t> row_order;                // display order of rows
};

// Lays rows out on a shared column grid. Regions are the prefix, the spans
// between consecutive anchors and the suffix; each region is as wide as its
// most populated row. Rows without any matched anchor are left-aligned from
// column 0 and count toward the prefix region.
ColumnGrid build_column_grid(const std::vector<Signature>& rows,
                             const std::vector<AnchorMatch>& matches,
                             const std::vector<std::size_t>& base_order,
                             const AnchorSet& anchors);

}  // namespace evseq
