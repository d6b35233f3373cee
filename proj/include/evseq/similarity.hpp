#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "evseq/sequence.hpp"

namespace evseq {

// Unit-cost Levenshtein distance over token sequences. Two-row dynamic
// program, O(|a|·|b|) time and O(min(|a|,|b|)) space.
template <class T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::size_t edit_distance(const Signature& a, const Signature& b) {
  return edit_distance<std::string>(std::span<const std::string>(a), std::span<const std::string>(b));
}

// Dense symmetric matrix, zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  // Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) {
    d_[i * n_ + j] = value;
    d_[j * n_ + i] = value;
  }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

DistanceMatrix distance_matrix(const std::vector<Signature>& signatures);

// Node ids follow the usual convention: leaves are 0..n-1, the k-th merge
// creates node n+k.
struct Merge {
  std::size_t a;  // child node holding the smaller leaf index
  std::size_t b;
  double height;
  std::size_t size;  // leaves under the new node
};

struct Dendrogram {
  std::size_t n = 0;
  std::vector<Merge> merges;
  std::vector<std::size_t> leaf_order;
};

// Naive complete-link agglomeration. Each step merges the pair of active
// clusters with minimal linkage; ties go to the lexicographically smallest
// (i, j) where a cluster is indexed by its smallest leaf.
Dendrogram complete_link_cluster(const DistanceMatrix& d);

// Depth-first traversal: heavier child (by summed frequency) first, ties to
// the child with the smaller minimum leaf index.
std::vector<std::size_t> leaf_ordering(const Dendrogram& tree,
                                       const std::vector<std::size_t>& frequencies);

}  // namespace evseq
