#include "evseq/similarity.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace evseq {

namespace {

std::vector<std::vector<int>> intern(const std::vector<Signature>& signatures) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::vector<int>> out;
  out.reserve(signatures.size());
  for (const auto& sig : signatures) {
    std::vector<int> tokens;
    tokens.reserve(sig.size());
    for (const auto& t : sig) {
      auto [it, _] = ids.try_emplace(t, static_cast<int>(ids.size()));
      tokens.push_back(it->second);
    }
    out.push_back(std::move(tokens));
  }
  return out;
}

struct Children {
  std::size_t left;
  std::size_t right;
};

}  // namespace

DistanceMatrix distance_matrix(const std::vector<Signature>& signatures) {
  if (signatures.empty()) throw std::invalid_argument("distance_matrix: empty input");
  auto tokens = intern(signatures);
  DistanceMatrix d(signatures.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      d.set(i, j, static_cast<double>(edit_distance<int>(tokens[i], tokens[j])));
    }
  }
  return d;
}

Dendrogram complete_link_cluster(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  Dendrogram tree;
  tree.n = n;
  if (n == 0) return tree;

  // Slot i holds the active cluster whose smallest leaf is i.
  std::vector<std::vector<double>> link(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) link[i][j] = d(i, j);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> node(n), size(n, 1);
  std::iota(node.begin(), node.end(), std::size_t{0});

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (link[i][j] < best || bi == n) {
          best = link[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    tree.merges.push_back(Merge{node[bi], node[bj], best, size[bi] + size[bj]});
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double merged = std::max(link[bi][k], link[bj][k]);
      link[bi][k] = link[k][bi] = merged;
    }
    active[bj] = false;
    node[bi] = n + step;
    size[bi] += size[bj];
  }

  tree.leaf_order = leaf_ordering(tree, std::vector<std::size_t>(n, 1));
  return tree;
}

std::vector<std::size_t> leaf_ordering(const Dendrogram& tree,
                                       const std::vector<std::size_t>& frequencies) {
  const std::size_t n = tree.n;
  if (frequencies.size() != n) throw std::invalid_argument("leaf_ordering: frequency count mismatch");
  if (n == 0) return {};
  if (tree.merges.size() + 1 != n) throw std::invalid_argument("leaf_ordering: incomplete dendrogram");

  const std::size_t total_nodes = 2 * n - 1;
  std::vector<std::size_t> weight(total_nodes), min_leaf(total_nodes);
  std::vector<Children> children(total_nodes, Children{0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = frequencies[i];
    min_leaf[i] = i;
  }
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    std::size_t id = n + k;
    children[id] = {m.a, m.b};
    weight[id] = weight[m.a] + weight[m.b];
    min_leaf[id] = std::min(min_leaf[m.a], min_leaf[m.b]);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> stack{total_nodes - 1};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    if (id < n) {
      order.push_back(id);
      continue;
    }
    auto [first, second] = children[id];
    bool swap = weight[second] > weight[first] ||
                (weight[second] == weight[first] && min_leaf[second] < min_leaf[first]);
    if (swap) std::swap(first, second);
    stack.push_back(second);
    stack.push_back(first);
  }
  return order;
}

}  // namespace evseq
