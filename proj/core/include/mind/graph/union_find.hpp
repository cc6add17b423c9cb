#pragma once

#include <cstddef>
#include <vector>

#include "mind/common.hpp"

namespace mind {

/// Disjoint sets with union by size and path halving. Tracks the largest
/// set size so reverse-insertion LCC sweeps stay O(alpha) per edge.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0);

  NodeId find(NodeId x);
  /// Merges the sets of a and b; returns the surviving root.
  NodeId unite(NodeId a, NodeId b);
  bool same(NodeId a, NodeId b) { return find(a) == find(b); }

  std::size_t size_of(NodeId x) { return size_[find(x)]; }
  std::size_t max_size() const { return max_size_; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::size_t> size_;
  std::size_t max_size_ = 0;
};

}  // namespace mind
