#include "mind/graph/union_find.hpp"

#include <numeric>
#include <utility>

namespace mind {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1), max_size_(n > 0 ? 1 : 0) {
  std::iota(parent_.begin(), parent_.end(), NodeId{0});
}

NodeId UnionFind::find(NodeId x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

NodeId UnionFind::unite(NodeId a, NodeId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  if (size_[a] > max_size_) max_size_ = size_[a];
  return a;
}

}  // namespace mind
