#pragma once

#include <cstdint>
#include <vector>

#include "mind/graph/graph.hpp"
#include "mind/random.hpp"

namespace mind::agent {

/// Active-node set packed 64 per word.
class NodeMask {
 public:
  NodeMask() = default;
  explicit NodeMask(const Graph& g);

  bool test(NodeId v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
  void reset(NodeId v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  std::size_t size() const { return n_; }
  /// Applies this mask to a graph with the same node count.
  Graph apply(const Graph& base) const;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t n_ = 0;
};

/// State before the action is (graph, mask); the successor is the same mask
/// with `action` removed.
struct Transition {
  std::uint32_t graph = 0;
  NodeMask mask;
  NodeId action = 0;
  float reward = 0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  /// `count` distinct indices drawn uniformly (requires count <= size()).
  std::vector<std::size_t> sample(std::size_t count, Rng& rng) const;

 private:
  std::vector<Transition> items_;
  std::size_t capacity_;
  std::size_t next_ = 0;
};

}  // namespace mind::agent
