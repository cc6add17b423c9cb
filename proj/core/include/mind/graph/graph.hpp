#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mind/common.hpp"

namespace mind {

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable symmetric adjacency in CSR form. Neighbor lists are sorted.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  bool has_edge(NodeId u, NodeId v) const;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> neighbors_;
};

/// Undirected simple graph over dense ids 0..n-1 with an active-node mask.
///
/// Removal only flips the mask and updates active degrees; the topology is
/// shared between copies, so a copy costs O(n).
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from a simple edge list. Self-loops, duplicates and
  /// out-of-range ids are contract violations.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_nodes() const { return active_.size(); }
  std::size_t num_active() const { return num_active_; }
  std::size_t num_edges() const { return m_active_; }

  bool is_active(NodeId v) const { return v < active_.size() && active_[v] != 0; }
  std::uint32_t degree(NodeId v) const { return degree_[v]; }

  /// All neighbors in the original topology, active or not.
  std::span<const NodeId> neighbors(NodeId v) const { return topo_->neighbors(v); }

  template <class F>
  void for_each_active_neighbor(NodeId v, F&& f) const {
    for (NodeId u : topo_->neighbors(v))
      if (active_[u]) f(u);
  }

  bool has_active_edge(NodeId u, NodeId v) const {
    return is_active(u) && is_active(v) && topo_->has_edge(u, v);
  }

  void remove_node(NodeId v);

  std::vector<NodeId> active_nodes() const;
  std::vector<Edge> active_edges() const;

  const std::vector<std::uint8_t>& mask() const { return active_; }

  /// Same topology with a different active mask (mask[v] != 0 means active).
  Graph with_mask(std::span<const std::uint8_t> mask) const;

  /// Active subgraph re-indexed to 0..k-1 in ascending id order.
  Graph compacted(std::vector<NodeId>* old_ids = nullptr) const;

  const std::shared_ptr<const Topology>& topology() const { return topo_; }

 private:
  void recount();

  std::shared_ptr<const Topology> topo_ = std::make_shared<const Topology>();
  std::vector<std::uint8_t> active_;
  std::vector<std::uint32_t> degree_;
  std::size_t num_active_ = 0;
  std::size_t m_active_ = 0;
};

/// Component label per node (inactive nodes get -1) and component sizes.
struct Components {
  std::vector<std::int64_t> label;
  std::vector<std::size_t> sizes;
  std::size_t largest() const;
};

Components connected_components(const Graph& g);
std::size_t largest_component_size(const Graph& g);
bool is_connected(const Graph& g);

/// Largest component among active nodes divided by n0; 0 when nothing is active.
double lcc_fraction(const Graph& g, std::size_t n0);

/// The subgraph induced by the largest component, compacted (ties: component
/// containing the lowest id).
Graph largest_component_subgraph(const Graph& g);

}  // namespace mind
