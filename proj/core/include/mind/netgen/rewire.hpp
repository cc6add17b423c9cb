#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mind/graph/graph.hpp"
#include "mind/random.hpp"

namespace mind::netgen {

enum class LabelMode { RANDOM, DEGREE };

std::string_view to_string(LabelMode m);

/// Target magnitudes for the signed label-assortativity coefficient.
inline constexpr double kTargetMagnitudes[] = {0.05, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5};

struct RewireSpec {
  LabelMode label_mode = LabelMode::RANDOM;
  double target = 0.0;
  double tolerance = 0.02;
  std::size_t max_attempts = 0;  // 0 selects 100 * |E|
  bool record_swaps = false;
};

/// One accepted double-edge swap {(i,l),(j,k)} -> {(i,k),(j,l)}.
struct Swap {
  NodeId i, l, j, k;
};

struct RewireResult {
  Graph graph;
  std::vector<std::int64_t> labels;
  double initial = 0.0;
  double achieved = 0.0;
  bool reached = false;
  std::size_t attempts = 0;
  std::vector<Swap> swaps;  // filled when record_swaps
};

/// RANDOM: a uniform permutation of 0..n-1. DEGREE: ids ranked by degree,
/// equal degrees receiving consecutive labels in random order.
std::vector<std::int64_t> assign_labels(const Graph& g, LabelMode mode, Rng& rng);

/// Mutable undirected edge set used by the rewiring loop.
class SwapGraph {
 public:
  explicit SwapGraph(const Graph& g);

  std::size_t num_nodes() const { return adj_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t degree(NodeId v) const { return adj_[v].size(); }

  /// Replaces edges[a] = (i,l) and edges[b] = (j,k) by (i,k) and (j,l),
  /// where flip_a / flip_b pick the orientation of each stored edge.
  /// Returns the swap on success, nothing when it would create a loop or a
  /// duplicate. Connectivity is not checked here.
  std::optional<Swap> propose(std::size_t a, bool flip_a, std::size_t b, bool flip_b) const;
  void apply(std::size_t a, std::size_t b, const Swap& s);
  void revert(std::size_t a, std::size_t b, const Swap& s);

  /// BFS reachability with early exit.
  bool reachable(NodeId from, NodeId to) const;

  Graph to_graph() const;

 private:
  void add(NodeId u, NodeId v);
  void remove(NodeId u, NodeId v);

  std::vector<std::vector<NodeId>> adj_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> keys_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
};

/// Degree-preserving rewiring toward a label-assortativity target.
///
/// Each attempt draws two distinct edges with four distinct endpoints and a
/// random orientation. The swap is kept only if both new edges are absent,
/// the label change (l_i - l_j)(l_k - l_l) moves the coefficient toward the
/// target, and the graph stays connected. Stops within `tolerance` of the
/// target or after `max_attempts`. Input must be connected with every node active.
RewireResult rewire_to_target(const Graph& g, const RewireSpec& spec, Rng& rng);

/// Same loop with caller-provided labels.
RewireResult rewire_with_labels(const Graph& g, std::vector<std::int64_t> labels,
                                const RewireSpec& spec, Rng& rng);

}  // namespace mind::netgen
