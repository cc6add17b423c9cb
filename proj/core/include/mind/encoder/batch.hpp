#pragma once

#include <span>
#include <vector>

#include "mind/diff/tape.hpp"
#include "mind/graph/graph.hpp"

namespace mind::encoder {

/// Disjoint union of graph states prepared for message passing.
///
/// Rows [0, num_nodes) are active nodes, graph by graph in ascending id order;
/// rows [num_nodes, num_nodes + num_graphs) are the omni-nodes. Message edges
/// are directed (dst <- src): both directions of every active edge plus one
/// in-edge from each node to its graph's omni row.
struct GraphBatch {
  std::uint32_t num_graphs = 0;
  std::uint32_t num_nodes = 0;
  std::vector<std::uint32_t> node_offsets;  // size num_graphs + 1
  std::vector<NodeId> node_ids;             // original id of each node row
  std::vector<std::uint32_t> graph_of;      // graph index of each node row
  diff::IndexList offsets;                  // node_offsets as an IndexList
  diff::IndexList src, dst;
  std::vector<double> edge_weight;          // 1, or 1/|V_t| on omni edges when normalized
  bool weighted = false;
  diff::IndexList node_rows;                // 0 .. num_nodes-1
  diff::IndexList omni_rows;                // omni row of each node row

  std::uint32_t rows() const { return num_nodes + num_graphs; }
  std::size_t num_edges() const { return src->size(); }
  std::uint32_t graph_size(std::uint32_t g) const { return node_offsets[g + 1] - node_offsets[g]; }
};

GraphBatch make_batch(std::span<const Graph* const> graphs, bool normalize_omni = true);
GraphBatch make_batch(const Graph& g, bool normalize_omni = true);

}  // namespace mind::encoder
