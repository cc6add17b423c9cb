#include "mind/encoder/batch.hpp"

#include <numeric>

namespace mind::encoder {

GraphBatch make_batch(std::span<const Graph* const> graphs, bool normalize_omni) {
  require(!graphs.empty(), "make_batch: no graphs");
  GraphBatch b;
  b.num_graphs = static_cast<std::uint32_t>(graphs.size());
  b.node_offsets.push_back(0);
  std::size_t directed = 0;
  for (const Graph* g : graphs) {
    require(g->num_active() > 0, "make_batch: graph has no active nodes");
    b.node_offsets.push_back(b.node_offsets.back() + static_cast<std::uint32_t>(g->num_active()));
    directed += 2 * g->num_edges() + g->num_active();
  }
  b.num_nodes = b.node_offsets.back();
  b.node_ids.reserve(b.num_nodes);
  b.graph_of.reserve(b.num_nodes);

  std::vector<std::uint32_t> src, dst, omni;
  src.reserve(directed);
  dst.reserve(directed);
  b.edge_weight.reserve(directed);
  omni.reserve(b.num_nodes);
  b.weighted = normalize_omni;

  std::vector<std::uint32_t> local;
  for (std::uint32_t gi = 0; gi < b.num_graphs; ++gi) {
    const Graph& g = *graphs[gi];
    const std::uint32_t base = b.node_offsets[gi];
    const std::uint32_t omni_row = b.num_nodes + gi;
    local.assign(g.num_nodes(), 0);
    std::uint32_t next = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.is_active(v)) continue;
      local[v] = base + next++;
      b.node_ids.push_back(v);
      b.graph_of.push_back(gi);
      omni.push_back(omni_row);
    }
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.is_active(v)) continue;
      g.for_each_active_neighbor(v, [&](NodeId u) {
        dst.push_back(local[v]);
        src.push_back(local[u]);
        b.edge_weight.push_back(1.0);
      });
    }
    const double w = normalize_omni ? 1.0 / static_cast<double>(g.num_active()) : 1.0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.is_active(v)) continue;
      dst.push_back(omni_row);
      src.push_back(local[v]);
      b.edge_weight.push_back(w);
    }
  }
  std::vector<std::uint32_t> rows(b.num_nodes);
  std::iota(rows.begin(), rows.end(), 0u);
  b.offsets = diff::make_index(b.node_offsets);
  b.src = diff::make_index(std::move(src));
  b.dst = diff::make_index(std::move(dst));
  b.node_rows = diff::make_index(std::move(rows));
  b.omni_rows = diff::make_index(std::move(omni));
  return b;
}

GraphBatch make_batch(const Graph& g, bool normalize_omni) {
  const Graph* one[] = {&g};
  return make_batch(std::span<const Graph* const>(one), normalize_omni);
}

}  // namespace mind::encoder
