#include "mind/graph/graph.hpp"

#include <algorithm>
#include <numeric>

namespace mind {

Topology::Topology(std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

bool Topology::has_edge(NodeId u, NodeId v) const {
  auto nu = neighbors(u);
  auto nv = neighbors(v);
  if (nu.size() > nv.size()) std::swap(u, v), std::swap(nu, nv);
  return std::binary_search(nu.begin(), nu.end(), v);
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  require(n <= std::size_t{0xffffffffu}, "graph too large for 32-bit node ids");
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (const Edge& e : edges) {
    require(e.u < n && e.v < n, "edge endpoint out of range");
    require(e.u != e.v, "self-loop in edge list");
    ++offsets[e.u + 1];
    ++offsets[e.v + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<NodeId> nbrs(offsets.back());
  std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    nbrs[fill[e.u]++] = e.v;
    nbrs[fill[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = nbrs.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    auto last = nbrs.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
    std::sort(first, last);
    require(std::adjacent_find(first, last) == last, "duplicate edge in edge list");
  }

  Graph g;
  g.topo_ = std::make_shared<const Topology>(std::move(offsets), std::move(nbrs));
  g.active_.assign(n, 1);
  g.recount();
  return g;
}

void Graph::recount() {
  const std::size_t n = active_.size();
  degree_.assign(n, 0);
  num_active_ = 0;
  std::size_t stubs = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (!active_[v]) continue;
    ++num_active_;
    std::uint32_t d = 0;
    for (NodeId u : topo_->neighbors(v)) d += active_[u];
    degree_[v] = d;
    stubs += d;
  }
  m_active_ = stubs / 2;
}

void Graph::remove_node(NodeId v) {
  require(v < active_.size(), "remove_node: node id out of range");
  require(active_[v] != 0, "remove_node: node already inactive");
  active_[v] = 0;
  for (NodeId u : topo_->neighbors(v)) {
    if (active_[u]) --degree_[u];
  }
  m_active_ -= degree_[v];
  degree_[v] = 0;
  --num_active_;
}

std::vector<NodeId> Graph::active_nodes() const {
  std::vector<NodeId> out;
  out.reserve(num_active_);
  for (NodeId v = 0; v < active_.size(); ++v)
    if (active_[v]) out.push_back(v);
  return out;
}

std::vector<Edge> Graph::active_edges() const {
  std::vector<Edge> out;
  out.reserve(m_active_);
  for (NodeId v = 0; v < active_.size(); ++v) {
    if (!active_[v]) continue;
    for (NodeId u : topo_->neighbors(v))
      if (u > v && active_[u]) out.push_back({v, u});
  }
  return out;
}

Graph Graph::with_mask(std::span<const std::uint8_t> mask) const {
  require(mask.size() == active_.size(), "with_mask: mask size mismatch");
  Graph g;
  g.topo_ = topo_;
  g.active_.assign(mask.begin(), mask.end());
  for (auto& a : g.active_) a = a ? 1 : 0;
  g.recount();
  return g;
}

Graph Graph::compacted(std::vector<NodeId>* old_ids) const {
  std::vector<NodeId> remap(active_.size(), 0);
  std::vector<NodeId> ids = active_nodes();
  for (NodeId i = 0; i < ids.size(); ++i) remap[ids[i]] = i;
  std::vector<Edge> edges = active_edges();
  for (Edge& e : edges) e = {remap[e.u], remap[e.v]};
  if (old_ids) *old_ids = ids;
  return from_edges(ids.size(), edges);
}

std::size_t Components::largest() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

Components connected_components(const Graph& g) {
  Components c;
  const std::size_t n = g.num_nodes();
  c.label.assign(n, -1);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (!g.is_active(s) || c.label[s] >= 0) continue;
    const auto id = static_cast<std::int64_t>(c.sizes.size());
    std::size_t size = 0;
    c.label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      ++size;
      g.for_each_active_neighbor(v, [&](NodeId u) {
        if (c.label[u] < 0) {
          c.label[u] = id;
          stack.push_back(u);
        }
      });
    }
    c.sizes.push_back(size);
  }
  return c;
}

std::size_t largest_component_size(const Graph& g) { return connected_components(g).largest(); }

bool is_connected(const Graph& g) {
  return g.num_active() > 0 && largest_component_size(g) == g.num_active();
}

double lcc_fraction(const Graph& g, std::size_t n0) {
  require(n0 >= 1, "lcc_fraction: n0 must be positive");
  return static_cast<double>(largest_component_size(g)) / static_cast<double>(n0);
}

Graph largest_component_subgraph(const Graph& g) {
  Components c = connected_components(g);
  if (c.sizes.empty()) return Graph::from_edges(0, {});
  const auto best = static_cast<std::int64_t>(
      std::max_element(c.sizes.begin(), c.sizes.end()) - c.sizes.begin());
  std::vector<std::uint8_t> mask(g.num_nodes(), 0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) mask[v] = c.label[v] == best;
  return g.with_mask(mask).compacted();
}

}  // namespace mind
