#include "mind/netgen/rewire.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mind/graph/stats.hpp"

namespace mind::netgen {

namespace {

std::uint64_t key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (std::uint64_t{u} << 32) | v;
}

}  // namespace

std::string_view to_string(LabelMode m) { return m == LabelMode::RANDOM ? "RANDOM" : "DEGREE"; }

std::vector<std::int64_t> assign_labels(const Graph& g, LabelMode mode, Rng& rng) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  if (mode == LabelMode::DEGREE) {
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return g.degree(a) < g.degree(b); });
  }
  std::vector<std::int64_t> labels(n);
  for (std::size_t r = 0; r < n; ++r) labels[order[r]] = static_cast<std::int64_t>(r);
  return labels;
}

SwapGraph::SwapGraph(const Graph& g) : adj_(g.num_nodes()), stamp_(g.num_nodes(), 0) {
  for (const Edge& e : g.active_edges()) {
    edges_.push_back(e);
    add(e.u, e.v);
  }
}

bool SwapGraph::has_edge(NodeId u, NodeId v) const { return keys_.count(key(u, v)) != 0; }

void SwapGraph::add(NodeId u, NodeId v) {
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  keys_.insert(key(u, v));
}

void SwapGraph::remove(NodeId u, NodeId v) {
  auto drop = [](std::vector<NodeId>& a, NodeId x) {
    auto it = std::find(a.begin(), a.end(), x);
    *it = a.back();
    a.pop_back();
  };
  drop(adj_[u], v);
  drop(adj_[v], u);
  keys_.erase(key(u, v));
}

std::optional<Swap> SwapGraph::propose(std::size_t a, bool flip_a, std::size_t b, bool flip_b) const {
  if (a == b) return std::nullopt;
  Edge e1 = edges_[a], e2 = edges_[b];
  if (flip_a) std::swap(e1.u, e1.v);
  if (flip_b) std::swap(e2.u, e2.v);
  const Swap s{e1.u, e1.v, e2.u, e2.v};
  if (s.i == s.j || s.i == s.k || s.l == s.j || s.l == s.k) return std::nullopt;
  if (has_edge(s.i, s.k) || has_edge(s.j, s.l)) return std::nullopt;
  return s;
}

void SwapGraph::apply(std::size_t a, std::size_t b, const Swap& s) {
  remove(s.i, s.l);
  remove(s.j, s.k);
  add(s.i, s.k);
  add(s.j, s.l);
  edges_[a] = {s.i, s.k};
  edges_[b] = {s.j, s.l};
}

void SwapGraph::revert(std::size_t a, std::size_t b, const Swap& s) {
  remove(s.i, s.k);
  remove(s.j, s.l);
  add(s.i, s.l);
  add(s.j, s.k);
  edges_[a] = {s.i, s.l};
  edges_[b] = {s.j, s.k};
}

bool SwapGraph::reachable(NodeId from, NodeId to) const {
  if (from == to) return true;
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::vector<NodeId> queue{from};
  stamp_[from] = epoch_;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (NodeId w : adj_[queue[head]]) {
      if (stamp_[w] == epoch_) continue;
      if (w == to) return true;
      stamp_[w] = epoch_;
      queue.push_back(w);
    }
  }
  return false;
}

Graph SwapGraph::to_graph() const { return Graph::from_edges(adj_.size(), edges_); }

RewireResult rewire_to_target(const Graph& g, const RewireSpec& spec, Rng& rng) {
  auto labels = assign_labels(g, spec.label_mode, rng);
  return rewire_with_labels(g, std::move(labels), spec, rng);
}

RewireResult rewire_with_labels(const Graph& g, std::vector<std::int64_t> labels,
                                const RewireSpec& spec, Rng& rng) {
  require(g.num_active() == g.num_nodes(), "rewire: every node must be active");
  require(is_connected(g), "rewire: input graph must be connected");
  require(spec.tolerance > 0.0, "rewire: tolerance must be positive");
  require(labels.size() == g.num_nodes(), "rewire: one label per node required");

  StubMoments mom = stub_moments(g, labels);
  auto coeff = [&] {
    const Assortativity a = mom.coefficient();
    return a.zero_variance ? 0.0 : a.value;
  };

  RewireResult res;
  res.initial = coeff();
  SwapGraph sg(g);
  const std::size_t m = sg.edges().size();
  const std::size_t budget = spec.max_attempts > 0 ? spec.max_attempts : 100 * m;

  double r = res.initial;
  while (std::abs(r - spec.target) > spec.tolerance && res.attempts < budget && m >= 2) {
    ++res.attempts;
    const bool increase = r < spec.target;
    const auto a = uniform_int<std::size_t>(rng, 0, m - 1);
    const auto b = uniform_int<std::size_t>(rng, 0, m - 1);
    const bool fa = bernoulli(rng, 0.5), fb = bernoulli(rng, 0.5);
    const auto s = sg.propose(a, fa, b, fb);
    if (!s) continue;
    const long double delta = static_cast<long double>(labels[s->i] - labels[s->j]) *
                              static_cast<long double>(labels[s->k] - labels[s->l]);
    if (increase ? delta <= 0 : delta >= 0) continue;
    sg.apply(a, b, *s);
    if (!sg.reachable(s->i, s->l) || !sg.reachable(s->j, s->k)) {
      sg.revert(a, b, *s);
      continue;
    }
    mom.sum_cross += 2 * delta;
    r = coeff();
    if (spec.record_swaps) res.swaps.push_back(*s);
  }

  res.graph = sg.to_graph();
  res.achieved = r;
  res.reached = std::abs(r - spec.target) <= spec.tolerance;
  res.labels = std::move(labels);
  return res;
}

}  // namespace mind::netgen
