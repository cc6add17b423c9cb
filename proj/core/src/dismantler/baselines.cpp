#include "mind/dismantler/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "mind/dismantler/rollout.hpp"
#include "mind/random.hpp"

namespace mind::dismantler {

namespace {

constexpr std::size_t kBetweennessLimit = 100000;

DismantlingCurve finish(const Graph& g, const std::vector<NodeId>& order, double threshold) {
  DismantlingCurve c = auc_for_order(g, order, threshold);
  truncate_at_crossing(c);
  return c;
}

}  // namespace

std::vector<NodeId> adaptive_degree_order(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> deg(n, 0);
  std::vector<std::uint8_t> alive(g.mask().begin(), g.mask().end());
  using Entry = std::pair<std::uint32_t, NodeId>;
  // Max degree first, then min id.
  auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
  std::vector<Entry> init;
  init.reserve(g.num_active());
  for (NodeId v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    deg[v] = g.degree(v);
    init.emplace_back(deg[v], v);
  }
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp, std::move(init));
  std::vector<NodeId> order;
  order.reserve(g.num_active());
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (!alive[v] || d != deg[v]) continue;
    alive[v] = 0;
    order.push_back(v);
    for (NodeId u : g.neighbors(v)) {
      if (!alive[u]) continue;
      heap.emplace(--deg[u], u);
    }
  }
  return order;
}

std::vector<double> pagerank(const Graph& g, double damping, double tol, int max_iter) {
  require(damping >= 0.0 && damping < 1.0, "pagerank: damping must lie in [0, 1)");
  const std::size_t n = g.num_nodes();
  const double na = static_cast<double>(g.num_active());
  std::vector<double> pr(n, 0.0), next(n);
  if (g.num_active() == 0) return pr;
  for (NodeId v = 0; v < n; ++v)
    if (g.is_active(v)) pr[v] = 1.0 / na;
  for (int it = 0; it < max_iter; ++it) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v)
      if (g.is_active(v) && g.degree(v) == 0) dangling += pr[v];
    const double base = (1.0 - damping) / na + damping * dangling / na;
    for (NodeId v = 0; v < n; ++v) {
      if (!g.is_active(v)) {
        next[v] = 0.0;
        continue;
      }
      double acc = 0.0;
      g.for_each_active_neighbor(v, [&](NodeId u) { acc += pr[u] / g.degree(u); });
      next[v] = base + damping * acc;
    }
    double diff = 0.0;
    for (NodeId v = 0; v < n; ++v) diff += std::abs(next[v] - pr[v]);
    pr.swap(next);
    if (diff < tol) break;
  }
  return pr;
}

std::vector<double> betweenness(const Graph& g) {
  require(g.num_active() <= kBetweennessLimit, "betweenness: graph exceeds the 10^5 node guard");
  const std::size_t n = g.num_nodes();
  std::vector<double> bc(n, 0.0), delta(n), sigma(n);
  std::vector<std::int64_t> dist(n);
  std::vector<NodeId> stack, queue;
  stack.reserve(n);
  queue.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    if (!g.is_active(s)) continue;
    stack.clear();
    queue.clear();
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      stack.push_back(v);
      g.for_each_active_neighbor(v, [&](NodeId w) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      });
    }
    for (std::size_t i = stack.size(); i-- > 0;) {
      const NodeId w = stack[i];
      g.for_each_active_neighbor(w, [&](NodeId v) {
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      });
      if (w != s) bc[w] += delta[w];
    }
  }
  for (double& b : bc) b *= 0.5;
  return bc;
}

std::vector<NodeId> static_order(const Graph& g, const std::vector<double>& score) {
  require(score.size() == g.num_nodes(), "static_order: one score per node required");
  std::vector<NodeId> order = g.active_nodes();
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return score[a] > score[b]; });
  return order;
}

DismantlingCurve baseline_adaptive_degree(const Graph& g, double threshold) {
  return finish(g, adaptive_degree_order(g), threshold);
}

DismantlingCurve baseline_pagerank(const Graph& g, double threshold, double damping) {
  return finish(g, static_order(g, pagerank(g, damping)), threshold);
}

DismantlingCurve baseline_betweenness(const Graph& g, double threshold) {
  return finish(g, static_order(g, betweenness(g)), threshold);
}

DismantlingCurve baseline_random(const Graph& g, double threshold, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeId> order = g.active_nodes();
  std::shuffle(order.begin(), order.end(), rng);
  return finish(g, order, threshold);
}

Baseline parse_baseline(const std::string& name) {
  if (name == "ad") return Baseline::AD;
  if (name == "pr") return Baseline::PR;
  if (name == "bc") return Baseline::BC;
  if (name == "random") return Baseline::RANDOM;
  throw ContractError("unknown baseline '" + name + "' (expected ad, pr, bc or random)");
}

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::AD: return "ad";
    case Baseline::PR: return "pr";
    case Baseline::BC: return "bc";
    case Baseline::RANDOM: return "random";
  }
  return "?";
}

DismantlingCurve run_baseline(Baseline b, const Graph& g, double threshold, std::uint64_t seed) {
  switch (b) {
    case Baseline::AD: return baseline_adaptive_degree(g, threshold);
    case Baseline::PR: return baseline_pagerank(g, threshold);
    case Baseline::BC: return baseline_betweenness(g, threshold);
    case Baseline::RANDOM: return baseline_random(g, threshold, seed);
  }
  throw ContractError("run_baseline: unknown baseline");
}

}  // namespace mind::dismantler
