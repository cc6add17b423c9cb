#include "mind/netgen/generators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

namespace mind::netgen {

namespace {

std::uint64_t key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (std::uint64_t{u} << 32) | v;
}

void check_growth_params(std::size_t n, std::size_t m) {
  require(m >= 1, "generator: m must be >= 1");
  require(n > m + 1, "generator: n must exceed m + 1");
}

void add_clique(std::size_t k, std::vector<Edge>& edges, std::vector<std::vector<NodeId>>& adj) {
  for (NodeId i = 0; i < k; ++i)
    for (NodeId j = i + 1; j < k; ++j) {
      edges.push_back({i, j});
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::LPA: return "LPA";
    case Model::COPY: return "COPY";
    case Model::ER: return "ER";
    case Model::WS: return "WS";
  }
  return "?";
}

Model parse_model(std::string_view s) {
  if (s == "LPA" || s == "lpa") return Model::LPA;
  if (s == "COPY" || s == "copy") return Model::COPY;
  if (s == "ER" || s == "er") return Model::ER;
  if (s == "WS" || s == "ws") return Model::WS;
  throw ContractError("unknown generator model '" + std::string(s) + "'");
}

Graph gen_lpa(std::size_t n, std::size_t m, double gamma, Rng& rng) {
  check_growth_params(n, m);
  require(gamma >= 2.0 && gamma <= 4.0, "gen_lpa: gamma must lie in [2, 4]");
  std::vector<Edge> edges;
  std::vector<std::vector<NodeId>> adj(n);
  add_clique(m + 1, edges, adj);

  const double shift = static_cast<double>(m) * (gamma - 3.0);
  std::vector<double> weight(n, 0.0);
  std::vector<NodeId> picked;
  for (NodeId t = static_cast<NodeId>(m + 1); t < n; ++t) {
    for (NodeId i = 0; i < t; ++i)
      weight[i] = std::max(static_cast<double>(adj[i].size()) + shift, kLpaWeightFloor);
    picked.clear();
    for (std::size_t c = 0; c < m; ++c) {
      double total = 0.0;
      for (NodeId i = 0; i < t; ++i) total += weight[i];
      double r = uniform_real(rng, 0.0, total);
      NodeId choice = 0;
      for (NodeId i = 0; i < t; ++i) {
        if (weight[i] <= 0.0) continue;
        choice = i;  // last positive weight also covers r == total after rounding
        if (r < weight[i]) break;
        r -= weight[i];
      }
      picked.push_back(choice);
      weight[choice] = 0.0;  // without replacement
    }
    for (NodeId v : picked) {
      edges.push_back({v, t});
      adj[v].push_back(t);
      adj[t].push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

double copying_alpha(double gamma) {
  require(gamma >= 2.0 && gamma <= 4.0, "copying model: gamma must lie in [2, 4]");
  return (2.0 - gamma) / (1.0 - gamma);
}

Graph gen_copying(std::size_t n, std::size_t m, double gamma, Rng& rng) {
  check_growth_params(n, m);
  const double alpha = copying_alpha(gamma);
  std::vector<Edge> edges;
  std::vector<std::vector<NodeId>> adj(n);
  add_clique(m + 1, edges, adj);

  std::vector<NodeId> picked;
  for (NodeId t = static_cast<NodeId>(m + 1); t < n; ++t) {
    picked.clear();
    while (picked.size() < m) {
      NodeId target = 0;
      std::size_t redraws = 0;
      do {
        const NodeId u = uniform_int<NodeId>(rng, 0, t - 1);
        if (bernoulli(rng, alpha) || ++redraws > 64 * t) {
          target = u;
        } else {
          const auto& nb = adj[u];
          target = nb[uniform_int<std::size_t>(rng, 0, nb.size() - 1)];
        }
      } while (std::find(picked.begin(), picked.end(), target) != picked.end());
      picked.push_back(target);
    }
    for (NodeId v : picked) {
      edges.push_back({v, t});
      adj[v].push_back(t);
      adj[t].push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

double er_edge_probability(std::size_t n, std::size_t m) {
  require(n >= 2, "gen_er: n must be >= 2");
  const double N = static_cast<double>(n);
  const double p = (2.0 * N - static_cast<double>(m + 1)) * static_cast<double>(m) / (N * (N - 1.0));
  require(p > 0.0 && p <= 1.0, "gen_er: edge probability must lie in (0, 1]");
  return p;
}

Graph gen_gnp(std::size_t n, double p, Rng& rng) {
  require(p >= 0.0 && p <= 1.0, "gen_gnp: p must lie in [0, 1]");
  std::vector<Edge> edges;
  if (p <= 0.0 || n < 2) return Graph::from_edges(n, edges);
  if (p >= 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId w = 0; w < v; ++w) edges.push_back({w, v});
    return Graph::from_edges(n, edges);
  }
  // Batagelj-Brandes skipping over the lower triangle.
  const double lq = std::log1p(-p);
  long long v = 1, w = -1;
  const auto N = static_cast<long long>(n);
  while (v < N) {
    const double r = uniform_real(rng);
    w += 1 + static_cast<long long>(std::floor(std::log1p(-r) / lq));
    while (w >= v && v < N) {
      w -= v;
      ++v;
    }
    if (v < N) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
  }
  return Graph::from_edges(n, edges);
}

Graph gen_er(std::size_t n, std::size_t m, Rng& rng, bool keep_lcc) {
  Graph g = gen_gnp(n, er_edge_probability(n, m), rng);
  if (!keep_lcc || is_connected(g)) return g;
  return largest_component_subgraph(g);
}

Graph gen_gnm(std::size_t n, std::size_t m, Rng& rng) {
  require(n >= 2, "gen_gnm: n must be >= 2");
  const long double max_edges = static_cast<long double>(n) * static_cast<long double>(n - 1) / 2;
  require(static_cast<long double>(m) <= max_edges, "gen_gnm: too many edges requested");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<Edge> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    const NodeId u = uniform_int<NodeId>(rng, 0, static_cast<NodeId>(n - 1));
    const NodeId v = uniform_int<NodeId>(rng, 0, static_cast<NodeId>(n - 1));
    if (u == v || !seen.insert(key(u, v)).second) continue;
    edges.push_back({u, v});
  }
  return Graph::from_edges(n, edges);
}

Graph gen_ws(std::size_t n, std::size_t k, double beta, Rng& rng) {
  require(k % 2 == 0 && k >= 2, "gen_ws: k must be even and >= 2");
  require(k < n, "gen_ws: k must be < n");
  require(beta >= 0.0 && beta <= 1.0, "gen_ws: beta must lie in [0, 1]");
  std::unordered_set<std::uint64_t> present;
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (std::size_t j = 1; j <= k / 2; ++j) {
      const auto t = static_cast<NodeId>((i + j) % n);
      edges.push_back({i, t});
      present.insert(key(i, t));
    }
  std::vector<std::size_t> degree(n, k);
  for (Edge& e : edges) {
    if (!bernoulli(rng, beta)) continue;
    if (degree[e.u] >= n - 1) continue;  // no free endpoint
    NodeId w;
    do {
      w = uniform_int<NodeId>(rng, 0, static_cast<NodeId>(n - 1));
    } while (w == e.u || present.count(key(e.u, w)));
    present.erase(key(e.u, e.v));
    --degree[e.v];
    ++degree[w];
    e.v = w;
    present.insert(key(e.u, w));
  }
  return Graph::from_edges(n, edges);
}

Graph generate(const GenSpec& spec) {
  Rng rng(spec.seed);
  switch (spec.model) {
    case Model::LPA: return gen_lpa(spec.n, spec.m, spec.gamma, rng);
    case Model::COPY: return gen_copying(spec.n, spec.m, spec.gamma, rng);
    case Model::ER: return gen_er(spec.n, spec.m, rng);
    case Model::WS: return gen_ws(spec.n, spec.m, spec.beta, rng);
  }
  throw ContractError("generate: unknown model");
}

}  // namespace mind::netgen
