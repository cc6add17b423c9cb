#pragma once
// Slow, independent reference implementations used as test oracles.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mind/graph/graph.hpp"

namespace oracle {

using Adj = std::vector<std::vector<int>>;

inline Adj adjacency(std::size_t n, const std::vector<mind::Edge>& edges) {
  Adj adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(static_cast<int>(e.v));
    adj[e.v].push_back(static_cast<int>(e.u));
  }
  return adj;
}

// Largest component among alive nodes by plain BFS.
inline std::size_t lcc(const Adj& adj, const std::vector<bool>& alive) {
  std::vector<bool> seen(adj.size(), false);
  std::size_t best = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (!alive[s] || seen[s]) continue;
    std::size_t size = 0;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    seen[s] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      ++size;
      for (int u : adj[v])
        if (alive[u] && !seen[u]) {
          seen[u] = true;
          q.push(u);
        }
    }
    best = std::max(best, size);
  }
  return best;
}

// Fractions after each removal, recomputed from scratch.
inline std::vector<double> naive_curve(const Adj& adj, const std::vector<mind::NodeId>& order) {
  std::vector<bool> alive(adj.size(), true);
  std::vector<double> out;
  for (auto v : order) {
    alive[v] = false;
    out.push_back(static_cast<double>(lcc(adj, alive)) / static_cast<double>(adj.size()));
  }
  return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Pearson over both orientations of every edge.
inline double stub_pearson(const std::vector<mind::Edge>& edges, const std::vector<double>& label) {
  std::vector<double> x, y;
  for (const auto& e : edges) {
    x.push_back(label[e.u]), y.push_back(label[e.v]);
    x.push_back(label[e.v]), y.push_back(label[e.u]);
  }
  return pearson(x, y);
}

inline double modularity(std::size_t n, const std::vector<mind::Edge>& edges, const std::vector<int>& c) {
  const double m = static_cast<double>(edges.size());
  std::vector<double> deg(n, 0.0);
  for (const auto& e : edges) deg[e.u] += 1, deg[e.v] += 1;
  double q = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (c[i] != c[j]) continue;
      double a = 0;
      for (const auto& e : edges)
        if ((e.u == i && e.v == j) || (e.u == j && e.v == i)) a = 1;
      q += a - deg[i] * deg[j] / (2 * m);
    }
  return q / (2 * m);
}

// Best modularity over every set partition (restricted growth strings).
inline double best_modularity(std::size_t n, const std::vector<mind::Edge>& edges) {
  std::vector<int> c(n, 0);
  double best = -1;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      best = std::max(best, modularity(n, edges, c));
      return;
    }
    for (int k = 0; k <= used; ++k) {
      c[i] = k;
      rec(i + 1, std::max(used, k + 1));
    }
  };
  c[0] = 0;
  rec(1, 1);
  return best;
}

// PageRank by solving (I - d P) x = (1 - d)/n directly; dangling mass uniform.
inline Eigen::VectorXd pagerank_dense(const Adj& adj, double d) {
  const auto n = static_cast<Eigen::Index>(adj.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (adj[j].empty())
      p.col(j).setConstant(1.0 / static_cast<double>(n));
    else
      for (int i : adj[j]) p(i, j) = 1.0 / static_cast<double>(adj[j].size());
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - d * p;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, (1.0 - d) / static_cast<double>(n));
  Eigen::VectorXd x = a.fullPivLu().solve(b);
  return x / x.sum();
}

// Betweenness from all-pairs BFS distances and path counts, unordered pairs.
inline std::vector<double> betweenness_pairs(const Adj& adj) {
  const std::size_t n = adj.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, inf)), sigma(n, std::vector<double>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(static_cast<int>(s));
    dist[s][s] = 0;
    sigma[s][s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[v]) {
        if (dist[s][u] == inf) {
          dist[s][u] = dist[s][v] + 1;
          q.push(u);
        }
        if (dist[s][u] == dist[s][v] + 1) sigma[s][u] += sigma[s][v];
      }
    }
  }
  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      if (dist[s][t] == inf) continue;
      for (std::size_t v = 0; v < n; ++v)
        if (v != s && v != t && dist[s][v] + dist[v][t] == dist[s][t])
          bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
    }
  return bc;
}

}  // namespace oracle
