#include "mind/graph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace mind {

Assortativity StubMoments::coefficient() const {
  const long double num = stubs * sum_cross - sum * sum;
  const long double den = stubs * sum_sq - sum * sum;
  if (den <= 0) return {0.0, true};
  return {static_cast<double>(num / den), false};
}

StubMoments stub_moments(const Graph& g, std::span<const std::int64_t> labels) {
  require(labels.size() == g.num_nodes(), "assortativity: one label per node id required");
  require(g.num_edges() > 0, "assortativity: graph has no active edges");
  StubMoments m;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!g.is_active(v)) continue;
    const long double lv = static_cast<long double>(labels[v]);
    const long double d = g.degree(v);
    m.stubs += d;
    m.sum += d * lv;
    m.sum_sq += d * lv * lv;
    g.for_each_active_neighbor(v, [&](NodeId u) { m.sum_cross += lv * static_cast<long double>(labels[u]); });
  }
  return m;
}

Assortativity label_assortativity(const Graph& g, std::span<const std::int64_t> labels) {
  return stub_moments(g, labels).coefficient();
}

Assortativity degree_assortativity(const Graph& g) {
  std::vector<std::int64_t> deg(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) deg[v] = g.degree(v);
  return label_assortativity(g, deg);
}

double modularity(const Graph& g, std::span<const std::uint32_t> community) {
  require(community.size() == g.num_nodes(), "modularity: one community per node id required");
  const double m = static_cast<double>(g.num_edges());
  if (m == 0) return 0.0;
  std::map<std::uint32_t, double> inside, degsum;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!g.is_active(v)) continue;
    degsum[community[v]] += g.degree(v);
    g.for_each_active_neighbor(v, [&](NodeId u) {
      if (u > v && community[u] == community[v]) inside[community[v]] += 1.0;
    });
  }
  double q = 0.0;
  for (const auto& [c, d] : degsum) {
    const double a = d / (2.0 * m);
    q += inside[c] / m - a * a;
  }
  return q;
}

ModularityResult greedy_modularity(const Graph& g) {
  const std::size_t n = g.num_nodes();
  ModularityResult res;
  res.community.resize(n);
  for (NodeId v = 0; v < n; ++v) res.community[v] = v;
  const double m = static_cast<double>(g.num_edges());
  if (m == 0) return res;

  // e[c][d] = fraction of edge ends joining c and d (each direction 1/2m), a[c] = degree share.
  std::vector<std::map<std::uint32_t, double>> e(n);
  std::vector<double> a(n, 0.0);
  std::vector<std::uint8_t> alive(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!g.is_active(v)) continue;
    alive[v] = 1;
    a[v] = g.degree(v) / (2.0 * m);
    g.for_each_active_neighbor(v, [&](NodeId u) { e[v][u] += 1.0 / (2.0 * m); });
  }
  double q = 0.0;
  for (NodeId v = 0; v < n; ++v) q -= a[v] * a[v];

  std::vector<std::uint32_t> root(n);
  for (NodeId v = 0; v < n; ++v) root[v] = v;

  while (true) {
    double best = 0.0;
    std::uint32_t bi = 0, bj = 0;
    bool found = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto& [j, eij] : e[i]) {
        if (j <= i) continue;
        const double dq = 2.0 * (eij - a[i] * a[j]);
        if (dq > best + 1e-15) {
          best = dq;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    // merge bj into bi
    for (const auto& [k, ejk] : e[bj]) {
      if (k == bi) continue;
      e[bi][k] += ejk;
      e[k].erase(bj);
      e[k][bi] += ejk;
    }
    e[bi].erase(bj);
    e[bj].clear();
    a[bi] += a[bj];
    a[bj] = 0.0;
    alive[bj] = 0;
    for (auto& r : root)
      if (r == bj) r = bi;
    q += best;
  }
  res.community = root;
  res.q = modularity(g, res.community);
  return res;
}

double modularity_report(const Graph& g) { return greedy_modularity(g).q; }

}  // namespace mind
