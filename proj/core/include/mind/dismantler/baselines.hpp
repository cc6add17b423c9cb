#pragma once

#include <string>
#include <vector>

#include "mind/graph/curve.hpp"

namespace mind::dismantler {

/// Full adaptive-degree order: repeatedly the active node of highest current
/// degree, ties to the lowest id. O((|V| + |E|) log |V|) with a lazy heap.
std::vector<NodeId> adaptive_degree_order(const Graph& g);

/// PageRank over active nodes; dangling mass is spread uniformly. Inactive
/// nodes score 0. Stops when the L1 change drops below `tol` or after `max_iter`.
std::vector<double> pagerank(const Graph& g, double damping = 0.85, double tol = 1e-10, int max_iter = 200);

/// Brandes' exact betweenness over active nodes, each unordered pair counted
/// once (unnormalized). Guarded to at most 10^5 active nodes.
std::vector<double> betweenness(const Graph& g);

/// Active nodes by descending score, ties to the lowest id.
std::vector<NodeId> static_order(const Graph& g, const std::vector<double>& score);

DismantlingCurve baseline_adaptive_degree(const Graph& g, double threshold);
DismantlingCurve baseline_pagerank(const Graph& g, double threshold, double damping = 0.85);
DismantlingCurve baseline_betweenness(const Graph& g, double threshold);
/// Uniformly random removal order (the reference point for learned policies).
DismantlingCurve baseline_random(const Graph& g, double threshold, std::uint64_t seed);

enum class Baseline { AD, PR, BC, RANDOM };
Baseline parse_baseline(const std::string& name);
std::string to_string(Baseline b);
DismantlingCurve run_baseline(Baseline b, const Graph& g, double threshold, std::uint64_t seed = 0);

}  // namespace mind::dismantler
