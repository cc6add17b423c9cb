#pragma once

#include <cstdint>
#include <span>

#include "mind/graph/graph.hpp"

namespace mind {

/// Pearson correlation result. Regular (zero-variance) inputs report 0 with
/// the flag set instead of NaN.
struct Assortativity {
  double value = 0.0;
  bool zero_variance = false;
};

/// Integer stub sums behind a label correlation over active edges. Both
/// stubs of every edge are counted, so x and y share one marginal.
struct StubMoments {
  long double stubs = 0;  // 2|E|
  long double sum = 0;    // sum over stubs of the label
  long double sum_sq = 0;
  long double sum_cross = 0;  // sum over stubs of l(u) * l(v)

  Assortativity coefficient() const;
};

StubMoments stub_moments(const Graph& g, std::span<const std::int64_t> labels);

/// Degree assortativity over active edges; throws when there are none.
Assortativity degree_assortativity(const Graph& g);

/// Same estimator over arbitrary integer node labels.
Assortativity label_assortativity(const Graph& g, std::span<const std::int64_t> labels);

/// Newman modularity of the partition found by greedy agglomeration
/// (CNM-style: merge the adjacent pair with the largest gain until no merge
/// improves Q). Reporting only.
struct ModularityResult {
  double q = 0.0;
  std::vector<std::uint32_t> community;  // per node id; inactive nodes keep their own id
};
ModularityResult greedy_modularity(const Graph& g);
double modularity_report(const Graph& g);

/// Q of a given partition over active nodes.
double modularity(const Graph& g, std::span<const std::uint32_t> community);

}  // namespace mind
