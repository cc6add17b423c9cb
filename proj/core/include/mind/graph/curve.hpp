#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mind/graph/graph.hpp"

namespace mind {

/// Ordered removal sequence and the relative LCC size after every removal.
///
/// `terminated_at` is the index of the first removal whose fraction fell
/// below the threshold, or `removal_order.size()` when that never happened.
/// `auc` sums the fractions up to and including `terminated_at`.
struct DismantlingCurve {
  std::vector<NodeId> removal_order;
  std::vector<double> lcc_fractions;
  double auc = 0.0;
  std::size_t terminated_at = 0;
  std::size_t n0 = 0;
  double threshold = 0.0;

  std::size_t size() const { return removal_order.size(); }
  /// Sum over every recorded step, ignoring the threshold.
  double full_auc() const;
  /// Re-scores the recorded fractions against another threshold.
  double auc_at(double threshold) const;
};

/// Sums fractions up to the first one below `threshold` (inclusive).
/// Returns {auc, terminated_at}.
std::pair<double, std::size_t> thresholded_auc(std::span<const double> fractions, double threshold);

/// Exact LCC curve for a removal order by reverse insertion into a
/// union-find: O((|V| + |E|) alpha). `order` must list distinct active nodes;
/// nodes not listed stay present throughout.
DismantlingCurve auc_for_order(const Graph& g, std::span<const NodeId> order, double threshold);

/// CSV with header `step,node,lcc_fraction` and trailer `# auc=<value>`.
/// `labels`, when given, maps node ids to the ids printed in the file.
void write_curve_csv(std::ostream& out, const DismantlingCurve& curve,
                     std::span<const long long> labels = {});
void write_curve_csv(const std::string& path, const DismantlingCurve& curve,
                     std::span<const long long> labels = {});

/// Parsed curve file. Node columns are kept as written.
struct CurveFile {
  std::vector<long long> nodes;
  std::vector<double> lcc_fractions;
  double auc = 0.0;
};
CurveFile read_curve_csv(const std::string& path);

}  // namespace mind
