#pragma once

#include <functional>

#include "mind/agent/networks.hpp"
#include "mind/graph/curve.hpp"

namespace mind::dismantler {

enum class RolloutMode { Argmax, Sample };

struct RolloutConfig {
  double threshold = 0.1;
  /// Fraction of remaining nodes removed per forward pass; 0 picks one node
  /// per pass up to 10^4 active nodes and 1% of the remainder beyond that.
  double batch_frac = 0.0;
  RolloutMode mode = RolloutMode::Argmax;
  std::uint64_t seed = 0;
  bool normalize_omni = true;
};

/// Scores (policy logits) for the node rows of a single-graph batch.
using ScoreFn = std::function<Eigen::VectorXd(const encoder::GraphBatch&)>;

/// Removal count for the next pass given the remaining active nodes.
std::size_t removals_per_pass(const RolloutConfig& cfg, std::size_t active);

/// Repeatedly scores the current graph and removes the top nodes until the
/// LCC fraction falls below the threshold. Every removal is recorded.
DismantlingCurve rollout(const Graph& g, const ScoreFn& score, const RolloutConfig& cfg = {});
DismantlingCurve rollout(const Graph& g, const agent::NodeScorer<float>& policy, const RolloutConfig& cfg = {});

/// Drops the removals after the threshold crossing (AUC is unchanged).
void truncate_at_crossing(DismantlingCurve& curve);

}  // namespace mind::dismantler
