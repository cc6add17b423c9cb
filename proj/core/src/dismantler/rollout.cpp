#include "mind/dismantler/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mind::dismantler {

namespace {

constexpr std::size_t kSingleRemovalLimit = 10000;
constexpr double kLargeGraphFrac = 0.01;

}  // namespace

std::size_t removals_per_pass(const RolloutConfig& cfg, std::size_t active) {
  double frac = cfg.batch_frac;
  if (frac <= 0.0) {
    if (active <= kSingleRemovalLimit) return std::min<std::size_t>(1, active);
    frac = kLargeGraphFrac;
  }
  const auto k = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(active)));
  return std::clamp<std::size_t>(k, 1, active);
}

void truncate_at_crossing(DismantlingCurve& curve) {
  if (curve.terminated_at < curve.removal_order.size()) {
    curve.removal_order.resize(curve.terminated_at + 1);
    curve.lcc_fractions.resize(curve.terminated_at + 1);
  }
}

DismantlingCurve rollout(const Graph& g, const ScoreFn& score, const RolloutConfig& cfg) {
  require(cfg.threshold >= 0.0 && cfg.threshold <= 1.0, "rollout: threshold must lie in [0, 1]");
  require(cfg.batch_frac >= 0.0 && cfg.batch_frac <= 1.0, "rollout: batch_frac must lie in [0, 1]");
  const std::size_t n0 = g.num_active();
  if (cfg.threshold >= 1.0 || n0 == 0) {
    DismantlingCurve empty;
    empty.n0 = n0;
    empty.threshold = cfg.threshold;
    return empty;
  }

  Rng rng(cfg.seed);
  Graph cur = g;
  std::vector<NodeId> order;
  order.reserve(n0);
  std::vector<std::uint32_t> idx;
  std::vector<double> key;
  while (cur.num_active() > 0) {
    if (static_cast<double>(largest_component_size(cur)) / static_cast<double>(n0) < cfg.threshold) break;
    const encoder::GraphBatch batch = encoder::make_batch(cur, cfg.normalize_omni);
    const Eigen::VectorXd s = score(batch);
    require(s.size() == batch.num_nodes, "rollout: scorer returned the wrong number of scores");
    key.assign(s.data(), s.data() + s.size());
    if (cfg.mode == RolloutMode::Sample) {
      // Gumbel top-k draws k nodes from softmax(s) without replacement.
      for (double& x : key) x -= std::log(-std::log(uniform_real(rng, 1e-300, 1.0)));
    }
    const std::size_t k = removals_per_pass(cfg, batch.num_nodes);
    idx.resize(batch.num_nodes);
    std::iota(idx.begin(), idx.end(), 0u);
    auto better = [&](std::uint32_t a, std::uint32_t b) { return key[a] > key[b] || (key[a] == key[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
    for (std::size_t i = 0; i < k; ++i) {
      const NodeId v = batch.node_ids[idx[i]];
      cur.remove_node(v);
      order.push_back(v);
    }
  }
  DismantlingCurve curve = auc_for_order(g, order, cfg.threshold);
  truncate_at_crossing(curve);
  return curve;
}

DismantlingCurve rollout(const Graph& g, const agent::NodeScorer<float>& policy, const RolloutConfig& cfg) {
  return rollout(
      g, [&](const encoder::GraphBatch& b) { return Eigen::VectorXd(policy.apply(b).col(0).cast<double>()); }, cfg);
}

}  // namespace mind::dismantler
