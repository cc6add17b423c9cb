#pragma once

#include <span>
#include <vector>

#include "mind/agent/networks.hpp"
#include "mind/agent/replay.hpp"

namespace mind::agent {

/// A sampled minibatch laid out for the networks.
struct SacBatch {
  encoder::GraphBatch states;
  diff::IndexList action_rows;          // row of the taken action inside `states`
  std::vector<double> rewards;
  std::vector<std::uint8_t> terminal;
  encoder::GraphBatch successors;       // non-terminal transitions only
  std::vector<std::int32_t> successor;  // per transition: graph index in `successors`, or -1

  std::size_t size() const { return rewards.size(); }
};

SacBatch make_sac_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices,
                        std::span<const Graph> corpus, bool normalize_omni);

/// Per graph: sum_v pi(v) * (min(q1, q2)(v) - alpha * log pi(v)).
std::vector<double> soft_state_values(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                      const Eigen::VectorXd& log_pi, std::span<const std::uint32_t> offsets,
                                      double alpha);

/// r + gamma * (1 - terminal) * V(successor).
std::vector<double> bellman_targets(const SacBatch& batch, std::span<const double> successor_values, double gamma);

/// Full target computation from the target Q networks and the current policy.
template <class T>
std::vector<double> q_targets(const AgentNetworks<T>& nets, const SacBatch& batch, double alpha, double gamma);

/// Mean squared error of Q(G_t, a_t) against fixed targets.
template <class T>
diff::Var<T> q_loss(diff::Tape<T>& tape, NodeScorer<T>& q, const SacBatch& batch, std::span<const double> targets);

template <class T>
struct PolicyLoss {
  diff::Var<T> loss;
  std::vector<double> entropy;  // per state
};

/// sum_v pi(v) * (alpha * log pi(v) - min_q(v)), averaged over states.
/// `min_q` (num_nodes x 1) is treated as a constant.
template <class T>
PolicyLoss<T> policy_loss(diff::Tape<T>& tape, NodeScorer<T>& pi, const SacBatch& batch, const diff::Matrix<T>& min_q,
                          double alpha);

/// Gradient of log_alpha * mean(H - target) with target = scale * ln|V_t| per state.
double alpha_gradient(std::span<const double> entropy, const encoder::GraphBatch& states, double target_scale);

}  // namespace mind::agent
