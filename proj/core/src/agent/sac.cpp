#include "mind/agent/sac.hpp"

#include <algorithm>
#include <cmath>

namespace mind::agent {

using diff::Matrix;
using diff::Var;

SacBatch make_sac_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices,
                        std::span<const Graph> corpus, bool normalize_omni) {
  require(!indices.empty(), "make_sac_batch: empty batch");
  SacBatch b;
  std::vector<Graph> before, after;
  before.reserve(indices.size());
  std::vector<NodeId> actions;
  for (std::size_t i : indices) {
    const Transition& t = buffer[i];
    require(t.graph < corpus.size(), "make_sac_batch: transition refers to a missing graph");
    before.push_back(t.mask.apply(corpus[t.graph]));
    actions.push_back(t.action);
    b.rewards.push_back(t.reward);
    b.terminal.push_back(t.terminal ? 1 : 0);
    if (t.terminal) {
      b.successor.push_back(-1);
    } else {
      Graph next = before.back();
      next.remove_node(t.action);
      b.successor.push_back(static_cast<std::int32_t>(after.size()));
      after.push_back(std::move(next));
    }
  }
  std::vector<const Graph*> ptrs;
  for (const Graph& g : before) ptrs.push_back(&g);
  b.states = encoder::make_batch(ptrs, normalize_omni);

  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto begin = b.states.node_ids.begin() + b.states.node_offsets[i];
    const auto end = b.states.node_ids.begin() + b.states.node_offsets[i + 1];
    const auto it = std::lower_bound(begin, end, actions[i]);
    require(it != end && *it == actions[i], "make_sac_batch: action is not an active node");
    rows.push_back(static_cast<std::uint32_t>(it - b.states.node_ids.begin()));
  }
  b.action_rows = diff::make_index(std::move(rows));

  if (!after.empty()) {
    ptrs.clear();
    for (const Graph& g : after) ptrs.push_back(&g);
    b.successors = encoder::make_batch(ptrs, normalize_omni);
  }
  return b;
}

std::vector<double> soft_state_values(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                      const Eigen::VectorXd& log_pi, std::span<const std::uint32_t> offsets,
                                      double alpha) {
  require(q1.size() == q2.size() && q1.size() == log_pi.size(), "soft_state_values: length mismatch");
  std::vector<double> out;
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    double v = 0.0;
    for (std::uint32_t r = offsets[g]; r < offsets[g + 1]; ++r)
      v += std::exp(log_pi(r)) * (std::min(q1(r), q2(r)) - alpha * log_pi(r));
    out.push_back(v);
  }
  return out;
}

std::vector<double> bellman_targets(const SacBatch& batch, std::span<const double> successor_values, double gamma) {
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch.rewards[i];
    if (!batch.terminal[i]) {
      const auto s = static_cast<std::size_t>(batch.successor[i]);
      require(s < successor_values.size(), "bellman_targets: missing successor value");
      y[i] += gamma * successor_values[s];
    }
  }
  return y;
}

template <class T>
std::vector<double> q_targets(const AgentNetworks<T>& nets, const SacBatch& batch, double alpha, double gamma) {
  std::vector<double> values;
  if (batch.successors.num_graphs > 0) {
    const auto& s = batch.successors;
    const Eigen::VectorXd q1 = nets.q1_target.apply(s).col(0).template cast<double>();
    const Eigen::VectorXd q2 = nets.q2_target.apply(s).col(0).template cast<double>();
    const Eigen::MatrixXd logits = nets.pi.apply(s).template cast<double>();
    const Eigen::VectorXd log_pi = segment_log_softmax_values<double>(logits, s.node_offsets).col(0);
    values = soft_state_values(q1, q2, log_pi, s.node_offsets, alpha);
  }
  return bellman_targets(batch, values, gamma);
}

template <class T>
Var<T> q_loss(diff::Tape<T>& tape, NodeScorer<T>& q, const SacBatch& batch, std::span<const double> targets) {
  require(targets.size() == batch.size(), "q_loss: one target per transition required");
  Matrix<T> y(static_cast<Eigen::Index>(targets.size()), 1);
  for (std::size_t i = 0; i < targets.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = static_cast<T>(targets[i]);
  Var<T> pred = gather_rows(q.forward(tape, batch.states), batch.action_rows);
  return mean(square(sub(pred, tape.constant(std::move(y)))));
}

template <class T>
PolicyLoss<T> policy_loss(diff::Tape<T>& tape, NodeScorer<T>& pi, const SacBatch& batch, const Matrix<T>& min_q,
                          double alpha) {
  const auto& s = batch.states;
  require(min_q.rows() == s.num_nodes && min_q.cols() == 1, "policy_loss: min_q must be num_nodes x 1");
  Var<T> log_pi = segment_log_softmax(pi.forward(tape, s), s.offsets);
  Var<T> p = exp(log_pi);
  Var<T> inner = sub(scale(log_pi, static_cast<T>(alpha)), tape.constant(min_q));
  PolicyLoss<T> out;
  out.loss = scale(sum(mul(p, inner)), T(1) / static_cast<T>(s.num_graphs));
  const Matrix<T>& lp = log_pi.value();
  for (std::uint32_t g = 0; g < s.num_graphs; ++g) {
    double h = 0.0;
    for (std::uint32_t r = s.node_offsets[g]; r < s.node_offsets[g + 1]; ++r) {
      const double l = static_cast<double>(lp(r, 0));
      h -= std::exp(l) * l;
    }
    out.entropy.push_back(std::max(0.0, h));
  }
  return out;
}

double alpha_gradient(std::span<const double> entropy, const encoder::GraphBatch& states, double target_scale) {
  require(entropy.size() == states.num_graphs, "alpha_gradient: one entropy per state required");
  double acc = 0.0;
  for (std::uint32_t g = 0; g < states.num_graphs; ++g)
    acc += entropy[g] - target_scale * std::log(static_cast<double>(states.graph_size(g)));
  return acc / static_cast<double>(states.num_graphs);
}

template std::vector<double> q_targets(const AgentNetworks<float>&, const SacBatch&, double, double);
template std::vector<double> q_targets(const AgentNetworks<double>&, const SacBatch&, double, double);
template Var<float> q_loss(diff::Tape<float>&, NodeScorer<float>&, const SacBatch&, std::span<const double>);
template Var<double> q_loss(diff::Tape<double>&, NodeScorer<double>&, const SacBatch&, std::span<const double>);
template PolicyLoss<float> policy_loss(diff::Tape<float>&, NodeScorer<float>&, const SacBatch&, const Matrix<float>&,
                                       double);
template PolicyLoss<double> policy_loss(diff::Tape<double>&, NodeScorer<double>&, const SacBatch&,
                                        const Matrix<double>&, double);

}  // namespace mind::agent
