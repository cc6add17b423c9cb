#pragma once

#include <vector>

#include "mind/encoder/encoder.hpp"

namespace mind::agent {

struct NetworkConfig {
  encoder::EncoderConfig encoder;
  std::vector<int> decoder_hidden{256, 256};
  /// Feed sign(z) log(1 + |z|) of the profile to the decoder instead of z.
  bool log_profile = true;

  int decoder_input() const { return 2 * encoder.profile_width(); }
};

/// Encoder followed by a decoder over [z_i || z_o], one scalar per node row.
/// Used for both Q heads (values) and the policy (logits).
template <class T>
class NodeScorer {
 public:
  NodeScorer() = default;
  NodeScorer(const std::string& name, const NetworkConfig& cfg, Rng& rng);

  /// num_nodes x 1.
  diff::Var<T> forward(diff::Tape<T>& tape, const encoder::GraphBatch& batch);
  diff::Matrix<T> apply(const encoder::GraphBatch& batch) const;

  encoder::Encoder<T>& encoder() { return enc_; }
  diff::Mlp<T>& decoder() { return dec_; }
  const encoder::Encoder<T>& encoder() const { return enc_; }
  const diff::Mlp<T>& decoder() const { return dec_; }

  std::vector<diff::Parameter<T>*> params();

 private:
  encoder::Encoder<T> enc_;
  diff::Mlp<T> dec_;
  bool log_profile_ = true;
};

/// Twin Q networks with target copies and the policy network.
template <class T>
struct AgentNetworks {
  AgentNetworks() = default;
  AgentNetworks(const NetworkConfig& cfg, std::uint64_t seed);

  NetworkConfig config;
  NodeScorer<T> q1, q2, pi;
  NodeScorer<T> q1_target, q2_target;

  /// Hard copy online Q -> target Q.
  void sync_targets();
  /// Every parameter in a fixed order; names are unique.
  std::vector<diff::Parameter<T>*> all_params();
};

/// Log-probabilities of per-node logits, normalized within each graph.
template <class T>
diff::Matrix<T> segment_log_softmax_values(const diff::Matrix<T>& logits, const std::vector<std::uint32_t>& offsets);

}  // namespace mind::agent
