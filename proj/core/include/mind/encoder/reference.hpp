#pragma once

#include <vector>

#include "mind/graph/graph.hpp"
#include "mind/random.hpp"
#include <Eigen/Core>

namespace mind::encoder {

/// GATv2-style comparator: per head, coefficients are softmax-normalized over
/// {i} and N(i) and every message uses the same weight matrix. Used to show
/// that normalized attention cannot separate nodes from a constant start.
class SoftmaxAttentionReference {
 public:
  SoftmaxAttentionReference(int layers, int heads, int features, Rng& rng);

  /// Profile over active nodes in ascending id order: n x (K*H*F).
  Eigen::MatrixXd apply(const Graph& g) const;

  int layers() const { return layers_; }
  int width() const { return heads_ * features_; }

 private:
  struct Head {
    Eigen::MatrixXd w, wl, wr;
    Eigen::VectorXd a;
  };
  int layers_, heads_, features_;
  std::vector<std::vector<Head>> params_;  // [layer][head]
};

}  // namespace mind::encoder
