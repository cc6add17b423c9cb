#pragma once

#include <vector>

#include <Eigen/Core>

#include "mind/graph/graph.hpp"

namespace mind::encoder {

/// Dense normalized Laplacian I - D^{-1/2} A D^{-1/2} over active nodes (ascending ids).
Eigen::MatrixXd normalized_laplacian(const Graph& g);

/// T = (I + D^{-1/2} A D^{-1/2}) / 2, the message-passing operator whose powers drive the estimate.
Eigen::MatrixXd propagation_operator(const Graph& g);

struct FiedlerEstimate {
  std::vector<NodeId> nodes;  // active ids, ascending; rows of `vector`
  Eigen::VectorXd vector;     // residual after removing the D^{1/2} 1 component
  double residual_ratio = 0;  // |residual| / |T^k 1|
  bool degenerate = false;    // residual at round-off level: no usable Fiedler component
  bool bipartite = false;     // eigenvalue 0 of T present; convergence not guaranteed
};

/// Power iteration of T from the all-ones vector for `iters` steps, then
/// projection away from the principal eigenvector D^{1/2} 1.
/// Requires a connected graph with at least two active nodes.
FiedlerEstimate fiedler_estimate(const Graph& g, int iters);

/// Eigenvector of the second-smallest eigenvalue of the normalized Laplacian
/// (dense eigensolver; at most 256 active nodes).
Eigen::VectorXd fiedler_vector(const Graph& g);

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace mind::encoder
