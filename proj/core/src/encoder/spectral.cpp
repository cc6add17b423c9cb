#include "mind/encoder/spectral.hpp"

#include <cmath>

#include "mind/diff/eigh.hpp"

namespace mind::encoder {

namespace {

constexpr double kDegenerateRatio = 1e-10;

bool is_bipartite(const Graph& g) {
  std::vector<int> side(g.num_nodes(), -1);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (!g.is_active(s) || side[s] >= 0) continue;
    side[s] = 0;
    stack.assign(1, s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      bool ok = true;
      g.for_each_active_neighbor(v, [&](NodeId u) {
        if (side[u] < 0) {
          side[u] = 1 - side[v];
          stack.push_back(u);
        } else if (side[u] == side[v]) {
          ok = false;
        }
      });
      if (!ok) return false;
    }
  }
  return true;
}

}  // namespace

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
  const Graph c = g.compacted();
  const auto n = static_cast<Eigen::Index>(c.num_nodes());
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (NodeId v = 0; v < c.num_nodes(); ++v) {
    c.for_each_active_neighbor(v, [&](NodeId u) {
      l(v, u) = -1.0 / std::sqrt(static_cast<double>(c.degree(v)) * static_cast<double>(c.degree(u)));
    });
  }
  return l;
}

Eigen::MatrixXd propagation_operator(const Graph& g) {
  const Eigen::MatrixXd l = normalized_laplacian(g);
  return Eigen::MatrixXd::Identity(l.rows(), l.cols()) - 0.5 * l;
}

FiedlerEstimate fiedler_estimate(const Graph& g, int iters) {
  require(g.num_active() >= 2, "fiedler_estimate: need at least two active nodes");
  require(iters >= 0, "fiedler_estimate: iteration count must be non-negative");
  FiedlerEstimate out;
  const Graph c = g.compacted(&out.nodes);
  require(is_connected(c), "fiedler_estimate: graph must be connected");
  out.bipartite = is_bipartite(c);

  const auto n = static_cast<Eigen::Index>(c.num_nodes());
  Eigen::VectorXd inv_sqrt_deg(n), sqrt_deg(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    sqrt_deg(v) = std::sqrt(static_cast<double>(c.degree(static_cast<NodeId>(v))));
    inv_sqrt_deg(v) = 1.0 / sqrt_deg(v);
  }
  Eigen::VectorXd e = Eigen::VectorXd::Ones(n), next(n);
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd scaled = e.cwiseProduct(inv_sqrt_deg);
    for (Eigen::Index v = 0; v < n; ++v) {
      double acc = 0.0;
      c.for_each_active_neighbor(static_cast<NodeId>(v), [&](NodeId u) { acc += scaled(u); });
      next(v) = 0.5 * (e(v) + inv_sqrt_deg(v) * acc);
    }
    // Rescaling keeps the direction and avoids underflow on long runs.
    e = next / next.norm();
  }
  const Eigen::VectorXd u1 = sqrt_deg.normalized();
  out.vector = e - u1.dot(e) * u1;
  out.residual_ratio = out.vector.norm() / e.norm();
  out.degenerate = out.residual_ratio < kDegenerateRatio;
  return out;
}

Eigen::VectorXd fiedler_vector(const Graph& g) {
  require(g.num_active() >= 2, "fiedler_vector: need at least two active nodes");
  const auto r = diff::symmetric_eigh(normalized_laplacian(g));
  return r.vectors.col(1);
}

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require(a.size() == b.size(), "abs_cosine: length mismatch");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace mind::encoder
