#include "mind/encoder/reference.hpp"

#include <algorithm>
#include <cmath>

namespace mind::encoder {

namespace {

Eigen::MatrixXd random_matrix(int r, int c, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(r));
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform_real(rng, -bound, bound);
  return m;
}

}  // namespace

SoftmaxAttentionReference::SoftmaxAttentionReference(int layers, int heads, int features, Rng& rng)
    : layers_(layers), heads_(heads), features_(features) {
  require(layers > 0 && heads > 0 && features > 0, "SoftmaxAttentionReference: dimensions must be positive");
  for (int k = 0; k < layers; ++k) {
    std::vector<Head> hs;
    for (int h = 0; h < heads; ++h)
      hs.push_back({random_matrix(features, features, rng), random_matrix(features, features, rng),
                    random_matrix(features, features, rng), random_matrix(features, 1, rng).col(0)});
    params_.push_back(std::move(hs));
  }
}

Eigen::MatrixXd SoftmaxAttentionReference::apply(const Graph& g) const {
  std::vector<NodeId> ids;
  const Graph c = g.compacted(&ids);
  const auto n = static_cast<Eigen::Index>(c.num_nodes());
  require(n > 0, "SoftmaxAttentionReference: empty graph");
  const int F = features_, HF = width();
  Eigen::MatrixXd e = Eigen::MatrixXd::Ones(n, HF);
  Eigen::MatrixXd profile(n, static_cast<Eigen::Index>(layers_) * HF);
  std::vector<NodeId> nb;
  std::vector<double> score;
  for (int k = 0; k < layers_; ++k) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, HF);
    for (int h = 0; h < heads_; ++h) {
      const Head& p = params_[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
      const Eigen::MatrixXd eh = e.middleCols(h * F, F);
      const Eigen::MatrixXd msg = eh * p.w;
      const Eigen::MatrixXd left = eh * p.wl;
      const Eigen::MatrixXd right = eh * p.wr;
      for (Eigen::Index i = 0; i < n; ++i) {
        nb.assign(1, static_cast<NodeId>(i));
        c.for_each_active_neighbor(static_cast<NodeId>(i), [&](NodeId j) { nb.push_back(j); });
        score.resize(nb.size());
        for (std::size_t x = 0; x < nb.size(); ++x) {
          const Eigen::RowVectorXd z = left.row(i) + right.row(nb[x]);
          score[x] = z.unaryExpr([](double t) { return t > 0 ? t : 0.2 * t; }).dot(p.a.transpose());
        }
        const double mx = *std::max_element(score.begin(), score.end());
        double total = 0.0;
        for (double& s : score) total += (s = std::exp(s - mx));
        for (std::size_t x = 0; x < nb.size(); ++x) next.row(i).segment(h * F, F) += (score[x] / total) * msg.row(nb[x]);
      }
    }
    e = std::move(next);
    profile.middleCols(static_cast<Eigen::Index>(k) * HF, HF) = e;
  }
  return profile;
}

}  // namespace mind::encoder
