#include "mind/agent/networks.hpp"

#include <algorithm>
#include <cmath>

namespace mind::agent {

using diff::Matrix;
using diff::Var;

namespace {

constexpr Eigen::Index kDecoderChunk = 8192;

std::vector<int> decoder_widths(const NetworkConfig& cfg) {
  std::vector<int> w{cfg.decoder_input()};
  w.insert(w.end(), cfg.decoder_hidden.begin(), cfg.decoder_hidden.end());
  w.push_back(1);
  return w;
}

}  // namespace

template <class T>
NodeScorer<T>::NodeScorer(const std::string& name, const NetworkConfig& cfg, Rng& rng)
    : enc_(name + "/enc", cfg.encoder, rng),
      dec_(name + "/dec", decoder_widths(cfg), diff::OutputActivation::Identity, rng),
      log_profile_(cfg.log_profile) {}

template <class T>
Var<T> NodeScorer<T>::forward(diff::Tape<T>& tape, const encoder::GraphBatch& b) {
  Var<T> profile = enc_.forward(tape, b);
  if (log_profile_) profile = symlog(profile);
  const Var<T> parts[] = {gather_rows(profile, b.node_rows), gather_rows(profile, b.omni_rows)};
  return dec_.forward(tape, concat_cols<T>(parts));
}

template <class T>
Matrix<T> NodeScorer<T>::apply(const encoder::GraphBatch& b) const {
  Matrix<T> profile = enc_.apply(b);
  if (log_profile_) profile = profile.unaryExpr([](T x) { return std::copysign(std::log1p(std::abs(x)), x); });
  const Eigen::Index n = b.num_nodes, w = profile.cols();
  const auto& omni = *b.omni_rows;
  Matrix<T> out(n, 1);
  Matrix<T> x;
  for (Eigen::Index begin = 0; begin < n; begin += kDecoderChunk) {
    const Eigen::Index len = std::min(kDecoderChunk, n - begin);
    x.resize(len, 2 * w);
    for (Eigen::Index r = 0; r < len; ++r) {
      x.row(r).head(w) = profile.row(begin + r);
      x.row(r).tail(w) = profile.row(omni[static_cast<std::size_t>(begin + r)]);
    }
    out.middleRows(begin, len) = dec_.apply(x);
  }
  return out;
}

template <class T>
std::vector<diff::Parameter<T>*> NodeScorer<T>::params() {
  std::vector<diff::Parameter<T>*> out;
  enc_.collect(out);
  dec_.collect(out);
  return out;
}

template <class T>
AgentNetworks<T>::AgentNetworks(const NetworkConfig& cfg, std::uint64_t seed) : config(cfg) {
  Rng r1(derive_seed(seed, 1)), r2(derive_seed(seed, 2)), r3(derive_seed(seed, 3));
  q1 = NodeScorer<T>("q1", cfg, r1);
  q2 = NodeScorer<T>("q2", cfg, r2);
  pi = NodeScorer<T>("pi", cfg, r3);
  Rng unused(0);
  q1_target = NodeScorer<T>("q1_target", cfg, unused);
  q2_target = NodeScorer<T>("q2_target", cfg, unused);
  sync_targets();
}

template <class T>
void AgentNetworks<T>::sync_targets() {
  diff::copy_values(q1_target.params(), q1.params());
  diff::copy_values(q2_target.params(), q2.params());
}

template <class T>
std::vector<diff::Parameter<T>*> AgentNetworks<T>::all_params() {
  std::vector<diff::Parameter<T>*> out;
  for (NodeScorer<T>* s : {&q1, &q2, &pi, &q1_target, &q2_target}) {
    auto p = s->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

template <class T>
Matrix<T> segment_log_softmax_values(const Matrix<T>& logits, const std::vector<std::uint32_t>& offsets) {
  require(logits.cols() == 1 && !offsets.empty() && offsets.back() == logits.rows(),
          "segment_log_softmax_values: bad shapes");
  Matrix<T> out(logits.rows(), 1);
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    const Eigen::Index b = offsets[g], n = offsets[g + 1] - offsets[g];
    if (n == 0) continue;
    const auto seg = logits.col(0).segment(b, n);
    const T mx = seg.maxCoeff();
    const T lse = mx + std::log((seg.array() - mx).exp().sum());
    out.col(0).segment(b, n) = seg.array() - lse;
  }
  return out;
}

template class NodeScorer<float>;
template class NodeScorer<double>;
template struct AgentNetworks<float>;
template struct AgentNetworks<double>;
template Matrix<float> segment_log_softmax_values(const Matrix<float>&, const std::vector<std::uint32_t>&);
template Matrix<double> segment_log_softmax_values(const Matrix<double>&, const std::vector<std::uint32_t>&);

}  // namespace mind::agent
