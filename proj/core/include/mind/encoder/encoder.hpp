#pragma once

#include <string>
#include <vector>

#include "mind/diff/mlp.hpp"
#include "mind/encoder/batch.hpp"

namespace mind::encoder {

struct EncoderConfig {
  int layers = 6;         // K
  int heads = 4;          // H
  int features = 4;       // F
  int attn_hidden = 32;   // hidden width A of the attention MLPs
  bool normalize_omni = true;

  int width() const { return heads * features; }
  int profile_width() const { return layers * width(); }
};

/// Parameters of one message-passing layer, with the H heads stored side by side.
///
/// ws, wn: (H*F) x F, block h is the head-h matrix acting on row vectors.
/// Self attention of head h is sigmoid(relu(s W0_h + b0_h) w1_h + b1_h) where
/// s is the concatenation of all heads after ws; W0_h is column block h of
/// `s0` ((H*F) x (H*A)), b0_h of `s0b` (1 x H*A), w1_h column h of `s1`
/// (A x H), b1_h entry h of `s1b` (1 x H). The neighbor attention `n*`
/// has the same layout and takes s_i + v_j as input.
template <class T>
struct EncoderLayer {
  diff::Parameter<T> ws, wn;
  diff::Parameter<T> s0, s0b, s1, s1b;
  diff::Parameter<T> n0, n0b, n1, n1b;
};

/// All-ones initialized multi-head encoder with sigmoid attention (no
/// normalization over neighbors) that returns the concatenation of every
/// layer's embedding: a rows x (K*H*F) profile matrix, omni rows included.
template <class T>
class Encoder {
 public:
  Encoder() = default;
  Encoder(std::string name, EncoderConfig cfg, Rng& rng);

  diff::Var<T> forward(diff::Tape<T>& tape, const GraphBatch& batch);
  /// Tape-free evaluation; edges are processed in chunks to bound memory.
  diff::Matrix<T> apply(const GraphBatch& batch) const;

  const EncoderConfig& config() const { return cfg_; }
  std::vector<EncoderLayer<T>>& layers() { return layers_; }
  const std::vector<EncoderLayer<T>>& layers() const { return layers_; }
  void collect(std::vector<diff::Parameter<T>*>& out);

 private:
  EncoderConfig cfg_;
  std::vector<EncoderLayer<T>> layers_;
};

/// Mean over feature columns of the across-row variance of `m`'s first `rows` rows.
double between_row_variance(const Eigen::MatrixXd& m, Eigen::Index rows);

}  // namespace mind::encoder
