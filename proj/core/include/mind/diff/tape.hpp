#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mind/common.hpp"

namespace mind::diff {

/// Dense row-major matrix. Vectors are 1xN rows; embeddings are stored one
/// node per row and multiplied from the right (x W).
template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using IndexList = std::shared_ptr<const std::vector<std::uint32_t>>;

inline IndexList make_index(std::vector<std::uint32_t> v) {
  return std::make_shared<const std::vector<std::uint32_t>>(std::move(v));
}

/// A named learnable tensor and its accumulated gradient.
template <class T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

template <class T>
class Tape;

/// Handle to a value recorded on a tape. Invalid once the tape is cleared.
template <class T>
class Var {
 public:
  Var() = default;
  const Matrix<T>& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Tape<T>* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }

 private:
  friend class Tape<T>;
  Var(Tape<T>* t, std::uint32_t id, std::uint64_t gen) : tape_(t), id_(id), gen_(gen) {}
  Tape<T>* tape_ = nullptr;
  std::uint32_t id_ = 0;
  std::uint64_t gen_ = 0;
};

/// Dynamic reverse-mode tape. Rebuilt on every forward pass; `backward`
/// accumulates into Parameter::grad and then clears the tape.
template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::uint32_t)>;

  explicit Tape(bool grad_enabled = true);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  Var<T> constant(Matrix<T> v);
  /// Leaf bound to a parameter; gradient flows into p.grad when grad is enabled.
  Var<T> param(Parameter<T>& p);
  /// Leaf bound to a parameter that never receives gradient.
  Var<T> frozen(const Parameter<T>& p);

  void backward(const Var<T>& loss);
  void clear();
  std::size_t size() const { return nodes_.size(); }

  // Op-author interface.
  void check(const Var<T>& v) const;
  const Matrix<T>& value(std::uint32_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  /// Gradient buffer of node `id`, zero-initialized on first access.
  Matrix<T>& grad(std::uint32_t id);
  Var<T> record(Matrix<T> value, std::initializer_list<Var<T>> inputs, BackwardFn fn);
  Var<T> record(Matrix<T> value, std::span<const Var<T>> inputs, BackwardFn fn);

 private:
  struct Node {
    Matrix<T> value;
    const Matrix<T>* external = nullptr;
    Parameter<T>* param = nullptr;
    Matrix<T> grad;
    bool grad_ready = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var<T> push(Node node);

  std::vector<Node> nodes_;
  std::uint64_t generation_;
  bool grad_enabled_;
};

template <class T>
const Matrix<T>& Var<T>::value() const {
  if (!tape_) throw ContractError("Var: empty handle");
  tape_->check(*this);
  return tape_->value(id_);
}

// Differentiable operations. All inputs must live on the same tape.

template <class T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> mul(const Var<T>& a, const Var<T>& b);
/// a (n x c) plus a 1 x c row broadcast over rows.
template <class T> Var<T> add_row(const Var<T>& a, const Var<T>& row);
template <class T> Var<T> scale(const Var<T>& a, T c);
template <class T> Var<T> relu(const Var<T>& a);
template <class T> Var<T> sigmoid(const Var<T>& a);
template <class T> Var<T> exp(const Var<T>& a);
template <class T> Var<T> square(const Var<T>& a);
/// sign(x) log(1 + |x|), elementwise.
template <class T> Var<T> symlog(const Var<T>& a);
template <class T> Var<T> concat_cols(std::span<const Var<T>> parts);
template <class T> Var<T> slice_cols(const Var<T>& a, Eigen::Index start, Eigen::Index count);
/// out.row(r) = a.row(idx[r]).
template <class T> Var<T> gather_rows(const Var<T>& a, const IndexList& idx);
/// out.row(idx[r]) += a.row(r); out has `rows` rows.
template <class T> Var<T> scatter_add_rows(const Var<T>& a, const IndexList& idx, Eigen::Index rows);
/// out.row(r) = a.row(ia[r]) + b.row(ib[r]).
template <class T> Var<T> gather_add_rows(const Var<T>& a, const IndexList& ia, const Var<T>& b, const IndexList& ib);
/// Block-diagonal product: x is n x (H*F), w stacks H blocks of F x D
/// vertically ((H*F) x D); block h of the n x (H*D) output is x_h w_h.
template <class T> Var<T> block_matmul(const Var<T>& x, const Var<T>& w, int blocks);
/// Per-block dot: x is n x (H*D), w is D x H; out(r, h) = x_h.row(r) . w.col(h).
template <class T> Var<T> block_dot(const Var<T>& x, const Var<T>& w);
/// x is n x (H*F), s is n x H; block h of row r is scaled by s(r, h).
template <class T> Var<T> scale_blocks(const Var<T>& x, const Var<T>& s);
/// Each row of a (n x c) multiplied by the matching entry of s (n x 1).
template <class T> Var<T> scale_rows(const Var<T>& a, const Var<T>& s);
/// Log-softmax of an n x 1 column within segments [offsets[g], offsets[g+1]).
template <class T> Var<T> segment_log_softmax(const Var<T>& a, const IndexList& offsets);
template <class T> Var<T> log_softmax(const Var<T>& a);
template <class T> Var<T> sum(const Var<T>& a);
template <class T> Var<T> mean(const Var<T>& a);

/// Numerically stable elementwise logistic function.
template <class T> T sigmoid_scalar(T x);

}  // namespace mind::diff
