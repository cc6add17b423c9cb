#pragma once

#include <vector>

#include "mind/diff/tape.hpp"
#include "mind/random.hpp"

namespace mind::diff {

enum class OutputActivation { Identity, Sigmoid };

/// Fully connected stack with ReLU hidden layers. Weights are in x out so
/// that a batch of row vectors maps as X W + b.
template <class T>
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string name, std::vector<int> widths, OutputActivation out, Rng& rng);

  Var<T> forward(Tape<T>& tape, const Var<T>& x);
  /// Same function without a tape.
  Matrix<T> apply(const Matrix<T>& x) const;

  /// Continue from the pre-activation of the first layer (x W0 + b0). Lets
  /// callers compute the first affine map in a cheaper factored form.
  Var<T> forward_tail(Tape<T>& tape, Var<T> pre0);
  Matrix<T> apply_tail(Matrix<T> pre0) const;

  const std::vector<int>& widths() const { return widths_; }
  OutputActivation output_activation() const { return out_; }
  int in_dim() const { return widths_.front(); }
  int out_dim() const { return widths_.back(); }
  std::size_t num_layers() const { return weights_.size(); }

  Parameter<T>& weight(std::size_t l) { return weights_[l]; }
  Parameter<T>& bias(std::size_t l) { return biases_[l]; }
  const Parameter<T>& weight(std::size_t l) const { return weights_[l]; }
  const Parameter<T>& bias(std::size_t l) const { return biases_[l]; }

  void collect(std::vector<Parameter<T>*>& out);

 private:
  std::vector<int> widths_;
  OutputActivation out_ = OutputActivation::Identity;
  std::vector<Parameter<T>> weights_;
  std::vector<Parameter<T>> biases_;
};

/// Copy values between parameter lists of identical layout (possibly different precision).
template <class To, class From>
void copy_values(const std::vector<Parameter<To>*>& to, const std::vector<Parameter<From>*>& from) {
  require(to.size() == from.size(), "copy_values: parameter count mismatch");
  for (std::size_t i = 0; i < to.size(); ++i) {
    require(to[i]->value.rows() == from[i]->value.rows() && to[i]->value.cols() == from[i]->value.cols(),
            "copy_values: shape mismatch for " + to[i]->name);
    to[i]->value = from[i]->value.template cast<To>();
  }
}

/// Polyak averaging: target <- tau * source + (1 - tau) * target.
template <class T>
void soft_update(const std::vector<Parameter<T>*>& target, const std::vector<Parameter<T>*>& source, T tau) {
  require(target.size() == source.size(), "soft_update: parameter count mismatch");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i]->value = tau * source[i]->value + (T(1) - tau) * target[i]->value;
}

}  // namespace mind::diff
