#include "mind/diff/mlp.hpp"

#include <cmath>

namespace mind::diff {

template <class T>
Mlp<T>::Mlp(std::string name, std::vector<int> widths, OutputActivation out, Rng& rng)
    : widths_(std::move(widths)), out_(out) {
  require(widths_.size() >= 2, "Mlp: need at least input and output widths");
  for (int w : widths_) require(w > 0, "Mlp: widths must be positive");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int fan_in = widths_[l], fan_out = widths_[l + 1];
    // Kaiming-uniform weights and biases, as in torch.nn.Linear.
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Parameter<T> w{name + "/w" + std::to_string(l), Matrix<T>(fan_in, fan_out), {}};
    Parameter<T> b{name + "/b" + std::to_string(l), Matrix<T>(1, fan_out), {}};
    for (Eigen::Index i = 0; i < w.value.size(); ++i)
      w.value.data()[i] = static_cast<T>(uniform_real(rng, -bound, bound));
    for (Eigen::Index i = 0; i < b.value.size(); ++i)
      b.value.data()[i] = static_cast<T>(uniform_real(rng, -bound, bound));
    w.zero_grad();
    b.zero_grad();
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

template <class T>
Var<T> Mlp<T>::forward(Tape<T>& tape, const Var<T>& x) {
  require(x.cols() == in_dim(), "Mlp::forward: input width mismatch");
  return forward_tail(tape, add_row(matmul(x, tape.param(weights_[0])), tape.param(biases_[0])));
}

template <class T>
Var<T> Mlp<T>::forward_tail(Tape<T>& tape, Var<T> h) {
  for (std::size_t l = 1; l < weights_.size(); ++l)
    h = add_row(matmul(relu(h), tape.param(weights_[l])), tape.param(biases_[l]));
  if (out_ == OutputActivation::Sigmoid) h = sigmoid(h);
  return h;
}

template <class T>
Matrix<T> Mlp<T>::apply(const Matrix<T>& x) const {
  require(x.cols() == in_dim(), "Mlp::apply: input width mismatch");
  Matrix<T> pre(x.rows(), weights_[0].value.cols());
  pre.noalias() = x * weights_[0].value;
  pre.rowwise() += biases_[0].value.row(0);
  return apply_tail(std::move(pre));
}

template <class T>
Matrix<T> Mlp<T>::apply_tail(Matrix<T> h) const {
  for (std::size_t l = 1; l < weights_.size(); ++l) {
    Matrix<T> next(h.rows(), weights_[l].value.cols());
    next.noalias() = h.cwiseMax(T(0)) * weights_[l].value;
    next.rowwise() += biases_[l].value.row(0);
    h = std::move(next);
  }
  if (out_ == OutputActivation::Sigmoid) h = h.unaryExpr([](T v) { return sigmoid_scalar(v); });
  return h;
}

template <class T>
void Mlp<T>::collect(std::vector<Parameter<T>*>& out) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
}

template class Mlp<float>;
template class Mlp<double>;

}  // namespace mind::diff
