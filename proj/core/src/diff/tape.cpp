#include "mind/diff/tape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace mind::diff {

namespace {

std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

/// dst.row(idx[r]) += src.row(r)
template <class T>
void add_rows_indexed(Matrix<T>& dst, const std::vector<std::uint32_t>& idx, const Matrix<T>& src) {
  const Eigen::Index c = src.cols();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    T* pd = dst.data() + idx[r] * c;
    const T* ps = src.data() + static_cast<Eigen::Index>(r) * c;
    for (Eigen::Index j = 0; j < c; ++j) pd[j] += ps[j];
  }
}

template <class T>
Tape<T>& same_tape(const Var<T>& a, const Var<T>& b) {
  require(a.tape() && a.tape() == b.tape(), "tape op: operands live on different tapes");
  return *a.tape();
}

}  // namespace

template <class T>
Tape<T>::Tape(bool grad_enabled) : generation_(next_generation()), grad_enabled_(grad_enabled) {}

template <class T>
void Tape<T>::check(const Var<T>& v) const {
  if (v.tape_ != this || v.gen_ != generation_ || v.id_ >= nodes_.size())
    throw ContractError("Var used after its tape was cleared (backward already ran?)");
}

template <class T>
Var<T> Tape<T>::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var<T>(this, static_cast<std::uint32_t>(nodes_.size() - 1), generation_);
}

template <class T>
Var<T> Tape<T>::constant(Matrix<T> v) {
  Node n;
  n.value = std::move(v);
  return push(std::move(n));
}

template <class T>
Var<T> Tape<T>::param(Parameter<T>& p) {
  Node n;
  n.external = &p.value;
  if (grad_enabled_) {
    n.param = &p;
    n.requires_grad = true;
  }
  return push(std::move(n));
}

template <class T>
Var<T> Tape<T>::frozen(const Parameter<T>& p) {
  Node n;
  n.external = &p.value;
  return push(std::move(n));
}

template <class T>
Matrix<T>& Tape<T>::grad(std::uint32_t id) {
  Node& n = nodes_[id];
  if (!n.grad_ready) {
    const Matrix<T>& v = value(id);
    n.grad.setZero(v.rows(), v.cols());
    n.grad_ready = true;
  }
  return n.grad;
}

template <class T>
Var<T> Tape<T>::record(Matrix<T> value, std::span<const Var<T>> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (const Var<T>& in : inputs) {
    check(in);
    n.requires_grad = n.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

template <class T>
Var<T> Tape<T>::record(Matrix<T> value, std::initializer_list<Var<T>> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var<T>>(inputs.begin(), inputs.size()), std::move(fn));
}

template <class T>
void Tape<T>::backward(const Var<T>& loss) {
  check(loss);
  const Matrix<T>& lv = value(loss.id());
  require(lv.rows() == 1 && lv.cols() == 1, "backward: loss must be a scalar");
  if (nodes_[loss.id()].requires_grad) {
    grad(loss.id())(0, 0) = T(1);
    for (std::uint32_t id = loss.id() + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (!n.requires_grad || !n.grad_ready) continue;
      if (n.backward) n.backward(*this, id);
      if (n.param) {
        if (n.param->grad.rows() != n.grad.rows() || n.param->grad.cols() != n.grad.cols())
          n.param->grad.setZero(n.grad.rows(), n.grad.cols());
        n.param->grad += n.grad;
      }
    }
  }
  clear();
}

template <class T>
void Tape<T>::clear() {
  nodes_.clear();
  generation_ = next_generation();
}

template <class T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <class T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  Tape<T>& t = same_tape(a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  require(A.cols() == B.rows(), "matmul: inner dimensions differ");
  Matrix<T> C(A.rows(), B.cols());
  C.noalias() = A * B;
  const auto ia = a.id(), ib = b.id();
  return t.record(std::move(C), {a, b}, [ia, ib](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& dC = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia).noalias() += dC * t.value(ib).transpose();
    if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * dC;
  });
}

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  Tape<T>& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  const auto ia = a.id(), ib = b.id();
  return t.record(a.value() + b.value(), {a, b}, [ia, ib](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += d;
    if (t.requires_grad(ib)) t.grad(ib) += d;
  });
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  Tape<T>& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  const auto ia = a.id(), ib = b.id();
  return t.record(a.value() - b.value(), {a, b}, [ia, ib](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += d;
    if (t.requires_grad(ib)) t.grad(ib) -= d;
  });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  Tape<T>& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul: shape mismatch");
  const auto ia = a.id(), ib = b.id();
  return t.record(a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += d.cwiseProduct(t.value(ib));
    if (t.requires_grad(ib)) t.grad(ib) += d.cwiseProduct(t.value(ia));
  });
}

template <class T>
Var<T> add_row(const Var<T>& a, const Var<T>& row) {
  Tape<T>& t = same_tape(a, row);
  require(row.rows() == 1 && row.cols() == a.cols(), "add_row: bias must be 1 x cols");
  Matrix<T> out = a.value();
  out.rowwise() += row.value().row(0);
  const auto ia = a.id(), ib = row.id();
  return t.record(std::move(out), {a, row}, [ia, ib](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += d;
    if (t.requires_grad(ib)) t.grad(ib) += d.colwise().sum();
  });
}

template <class T>
Var<T> scale(const Var<T>& a, T c) {
  Tape<T>& t = *a.tape();
  const auto ia = a.id();
  return t.record(a.value() * c, {a}, [ia, c](Tape<T>& t, std::uint32_t self) {
    t.grad(ia) += t.grad(self) * c;
  });
}

template <class T>
Var<T> relu(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  const auto ia = a.id();
  return t.record(a.value().cwiseMax(T(0)), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& y = t.value(self);
    t.grad(ia) += (y.array() > T(0)).select(t.grad(self), T(0));
  });
}

template <class T>
Var<T> sigmoid(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  Matrix<T> y = a.value().unaryExpr([](T x) { return sigmoid_scalar(x); });
  const auto ia = a.id();
  return t.record(std::move(y), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    const auto& y = t.value(self).array();
    t.grad(ia).array() += t.grad(self).array() * y * (T(1) - y);
  });
}

template <class T>
Var<T> exp(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  const auto ia = a.id();
  return t.record(a.value().array().exp().matrix(), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    t.grad(ia) += t.grad(self).cwiseProduct(t.value(self));
  });
}

template <class T>
Var<T> symlog(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  Matrix<T> y = a.value().unaryExpr([](T x) { return std::copysign(std::log1p(std::abs(x)), x); });
  const auto ia = a.id();
  return t.record(std::move(y), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    t.grad(ia).array() += t.grad(self).array() / (T(1) + t.value(ia).array().abs());
  });
}

template <class T>
Var<T> square(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  const auto ia = a.id();
  return t.record(a.value().array().square().matrix(), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    t.grad(ia) += T(2) * t.grad(self).cwiseProduct(t.value(ia));
  });
}

template <class T>
Var<T> concat_cols(std::span<const Var<T>> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  Tape<T>& t = *parts[0].tape();
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    require(p.tape() == &t, "concat_cols: operands live on different tapes");
    require(p.rows() == rows, "concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix<T> out(rows, cols);
  std::vector<std::pair<std::uint32_t, Eigen::Index>> layout;
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    layout.emplace_back(p.id(), c);
    c += p.cols();
  }
  return t.record(std::move(out), parts, [layout = std::move(layout)](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    for (const auto& [id, start] : layout)
      if (t.requires_grad(id)) t.grad(id) += d.middleCols(start, t.value(id).cols());
  });
}

template <class T>
Var<T> slice_cols(const Var<T>& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols: range out of bounds");
  Tape<T>& t = *a.tape();
  const auto ia = a.id();
  return t.record(a.value().middleCols(start, count), {a}, [ia, start, count](Tape<T>& t, std::uint32_t self) {
    t.grad(ia).middleCols(start, count) += t.grad(self);
  });
}

template <class T>
Var<T> gather_rows(const Var<T>& a, const IndexList& idx) {
  Tape<T>& t = *a.tape();
  const Matrix<T>& A = a.value();
  const auto& ix = *idx;
  const Eigen::Index c = A.cols();
  Matrix<T> out(static_cast<Eigen::Index>(ix.size()), c);
  for (std::size_t r = 0; r < ix.size(); ++r) {
    require(ix[r] < A.rows(), "gather_rows: index out of range");
    std::copy_n(A.data() + ix[r] * c, c, out.data() + static_cast<Eigen::Index>(r) * c);
  }
  const auto ia = a.id();
  return t.record(std::move(out), {a}, [ia, idx](Tape<T>& t, std::uint32_t self) {
    add_rows_indexed(t.grad(ia), *idx, t.grad(self));
  });
}

template <class T>
Var<T> gather_add_rows(const Var<T>& a, const IndexList& ia_idx, const Var<T>& b, const IndexList& ib_idx) {
  Tape<T>& t = same_tape(a, b);
  const Matrix<T>& A = a.value();
  const Matrix<T>& B = b.value();
  const auto& ia = *ia_idx;
  const auto& ib = *ib_idx;
  require(A.cols() == B.cols() && ia.size() == ib.size(), "gather_add_rows: shape mismatch");
  const Eigen::Index c = A.cols();
  Matrix<T> out(static_cast<Eigen::Index>(ia.size()), c);
  for (std::size_t r = 0; r < ia.size(); ++r) {
    require(ia[r] < A.rows() && ib[r] < B.rows(), "gather_add_rows: index out of range");
    const T* pa = A.data() + ia[r] * c;
    const T* pb = B.data() + ib[r] * c;
    T* po = out.data() + static_cast<Eigen::Index>(r) * c;
    for (Eigen::Index j = 0; j < c; ++j) po[j] = pa[j] + pb[j];
  }
  const auto ida = a.id(), idb = b.id();
  return t.record(std::move(out), {a, b}, [ida, idb, ia_idx, ib_idx](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ida)) add_rows_indexed(t.grad(ida), *ia_idx, d);
    if (t.requires_grad(idb)) add_rows_indexed(t.grad(idb), *ib_idx, d);
  });
}

template <class T>
Var<T> scatter_add_rows(const Var<T>& a, const IndexList& idx, Eigen::Index rows) {
  Tape<T>& t = *a.tape();
  const Matrix<T>& A = a.value();
  const auto& ix = *idx;
  require(static_cast<Eigen::Index>(ix.size()) == A.rows(), "scatter_add_rows: one index per row required");
  for (auto r : ix) require(r < rows, "scatter_add_rows: index out of range");
  Matrix<T> out = Matrix<T>::Zero(rows, A.cols());
  add_rows_indexed(out, ix, A);
  const auto ia = a.id();
  return t.record(std::move(out), {a}, [ia, idx](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    Matrix<T>& g = t.grad(ia);
    const auto& ix = *idx;
    const Eigen::Index c = d.cols();
    for (std::size_t r = 0; r < ix.size(); ++r) {
      const T* pd = d.data() + ix[r] * c;
      T* pg = g.data() + static_cast<Eigen::Index>(r) * c;
      for (Eigen::Index j = 0; j < c; ++j) pg[j] += pd[j];
    }
  });
}

template <class T>
Var<T> block_matmul(const Var<T>& x, const Var<T>& w, int blocks) {
  Tape<T>& t = same_tape(x, w);
  const Matrix<T>& X = x.value();
  const Matrix<T>& W = w.value();
  require(blocks > 0 && X.cols() % blocks == 0 && W.rows() == X.cols(), "block_matmul: shape mismatch");
  const Eigen::Index F = X.cols() / blocks, D = W.cols();
  Matrix<T> out(X.rows(), blocks * D);
  for (int h = 0; h < blocks; ++h) out.middleCols(h * D, D).noalias() = X.middleCols(h * F, F) * W.middleRows(h * F, F);
  const auto ix = x.id(), iw = w.id();
  return t.record(std::move(out), {x, w}, [ix, iw, blocks, F, D](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    for (int h = 0; h < blocks; ++h) {
      if (t.requires_grad(ix))
        t.grad(ix).middleCols(h * F, F).noalias() += d.middleCols(h * D, D) * t.value(iw).middleRows(h * F, F).transpose();
      if (t.requires_grad(iw))
        t.grad(iw).middleRows(h * F, F).noalias() += t.value(ix).middleCols(h * F, F).transpose() * d.middleCols(h * D, D);
    }
  });
}

template <class T>
Var<T> block_dot(const Var<T>& x, const Var<T>& w) {
  Tape<T>& t = same_tape(x, w);
  const Matrix<T>& X = x.value();
  const Matrix<T>& W = w.value();
  const Eigen::Index H = W.cols(), D = W.rows();
  require(X.cols() == H * D, "block_dot: shape mismatch");
  Matrix<T> out(X.rows(), H);
  for (Eigen::Index h = 0; h < H; ++h) out.col(h).noalias() = X.middleCols(h * D, D) * W.col(h);
  const auto ix = x.id(), iw = w.id();
  return t.record(std::move(out), {x, w}, [ix, iw, H, D](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    for (Eigen::Index h = 0; h < H; ++h) {
      if (t.requires_grad(ix)) t.grad(ix).middleCols(h * D, D).noalias() += d.col(h) * t.value(iw).col(h).transpose();
      if (t.requires_grad(iw)) t.grad(iw).col(h).noalias() += t.value(ix).middleCols(h * D, D).transpose() * d.col(h);
    }
  });
}

template <class T>
Var<T> scale_blocks(const Var<T>& x, const Var<T>& s) {
  Tape<T>& t = same_tape(x, s);
  const Matrix<T>& X = x.value();
  const Matrix<T>& S = s.value();
  const Eigen::Index H = S.cols();
  require(S.rows() == X.rows() && H > 0 && X.cols() % H == 0, "scale_blocks: shape mismatch");
  const Eigen::Index F = X.cols() / H;
  Matrix<T> out(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r)
    for (Eigen::Index h = 0; h < H; ++h)
      for (Eigen::Index f = 0; f < F; ++f) out(r, h * F + f) = X(r, h * F + f) * S(r, h);
  const auto ix = x.id(), is = s.id();
  return t.record(std::move(out), {x, s}, [ix, is, H, F](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    const Matrix<T>& X = t.value(ix);
    const Matrix<T>& S = t.value(is);
    const bool gx = t.requires_grad(ix), gs = t.requires_grad(is);
    Matrix<T>* GX = gx ? &t.grad(ix) : nullptr;
    Matrix<T>* GS = gs ? &t.grad(is) : nullptr;
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      for (Eigen::Index h = 0; h < H; ++h) {
        T acc = 0;
        for (Eigen::Index f = 0; f < F; ++f) {
          const Eigen::Index c = h * F + f;
          if (gx) (*GX)(r, c) += d(r, c) * S(r, h);
          acc += d(r, c) * X(r, c);
        }
        if (gs) (*GS)(r, h) += acc;
      }
    }
  });
}

template <class T>
Var<T> scale_rows(const Var<T>& a, const Var<T>& s) {
  Tape<T>& t = same_tape(a, s);
  require(s.cols() == 1 && s.rows() == a.rows(), "scale_rows: scale must be rows x 1");
  Matrix<T> out = s.value().col(0).asDiagonal() * a.value();
  const auto ia = a.id(), is = s.id();
  return t.record(std::move(out), {a, s}, [ia, is](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += t.value(is).col(0).asDiagonal() * d;
    if (t.requires_grad(is)) t.grad(is).col(0) += d.cwiseProduct(t.value(ia)).rowwise().sum();
  });
}

template <class T>
Var<T> segment_log_softmax(const Var<T>& a, const IndexList& offsets) {
  Tape<T>& t = *a.tape();
  const Matrix<T>& x = a.value();
  require(x.cols() == 1, "segment_log_softmax: input must be a column");
  const auto& off = *offsets;
  require(!off.empty() && off.front() == 0 && off.back() == x.rows(), "segment_log_softmax: bad offsets");
  Matrix<T> y(x.rows(), 1);
  for (std::size_t g = 0; g + 1 < off.size(); ++g) {
    const Eigen::Index b = off[g], n = off[g + 1] - off[g];
    if (n == 0) continue;
    const T mx = x.col(0).segment(b, n).maxCoeff();
    const T lse = mx + std::log((x.col(0).segment(b, n).array() - mx).exp().sum());
    y.col(0).segment(b, n) = x.col(0).segment(b, n).array() - lse;
  }
  const auto ia = a.id();
  return t.record(std::move(y), {a}, [ia, offsets](Tape<T>& t, std::uint32_t self) {
    const Matrix<T>& d = t.grad(self);
    const Matrix<T>& y = t.value(self);
    Matrix<T>& g = t.grad(ia);
    const auto& off = *offsets;
    for (std::size_t s = 0; s + 1 < off.size(); ++s) {
      const Eigen::Index b = off[s], n = off[s + 1] - off[s];
      if (n == 0) continue;
      const T total = d.col(0).segment(b, n).sum();
      g.col(0).segment(b, n).array() += d.col(0).segment(b, n).array() - y.col(0).segment(b, n).array().exp() * total;
    }
  });
}

template <class T>
Var<T> log_softmax(const Var<T>& a) {
  return segment_log_softmax(a, make_index({0u, static_cast<std::uint32_t>(a.rows())}));
}

template <class T>
Var<T> sum(const Var<T>& a) {
  Tape<T>& t = *a.tape();
  Matrix<T> out(1, 1);
  out(0, 0) = a.value().sum();
  const auto ia = a.id();
  return t.record(std::move(out), {a}, [ia](Tape<T>& t, std::uint32_t self) {
    t.grad(ia).array() += t.grad(self)(0, 0);
  });
}

template <class T>
Var<T> mean(const Var<T>& a) {
  const auto n = a.rows() * a.cols();
  require(n > 0, "mean: empty input");
  return scale(sum(a), T(1) / static_cast<T>(n));
}

#define MIND_INSTANTIATE(T)                                                                   \
  template class Tape<T>;                                                                     \
  template T sigmoid_scalar<T>(T);                                                            \
  template Var<T> matmul<T>(const Var<T>&, const Var<T>&);                                    \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                       \
  template Var<T> sub<T>(const Var<T>&, const Var<T>&);                                       \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                       \
  template Var<T> add_row<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> scale<T>(const Var<T>&, T);                                                 \
  template Var<T> relu<T>(const Var<T>&);                                                     \
  template Var<T> sigmoid<T>(const Var<T>&);                                                  \
  template Var<T> symlog<T>(const Var<T>&);                                                   \
  template Var<T> exp<T>(const Var<T>&);                                                      \
  template Var<T> square<T>(const Var<T>&);                                                   \
  template Var<T> concat_cols<T>(std::span<const Var<T>>);                                    \
  template Var<T> slice_cols<T>(const Var<T>&, Eigen::Index, Eigen::Index);                   \
  template Var<T> gather_rows<T>(const Var<T>&, const IndexList&);                            \
  template Var<T> scatter_add_rows<T>(const Var<T>&, const IndexList&, Eigen::Index);         \
  template Var<T> gather_add_rows<T>(const Var<T>&, const IndexList&, const Var<T>&, const IndexList&); \
  template Var<T> block_matmul<T>(const Var<T>&, const Var<T>&, int);                         \
  template Var<T> block_dot<T>(const Var<T>&, const Var<T>&);                                 \
  template Var<T> scale_blocks<T>(const Var<T>&, const Var<T>&);                              \
  template Var<T> scale_rows<T>(const Var<T>&, const Var<T>&);                                \
  template Var<T> segment_log_softmax<T>(const Var<T>&, const IndexList&);                    \
  template Var<T> log_softmax<T>(const Var<T>&);                                              \
  template Var<T> sum<T>(const Var<T>&);                                                      \
  template Var<T> mean<T>(const Var<T>&);

MIND_INSTANTIATE(float)
MIND_INSTANTIATE(double)

#undef MIND_INSTANTIATE

}  // namespace mind::diff
