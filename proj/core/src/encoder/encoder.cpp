#include "mind/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace mind::encoder {

using diff::Matrix;
using diff::Var;

namespace {

constexpr std::size_t kEdgeChunk = 1 << 13;

template <class T>
diff::Parameter<T> uniform_param(const std::string& name, int rows, int cols, double bound, Rng& rng) {
  diff::Parameter<T> p{name, Matrix<T>(rows, cols), {}};
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<T>(uniform_real(rng, -bound, bound));
  p.zero_grad();
  return p;
}

template <class T>
Matrix<T> edge_weight_column(const GraphBatch& b) {
  Matrix<T> w(static_cast<Eigen::Index>(b.edge_weight.size()), 1);
  for (std::size_t e = 0; e < b.edge_weight.size(); ++e) w(static_cast<Eigen::Index>(e), 0) = static_cast<T>(b.edge_weight[e]);
  return w;
}

/// sigmoid(relu(pre) w1 + b1) per head block; rows x H.
template <class T>
Var<T> attention_tail(diff::Tape<T>& tape, const Var<T>& pre, diff::Parameter<T>& w1, diff::Parameter<T>& b1) {
  return sigmoid(add_row(block_dot(relu(pre), tape.param(w1)), tape.param(b1)));
}

template <class T>
Matrix<T> attention_tail(const Matrix<T>& pre, const Matrix<T>& w1, const Matrix<T>& b1) {
  const Eigen::Index H = w1.cols(), A = w1.rows();
  Matrix<T> out(pre.rows(), H);
  for (Eigen::Index h = 0; h < H; ++h) out.col(h).noalias() = pre.middleCols(h * A, A).cwiseMax(T(0)) * w1.col(h);
  out.rowwise() += b1.row(0);
  return out.unaryExpr([](T v) { return diff::sigmoid_scalar(v); });
}

/// Neighbor attention for every message edge, fused:
///   alpha(e, h) = sigmoid(b1_h + sum_j relu(P[dst_e, hA+j] + Q[src_e, hA+j] + b0[hA+j]) w1(j, h)).
/// Only the pre-activations are kept for the backward pass.
template <class T>
struct EdgeAttention {
  Matrix<T> pre;    // E x (H*A)
  Matrix<T> alpha;  // E x H
};

template <class T>
void edge_attention_values(const Matrix<T>& P, const Matrix<T>& Q, const std::vector<std::uint32_t>& dst,
                           const std::vector<std::uint32_t>& src, std::size_t begin, std::size_t end,
                           const Matrix<T>& b0, const Matrix<T>& w1, const Matrix<T>& b1, Matrix<T>* pre_out,
                           Matrix<T>& alpha) {
  const Eigen::Index H = w1.cols(), A = w1.rows(), W = H * A;
  // w1 transposed so each head's weights are contiguous.
  const Matrix<T> w1t = w1.transpose();
  alpha.resize(static_cast<Eigen::Index>(end - begin), H);
  std::vector<T> buf(static_cast<std::size_t>(W));
  for (std::size_t x = begin; x < end; ++x) {
    const Eigen::Index r = static_cast<Eigen::Index>(x - begin);
    const T* a = P.data() + dst[x] * W;
    const T* c = Q.data() + src[x] * W;
    const T* bb = b0.data();
    T* pre = pre_out ? pre_out->data() + r * W : buf.data();
    for (Eigen::Index j = 0; j < W; ++j) pre[j] = a[j] + c[j] + bb[j];
    for (Eigen::Index h = 0; h < H; ++h) {
      const T* w = w1t.data() + h * A;
      const T* ph = pre + h * A;
      using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
      const T z = b1(0, h) + Eigen::Map<const Vec>(ph, A).cwiseMax(T(0)).dot(Eigen::Map<const Vec>(w, A));
      alpha(r, h) = diff::sigmoid_scalar(z);
    }
  }
}

template <class T>
Var<T> edge_attention(diff::Tape<T>& tape, const Var<T>& P, const Var<T>& Q, const GraphBatch& b,
                      diff::Parameter<T>& b0p, diff::Parameter<T>& w1p, diff::Parameter<T>& b1p) {
  Var<T> b0 = tape.param(b0p), w1 = tape.param(w1p), b1 = tape.param(b1p);
  const std::size_t E = b.num_edges();
  auto pre = std::make_shared<Matrix<T>>(static_cast<Eigen::Index>(E), P.cols());
  Matrix<T> alpha;
  edge_attention_values(P.value(), Q.value(), *b.dst, *b.src, 0, E, b0.value(), w1.value(), b1.value(), pre.get(),
                        alpha);
  const auto ip = P.id(), iq = Q.id(), ib0 = b0.id(), iw1 = w1.id(), ib1 = b1.id();
  const diff::IndexList dst = b.dst, src = b.src;
  const Var<T> inputs[] = {P, Q, b0, w1, b1};
  return tape.record(std::move(alpha), std::span<const Var<T>>(inputs),
                     [=](diff::Tape<T>& t, std::uint32_t self) {
                       const Matrix<T>& d = t.grad(self);
                       const Matrix<T>& al = t.value(self);
                       const Matrix<T>& w1v = t.value(iw1);
                       const Eigen::Index H = w1v.cols(), A = w1v.rows(), W = H * A;
                       const Matrix<T> w1t = w1v.transpose();
                       Matrix<T> gw1t = Matrix<T>::Zero(H, A);
                       Matrix<T> gb0 = Matrix<T>::Zero(1, W);
                       Matrix<T> gb1 = Matrix<T>::Zero(1, H);
                       const bool gp = t.requires_grad(ip), gq = t.requires_grad(iq);
                       Matrix<T>* GP = gp ? &t.grad(ip) : nullptr;
                       Matrix<T>* GQ = gq ? &t.grad(iq) : nullptr;
                       std::vector<T> dpre(static_cast<std::size_t>(W));
                       for (std::size_t x = 0; x < dst->size(); ++x) {
                         const Eigen::Index r = static_cast<Eigen::Index>(x);
                         const T* pr = pre->data() + r * W;
                         for (Eigen::Index h = 0; h < H; ++h) {
                           const T a = al(r, h);
                           const T dz = d(r, h) * a * (T(1) - a);
                           gb1(0, h) += dz;
                           const T* w = w1t.data() + h * A;
                           T* gw = gw1t.data() + h * A;
                           const T* ph = pr + h * A;
                           T* dp = dpre.data() + h * A;
                           for (Eigen::Index j = 0; j < A; ++j) {
                             const bool on = ph[j] > T(0);
                             gw[j] += on ? ph[j] * dz : T(0);
                             dp[j] = on ? w[j] * dz : T(0);
                           }
                         }
                         T* g0 = gb0.data();
                         for (Eigen::Index j = 0; j < W; ++j) g0[j] += dpre[static_cast<std::size_t>(j)];
                         if (gp) {
                           T* o = GP->data() + (*dst)[x] * W;
                           for (Eigen::Index j = 0; j < W; ++j) o[j] += dpre[static_cast<std::size_t>(j)];
                         }
                         if (gq) {
                           T* o = GQ->data() + (*src)[x] * W;
                           for (Eigen::Index j = 0; j < W; ++j) o[j] += dpre[static_cast<std::size_t>(j)];
                         }
                       }
                       if (t.requires_grad(iw1)) t.grad(iw1) += gw1t.transpose();
                       if (t.requires_grad(ib0)) t.grad(ib0) += gb0;
                       if (t.requires_grad(ib1)) t.grad(ib1) += gb1;
                     });
}

}  // namespace

template <class T>
Encoder<T>::Encoder(std::string name, EncoderConfig cfg, Rng& rng) : cfg_(cfg) {
  require(cfg.layers > 0 && cfg.heads > 0 && cfg.features > 0 && cfg.attn_hidden > 0,
          "Encoder: dimensions must be positive");
  const int H = cfg.heads, F = cfg.features, HF = cfg.width(), A = cfg.attn_hidden;
  const double wb = 1.0 / std::sqrt(static_cast<double>(F));
  const double b0 = 1.0 / std::sqrt(static_cast<double>(HF));
  const double b1 = 1.0 / std::sqrt(static_cast<double>(A));
  for (int k = 0; k < cfg.layers; ++k) {
    const std::string p = name + "/k" + std::to_string(k) + "/";
    EncoderLayer<T> L;
    L.ws = uniform_param<T>(p + "ws", HF, F, wb, rng);
    L.wn = uniform_param<T>(p + "wn", HF, F, wb, rng);
    L.s0 = uniform_param<T>(p + "att_s/w0", HF, H * A, b0, rng);
    L.s0b = uniform_param<T>(p + "att_s/b0", 1, H * A, b0, rng);
    L.s1 = uniform_param<T>(p + "att_s/w1", A, H, b1, rng);
    L.s1b = uniform_param<T>(p + "att_s/b1", 1, H, b1, rng);
    L.n0 = uniform_param<T>(p + "att_n/w0", HF, H * A, b0, rng);
    L.n0b = uniform_param<T>(p + "att_n/b0", 1, H * A, b0, rng);
    L.n1 = uniform_param<T>(p + "att_n/w1", A, H, b1, rng);
    L.n1b = uniform_param<T>(p + "att_n/b1", 1, H, b1, rng);
    layers_.push_back(std::move(L));
  }
}

template <class T>
void Encoder<T>::collect(std::vector<diff::Parameter<T>*>& out) {
  for (auto& L : layers_)
    for (diff::Parameter<T>* p : {&L.ws, &L.wn, &L.s0, &L.s0b, &L.s1, &L.s1b, &L.n0, &L.n0b, &L.n1, &L.n1b})
      out.push_back(p);
}

template <class T>
Var<T> Encoder<T>::forward(diff::Tape<T>& tape, const GraphBatch& b) {
  const int H = cfg_.heads;
  const Eigen::Index rows = b.rows();
  Var<T> e = tape.constant(Matrix<T>::Ones(rows, cfg_.width()));
  Var<T> weights;
  if (b.weighted) weights = tape.constant(edge_weight_column<T>(b));

  std::vector<Var<T>> profile;
  for (auto& L : layers_) {
    Var<T> s = block_matmul(e, tape.param(L.ws), H);
    Var<T> v = block_matmul(e, tape.param(L.wn), H);
    Var<T> a_self = attention_tail(tape, add_row(matmul(s, tape.param(L.s0)), tape.param(L.s0b)), L.s1, L.s1b);
    // The first affine map of the neighbor MLP on (s_i + v_j) splits per endpoint.
    Var<T> n0 = tape.param(L.n0);
    Var<T> a_edge = edge_attention(tape, matmul(s, n0), matmul(v, n0), b, L.n0b, L.n1, L.n1b);
    if (b.weighted) a_edge = scale_rows(a_edge, weights);
    Var<T> msg = scale_blocks(gather_rows(v, b.src), a_edge);
    e = add(scale_blocks(s, a_self), scatter_add_rows(msg, b.dst, rows));
    profile.push_back(e);
  }
  return concat_cols<T>(profile);
}

template <class T>
Matrix<T> Encoder<T>::apply(const GraphBatch& b) const {
  const int H = cfg_.heads, F = cfg_.features, HF = cfg_.width();
  const Eigen::Index rows = b.rows();
  const auto& src = *b.src;
  const auto& dst = *b.dst;
  const std::size_t E = src.size();

  Matrix<T> profile(rows, cfg_.profile_width());
  Matrix<T> e = Matrix<T>::Ones(rows, HF);
  Matrix<T> s(rows, HF), v(rows, HF), next(rows, HF), ps, pv, pre, alpha;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& L = layers_[k];
    for (int h = 0; h < H; ++h) {
      s.middleCols(h * F, F).noalias() = e.middleCols(h * F, F) * L.ws.value.middleRows(h * F, F);
      v.middleCols(h * F, F).noalias() = e.middleCols(h * F, F) * L.wn.value.middleRows(h * F, F);
    }
    pre.noalias() = s * L.s0.value;
    pre.rowwise() += L.s0b.value.row(0);
    alpha = attention_tail(pre, L.s1.value, L.s1b.value);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (int h = 0; h < H; ++h) next.row(r).segment(h * F, F) = alpha(r, h) * s.row(r).segment(h * F, F);

    ps.noalias() = s * L.n0.value;
    pv.noalias() = v * L.n0.value;
    for (std::size_t begin = 0; begin < E; begin += kEdgeChunk) {
      const std::size_t end = std::min(E, begin + kEdgeChunk);
      edge_attention_values(ps, pv, dst, src, begin, end, L.n0b.value, L.n1.value, L.n1b.value,
                            static_cast<Matrix<T>*>(nullptr), alpha);
      for (std::size_t x = begin; x < end; ++x) {
        const Eigen::Index r = static_cast<Eigen::Index>(x - begin);
        const T w = b.weighted ? static_cast<T>(b.edge_weight[x]) : T(1);
        T* o = next.data() + dst[x] * HF;
        const T* vs = v.data() + src[x] * HF;
        for (int h = 0; h < H; ++h) {
          const T a = alpha(r, h) * w;
          for (int f = 0; f < F; ++f) o[h * F + f] += a * vs[h * F + f];
        }
      }
    }
    e.swap(next);
    profile.middleCols(static_cast<Eigen::Index>(k) * HF, HF) = e;
  }
  return profile;
}

double between_row_variance(const Eigen::MatrixXd& m, Eigen::Index rows) {
  require(rows > 0 && rows <= m.rows(), "between_row_variance: bad row count");
  const auto block = m.topRows(rows);
  const Eigen::RowVectorXd mu = block.colwise().mean();
  return (block.rowwise() - mu).array().square().colwise().sum().mean() / static_cast<double>(rows);
}

template class Encoder<float>;
template class Encoder<double>;

}  // namespace mind::encoder
