#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "mind/diff/adam.hpp"
#include "mind/diff/checkpoint.hpp"
#include "mind/diff/eigh.hpp"
#include "mind/diff/mlp.hpp"
#include "mind/diff/tape.hpp"

using namespace mind;
using namespace mind::diff;

namespace {

using Md = Matrix<double>;

Parameter<double> random_param(const std::string& name, Eigen::Index r, Eigen::Index c, Rng& rng,
                               double lo = -1.0, double hi = 1.0) {
  Parameter<double> p{name, Md(r, c), {}};
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = uniform_real(rng, lo, hi);
  return p;
}

// Weighted sum so every output entry gets a distinct upstream gradient.
Var<double> probe_sum(Tape<double>& t, const Var<double>& y, std::uint64_t seed) {
  Rng rng(seed);
  Md w(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform_real(rng, -1.0, 1.0);
  return sum(mul(y, t.constant(w)));
}

void expect_gradients(std::vector<Parameter<double>*> params, const std::function<Var<double>(Tape<double>&)>& f) {
  const auto r = gradcheck::check(params, f);
  CHECK(r.bad == 0);
  CHECK(r.worst < 1e-4);
}

}  // namespace

TEST_CASE("forward values") {
  Tape<double> t;
  Md z = Md::Zero(1, 3);
  CHECK(sigmoid(t.constant(z)).value()(0, 1) == 0.5);
  Md x(2, 2);
  x << 1, 2, 3, 4;
  CHECK(matmul(t.constant(Md::Identity(2, 2)), t.constant(x)).value() == x);
  Md eq = Md::Constant(5, 1, 0.3);
  auto ls = log_softmax(t.constant(eq)).value();
  for (int i = 0; i < 5; ++i) CHECK(ls(i, 0) == doctest::Approx(-std::log(5.0)));
  CHECK(sigmoid_scalar(-800.0) >= 0.0);
  CHECK(sigmoid_scalar(800.0) == 1.0);
  CHECK(sum(t.constant(x)).value()(0, 0) == 10);
  CHECK(mean(t.constant(x)).value()(0, 0) == 2.5);
}

TEST_CASE("segment log softmax") {
  Tape<double> t;
  Md a(5, 1);
  a << 0, 0, 1, 2, 3;
  auto off = make_index({0, 2, 5});
  auto y = segment_log_softmax(t.constant(a), off).value();
  CHECK(y(0, 0) == doctest::Approx(-std::log(2.0)));
  CHECK(std::exp(y(2, 0)) + std::exp(y(3, 0)) + std::exp(y(4, 0)) == doctest::Approx(1.0));
  Md big(2, 1);
  big << 1000, -1000;
  auto s = log_softmax(t.constant(big)).value();
  CHECK(std::isfinite(s(1, 0)));
  CHECK(s(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("shape mismatches are contract errors") {
  Tape<double> t;
  auto a = t.constant(Md::Ones(2, 3));
  auto b = t.constant(Md::Ones(2, 2));
  CHECK_THROWS_AS(matmul(b, a.tape()->constant(Md::Ones(3, 3))), ContractError);
  CHECK_THROWS_AS(add(a, b), ContractError);
  CHECK_THROWS_AS(mul(a, b), ContractError);
  CHECK_THROWS_AS(add_row(a, b), ContractError);
  CHECK_THROWS_AS(slice_cols(a, 2, 2), ContractError);
}

TEST_CASE("backward contracts") {
  Rng rng(1);
  auto w = random_param("w", 2, 2, rng);
  Tape<double> t;
  auto y = matmul(t.param(w), t.constant(Md::Ones(2, 1)));
  CHECK_THROWS_AS(t.backward(y), ContractError);  // not a scalar
  auto l = sum(y);
  w.zero_grad();
  t.backward(l);
  CHECK_THROWS_AS(t.backward(l), ContractError);  // tape already consumed
  CHECK_THROWS(y.value());
  Tape<double> other;
  auto c = other.constant(Md::Ones(1, 1));
  Tape<double> third;
  CHECK_THROWS_AS(add(c, third.constant(Md::Ones(1, 1))), ContractError);
}

TEST_CASE("sum of W x gives x replicated") {
  Rng rng(2);
  auto w = random_param("w", 3, 2, rng);
  Md x(1, 3);
  x << 1, 2, 3;
  w.zero_grad();
  Tape<double> t;
  t.backward(sum(matmul(t.constant(x), t.param(w))));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(w.grad(i, j) == x(0, i));
}

TEST_CASE("gradients accumulate across backward calls") {
  Rng rng(3);
  auto w = random_param("w", 2, 2, rng);
  w.zero_grad();
  for (int k = 0; k < 2; ++k) {
    Tape<double> t;
    t.backward(sum(t.param(w)));
  }
  CHECK(w.grad(1, 1) == 2.0);
}

TEST_CASE("no-grad tapes leave parameters untouched") {
  Rng rng(4);
  auto w = random_param("w", 2, 2, rng);
  Tape<double> t(false);
  auto l = sum(t.param(w));
  CHECK_FALSE(t.requires_grad(l.id()));
  auto f = random_param("f", 2, 2, rng);
  Tape<double> g;
  auto fl = sum(g.frozen(f));
  CHECK_FALSE(g.requires_grad(fl.id()));
}

TEST_CASE("elementwise op gradients") {
  Rng rng(5);
  auto a = random_param("a", 4, 3, rng);
  auto b = random_param("b", 4, 3, rng);
  auto r = random_param("r", 1, 3, rng);
  std::vector<Parameter<double>*> ab{&a, &b};
  expect_gradients(ab, [&](Tape<double>& t) { return probe_sum(t, add(t.param(a), t.param(b)), 1); });
  expect_gradients(ab, [&](Tape<double>& t) { return probe_sum(t, sub(t.param(a), t.param(b)), 2); });
  expect_gradients(ab, [&](Tape<double>& t) { return probe_sum(t, mul(t.param(a), t.param(b)), 3); });
  expect_gradients({&a, &r}, [&](Tape<double>& t) { return probe_sum(t, add_row(t.param(a), t.param(r)), 4); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, scale(t.param(a), 1.7), 5); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, relu(t.param(a)), 6); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, sigmoid(t.param(a)), 7); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, exp(t.param(a)), 8); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, square(t.param(a)), 9); });
  expect_gradients({&a}, [&](Tape<double>& t) { return mean(t.param(a)); });
}

TEST_CASE("structural op gradients") {
  Rng rng(6);
  auto a = random_param("a", 5, 3, rng);
  auto b = random_param("b", 3, 4, rng);
  auto c = random_param("c", 5, 2, rng);
  expect_gradients({&a, &b}, [&](Tape<double>& t) { return probe_sum(t, matmul(t.param(a), t.param(b)), 1); });
  expect_gradients({&a, &c}, [&](Tape<double>& t) {
    std::vector<Var<double>> parts{t.param(a), t.param(c), t.param(a)};
    return probe_sum(t, concat_cols<double>(parts), 2);
  });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, slice_cols(t.param(a), 1, 2), 3); });
  auto idx = make_index({4, 0, 0, 2, 3, 4, 1});
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, gather_rows(t.param(a), idx), 4); });
  expect_gradients({&a}, [&](Tape<double>& t) {
    return probe_sum(t, scatter_add_rows(t.param(a), make_index({1, 1, 0, 2, 1}), 3), 5);
  });
  auto d = random_param("d", 4, 3, rng);
  expect_gradients({&a, &d}, [&](Tape<double>& t) {
    return probe_sum(t, gather_add_rows(t.param(a), idx, t.param(d), make_index({0, 1, 2, 3, 3, 2, 0})), 6);
  });
  auto s = random_param("s", 5, 1, rng);
  expect_gradients({&a, &s}, [&](Tape<double>& t) { return probe_sum(t, scale_rows(t.param(a), t.param(s)), 7); });
}

TEST_CASE("block op gradients") {
  Rng rng(7);
  const int H = 3, F = 2, D = 4;
  auto x = random_param("x", 5, H * F, rng);
  auto w = random_param("w", H * F, D, rng);
  expect_gradients({&x, &w}, [&](Tape<double>& t) { return probe_sum(t, block_matmul(t.param(x), t.param(w), H), 1); });
  auto y = random_param("y", 5, H * D, rng);
  auto v = random_param("v", D, H, rng);
  expect_gradients({&y, &v}, [&](Tape<double>& t) { return probe_sum(t, block_dot(t.param(y), t.param(v)), 2); });
  auto sc = random_param("sc", 5, H, rng);
  expect_gradients({&x, &sc}, [&](Tape<double>& t) { return probe_sum(t, scale_blocks(t.param(x), t.param(sc)), 3); });
}

TEST_CASE("block ops agree with explicit loops") {
  Rng rng(8);
  const int H = 2, F = 3, D = 2;
  auto x = random_param("x", 4, H * F, rng);
  auto w = random_param("w", H * F, D, rng);
  Tape<double> t(false);
  Md y = block_matmul(t.param(x), t.param(w), H).value();
  for (int r = 0; r < 4; ++r)
    for (int h = 0; h < H; ++h)
      for (int d = 0; d < D; ++d) {
        double acc = 0;
        for (int f = 0; f < F; ++f) acc += x.value(r, h * F + f) * w.value(h * F + f, d);
        CHECK(y(r, h * D + d) == doctest::Approx(acc));
      }
  auto v = random_param("v", D, H, rng);
  Md dots = block_dot(t.constant(y), t.param(v)).value();
  for (int r = 0; r < 4; ++r)
    for (int h = 0; h < H; ++h) {
      double acc = 0;
      for (int d = 0; d < D; ++d) acc += y(r, h * D + d) * v.value(d, h);
      CHECK(dots(r, h) == doctest::Approx(acc));
    }
}

TEST_CASE("softmax gradients") {
  Rng rng(9);
  auto a = random_param("a", 7, 1, rng, -3, 3);
  auto off = make_index({0, 1, 4, 7});
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, segment_log_softmax(t.param(a), off), 1); });
  expect_gradients({&a}, [&](Tape<double>& t) { return probe_sum(t, log_softmax(t.param(a)), 2); });
}

TEST_CASE("mlp") {
  Rng rng(10);
  Mlp<double> m("m", {5, 8, 8, 1}, OutputActivation::Sigmoid, rng);
  CHECK(m.num_layers() == 3);
  CHECK(m.weight(0).name == "m/w0");
  CHECK(m.bias(2).name == "m/b2");
  auto x = random_param("x", 6, 5, rng, -2, 2);
  Md out = m.apply(x.value);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    CHECK(out(i) > 0.0);
    CHECK(out(i) < 1.0);
  }
  Tape<double> t(false);
  CHECK((m.forward(t, t.constant(x.value)).value() - out).cwiseAbs().maxCoeff() < 1e-14);
  Md pre0 = x.value * m.weight(0).value;
  pre0.rowwise() += m.bias(0).value.row(0);
  CHECK((m.apply_tail(pre0) - out).cwiseAbs().maxCoeff() < 1e-14);
  std::vector<Parameter<double>*> params;
  m.collect(params);
  CHECK(params.size() == 6);
  params.push_back(&x);
  expect_gradients(params, [&](Tape<double>& tp) { return probe_sum(tp, m.forward(tp, tp.param(x)), 3); });
  CHECK_THROWS_AS(Mlp<double>("bad", {3}, OutputActivation::Identity, rng), ContractError);
}

TEST_CASE("mlp forward is deterministic per seed") {
  Rng a(42), b(42);
  Mlp<float> m1("m", {4, 16, 1}, OutputActivation::Identity, a);
  Mlp<float> m2("m", {4, 16, 1}, OutputActivation::Identity, b);
  Matrix<float> x = Matrix<float>::Random(9, 4);
  CHECK(m1.apply(x) == m2.apply(x));
}

TEST_CASE("copy and soft update") {
  Rng rng(11);
  Mlp<double> a("a", {3, 4, 1}, OutputActivation::Identity, rng);
  Mlp<float> b("b", {3, 4, 1}, OutputActivation::Identity, rng);
  std::vector<Parameter<double>*> pa;
  std::vector<Parameter<float>*> pb;
  a.collect(pa);
  b.collect(pb);
  copy_values(pb, pa);
  CHECK((pb[0]->value.cast<double>() - pa[0]->value).cwiseAbs().maxCoeff() < 1e-7);
  Mlp<double> c("c", {3, 4, 1}, OutputActivation::Identity, rng);
  std::vector<Parameter<double>*> pc;
  c.collect(pc);
  const Md before = pc[0]->value;
  soft_update(pc, pa, 0.25);
  CHECK((pc[0]->value - (0.25 * pa[0]->value + 0.75 * before)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("adam") {
  Rng rng(12);
  auto p = random_param("p", 2, 3, rng);
  const Md start = p.value;
  Adam<double> opt({&p});
  p.grad = Md::Ones(2, 3);
  opt.step();
  CHECK(((start - p.value).array() - 3e-4).abs().maxCoeff() < 1e-9);
  CHECK(p.grad.cwiseAbs().maxCoeff() == 0.0);

  auto q = random_param("q", 2, 2, rng);
  const Md qs = q.value;
  Adam<double> zero({&q});
  q.zero_grad();
  zero.step();
  CHECK((q.value - qs).cwiseAbs().maxCoeff() == 0.0);

  AdamConfig frozen;
  frozen.lr = 0.0;
  Adam<double> still({&q}, frozen);
  q.grad = Md::Constant(2, 2, 5.0);
  still.step();
  CHECK(q.value == qs);

  auto r = random_param("r", 2, 2, rng);
  Adam<double> missing({&r});
  CHECK_THROWS_AS(missing.step(), ContractError);
}

TEST_CASE("adam matches a hand-rolled update over several steps") {
  Rng rng(13);
  auto p = random_param("p", 1, 4, rng);
  Md m = Md::Zero(1, 4), v = Md::Zero(1, 4), ref = p.value;
  AdamConfig cfg;
  cfg.lr = 0.01;
  Adam<double> opt({&p}, cfg);
  for (int k = 1; k <= 5; ++k) {
    Md g(1, 4);
    for (int i = 0; i < 4; ++i) g(0, i) = uniform_real(rng, -1, 1);
    p.grad = g;
    opt.step();
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g.cwiseProduct(g);
    const double c1 = 1 - std::pow(0.9, k), c2 = 1 - std::pow(0.999, k);
    ref.array() -= 0.01 * (m.array() / c1) / ((v.array() / c2).sqrt() + 1e-8);
  }
  CHECK((p.value - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric eigensolver") {
  Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
  auto r = symmetric_eigh(d);
  CHECK(r.values(0) == doctest::Approx(1));
  CHECK(r.values(1) == doctest::Approx(2));
  CHECK(r.values(2) == doctest::Approx(3));
  CHECK(std::abs(r.vectors(1, 0)) == doctest::Approx(1));

  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  auto e = symmetric_eigh(s);
  CHECK(e.values(0) == doctest::Approx(-1));
  CHECK(e.values(1) == doctest::Approx(1));

  // Normalized Laplacian of P3: eigenvalue 0 with eigenvector along sqrt(degrees).
  Eigen::MatrixXd l(3, 3);
  const double c = -1.0 / std::sqrt(2.0);
  l << 1, c, 0, c, 1, c, 0, c, 1;
  auto p3 = symmetric_eigh(l);
  CHECK(std::abs(p3.values(0)) < 1e-12);
  Eigen::Vector3d u(1, std::sqrt(2.0), 1);
  CHECK(std::abs(p3.vectors.col(0).dot(u.normalized())) == doctest::Approx(1.0));

  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(symmetric_eigh(bad), ContractError);
}

TEST_CASE("eigensolver reconstruction and orthonormality") {
  Rng rng(14);
  for (int n : {1, 2, 5, 17, 40}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = uniform_real(rng, -1, 1);
    auto r = symmetric_eigh(a);
    CHECK((a - r.vectors * r.values.asDiagonal() * r.vectors.transpose()).norm() < 1e-8);
    CHECK((r.vectors.transpose() * r.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
    for (int i = 1; i < n; ++i) CHECK(r.values(i - 1) <= r.values(i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    CHECK((ref.eigenvalues() - r.values).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("checkpoint round trip") {
  Rng rng(15);
  Mlp<float> m("net", {3, 5, 1}, OutputActivation::Identity, rng);
  std::vector<Parameter<float>*> ps;
  m.collect(ps);
  TensorMap out;
  store_params(out, ps);
  store_scalar(out, "meta/x", 2.5);
  CHECK(out.at("net/w0").dims == std::vector<std::uint64_t>{3, 5});
  CHECK(out.at("net/b0").dims == std::vector<std::uint64_t>{5});
  const std::string path = "test_diff_checkpoint.bin";
  save_checkpoint(path, out);
  auto back = load_checkpoint(path);
  CHECK(restore_scalar(back, "meta/x") == 2.5);
  Mlp<float> other("net", {3, 5, 1}, OutputActivation::Identity, rng);
  std::vector<Parameter<float>*> po;
  other.collect(po);
  restore_params(back, po);
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(po[i]->value == ps[i]->value);

  Mlp<float> wrong("net", {3, 6, 1}, OutputActivation::Identity, rng);
  std::vector<Parameter<float>*> pw;
  wrong.collect(pw);
  CHECK_THROWS_AS(restore_params(back, pw), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.bin"), IoError);
}

TEST_CASE("checkpoint byte layout") {
  TensorMap t;
  t["ab"] = StoredTensor{{2}, {1.0f, -2.0f}};
  std::ostringstream os;
  write_tensors(os, t);
  const std::string s = os.str();
  REQUIRE(s.size() == 4 + 4 + 8 + 8 + 2 + 8 + 8 + 8);
  CHECK(s.substr(0, 4) == "MIND");
  CHECK(static_cast<unsigned char>(s[4]) == kCheckpointVersion);
  CHECK(static_cast<unsigned char>(s[8]) == 1);   // tensor count
  CHECK(static_cast<unsigned char>(s[16]) == 2);  // name length
  CHECK(s.substr(24, 2) == "ab");

  std::istringstream bad_magic("MINX" + s.substr(4));
  CHECK_THROWS_AS(read_tensors(bad_magic), ParseError);
  std::istringstream truncated(s.substr(0, s.size() - 3));
  CHECK_THROWS_AS(read_tensors(truncated), ParseError);
}
