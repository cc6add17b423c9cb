#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "mind/graph/stats.hpp"
#include "mind/netgen/corpus.hpp"
#include "mind/netgen/generators.hpp"
#include "mind/netgen/rewire.hpp"

using namespace mind;
using namespace mind::netgen;

namespace {

bool is_simple(const Graph& g) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : g.active_edges()) {
    if (e.u == e.v) return false;
    if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second) return false;
  }
  return true;
}

std::vector<std::uint32_t> degree_multiset(const Graph& g) {
  std::vector<std::uint32_t> d;
  for (NodeId v = 0; v < g.num_nodes(); ++v) d.push_back(g.degree(v));
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<std::uint32_t> degrees(const Graph& g) {
  std::vector<std::uint32_t> d;
  for (NodeId v = 0; v < g.num_nodes(); ++v) d.push_back(g.degree(v));
  return d;
}

std::size_t seed_edges(std::size_t n, std::size_t m) { return (m + 1) * m / 2 + (n - m - 1) * m; }

}  // namespace

TEST_CASE("LPA edge accounting and mean degree") {
  Rng rng(1);
  Graph t = gen_lpa(102, 1, 3.0, rng);
  CHECK(t.num_edges() == 101);
  CHECK(is_connected(t));
  for (std::size_t m : {2u, 3u, 5u}) {
    double mean = 0;
    for (int i = 0; i < 100; ++i) {
      Graph g = gen_lpa(150, m, uniform_real(rng, 2.0, 4.0), rng);
      REQUIRE(g.num_edges() == seed_edges(150, m));
      REQUIRE(is_simple(g));
      REQUIRE(is_connected(g));
      mean += 2.0 * static_cast<double>(g.num_edges()) / 150.0 / 100.0;
    }
    CHECK(std::abs(mean - 2.0 * static_cast<double>(m)) <= 0.05 * 2.0 * static_cast<double>(m));
  }
  CHECK_THROWS_AS(gen_lpa(3, 2, 3.0, rng), ContractError);
  CHECK_THROWS_AS(gen_lpa(100, 0, 3.0, rng), ContractError);
  CHECK_THROWS_AS(gen_lpa(100, 2, 5.0, rng), ContractError);
}

TEST_CASE("LPA with gamma 3 favours high degree") {
  // Pure preferential attachment: the seed clique nodes end up as hubs.
  Rng rng(4);
  double seed_share = 0;
  for (int i = 0; i < 30; ++i) {
    Graph g = gen_lpa(200, 1, 3.0, rng);
    seed_share += (g.degree(0) + g.degree(1)) / (2.0 * static_cast<double>(g.num_edges())) / 30.0;
  }
  // Uniform attachment would give the two seed nodes roughly 2 * H_200 / 400 ~ 3%.
  CHECK(seed_share > 0.05);
}

TEST_CASE("copying model") {
  CHECK(copying_alpha(2.0) == doctest::Approx(0.0));
  CHECK(copying_alpha(3.0) == doctest::Approx(0.5));
  Rng rng(2);
  for (double gamma : {2.0, 2.5, 3.0, 4.0}) {
    Graph g = gen_copying(120, 3, gamma, rng);
    CHECK(g.num_edges() == seed_edges(120, 3));
    CHECK(is_simple(g));
    CHECK(is_connected(g));
  }
}

TEST_CASE("ER edge probability and degree") {
  CHECK(er_edge_probability(200, 4) == doctest::Approx(395.0 * 4.0 / 39800.0));
  CHECK(er_edge_probability(200, 4) == doctest::Approx(0.03970).epsilon(1e-3));
  Rng rng(3);
  const double p = er_edge_probability(200, 4);
  double mean = 0;
  for (int i = 0; i < 100; ++i) mean += 2.0 * static_cast<double>(gen_er(200, 4, rng, false).num_edges()) / 200.0 / 100.0;
  CHECK(std::abs(mean - p * 199.0) <= 0.05 * p * 199.0);
  Graph kept = gen_er(200, 1, rng, true);
  CHECK(is_connected(kept));
  Graph full = gen_gnp(12, 1.0, rng);
  CHECK(full.num_edges() == 66);
}

TEST_CASE("G(n, m)") {
  Rng rng(9);
  Graph g = gen_gnm(30, 100, rng);
  CHECK(g.num_edges() == 100);
  CHECK(is_simple(g));
}

TEST_CASE("Watts-Strogatz") {
  Rng rng(5);
  Graph ring = gen_ws(100, 4, 0.0, rng);
  CHECK(ring.num_edges() == 200);
  for (NodeId v = 0; v < 100; ++v) CHECK(ring.degree(v) == 4);
  Graph wild = gen_ws(100, 4, 1.0, rng);
  CHECK(wild.num_edges() == 200);
  CHECK(is_simple(wild));
  CHECK(gen_ws(100, 4, 0.1, rng).num_edges() == 200);
  CHECK_THROWS_AS(gen_ws(10, 3, 0.1, rng), ContractError);
  CHECK_THROWS_AS(gen_ws(4, 4, 0.1, rng), ContractError);
}

TEST_CASE("generators are deterministic per seed") {
  for (Model m : {Model::LPA, Model::COPY, Model::ER, Model::WS}) {
    GenSpec s;
    s.model = m;
    s.n = 120;
    s.m = m == Model::WS ? 4 : 3;
    s.gamma = 2.7;
    s.seed = 77;
    CHECK(generate(s).active_edges() == generate(s).active_edges());
    CHECK(parse_model(to_string(m)) == m);
  }
}

TEST_CASE("label assignment") {
  Rng rng(6);
  Graph g = gen_lpa(50, 2, 3.0, rng);
  auto r = assign_labels(g, LabelMode::RANDOM, rng);
  auto sorted = r;
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  auto d = assign_labels(g, LabelMode::DEGREE, rng);
  for (NodeId a = 0; a < 50; ++a)
    for (NodeId b = 0; b < 50; ++b)
      if (g.degree(a) < g.degree(b)) CHECK(d[a] < d[b]);
}

TEST_CASE("double edge swap on C4") {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  SwapGraph sg(Graph::from_edges(4, e));
  auto index_of = [&](NodeId u, NodeId v) {
    for (std::size_t i = 0; i < sg.edges().size(); ++i) {
      const Edge& x = sg.edges()[i];
      if ((x.u == u && x.v == v) || (x.u == v && x.v == u)) return i;
    }
    FAIL("edge missing");
    return std::size_t{0};
  };
  const std::size_t a = index_of(0, 1), b = index_of(2, 3);
  const bool fa = sg.edges()[a].u != 0, fb = sg.edges()[b].u != 2;
  // (0,1),(2,3) -> (0,3),(2,1) duplicates existing edges.
  CHECK_FALSE(sg.propose(a, fa, b, fb).has_value());
  // (0,1),(3,2) -> (0,2),(3,1).
  auto ok = sg.propose(a, fa, b, !fb);
  REQUIRE(ok.has_value());
  sg.apply(a, b, *ok);
  Graph h = sg.to_graph();
  CHECK(h.has_active_edge(0, 2));
  CHECK(h.has_active_edge(1, 3));
  for (NodeId v = 0; v < 4; ++v) CHECK(h.degree(v) == 2);
  CHECK(is_connected(h));
  sg.revert(a, b, *ok);
  CHECK(sg.to_graph().active_edges().size() == 4);
  CHECK(sg.to_graph().has_active_edge(0, 1));
}

TEST_CASE("random swap sequences preserve every degree") {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    Graph g = gen_lpa(uniform_int<std::size_t>(rng, 10, 40), uniform_int<std::size_t>(rng, 1, 3), 3.0, rng);
    const auto before = degrees(g);
    SwapGraph sg(g);
    const std::size_t m = sg.edges().size();
    for (int k = 0; k < 20; ++k) {
      const std::size_t a = uniform_int<std::size_t>(rng, 0, m - 1), b = uniform_int<std::size_t>(rng, 0, m - 1);
      if (a == b) continue;
      if (auto s = sg.propose(a, bernoulli(rng, 0.5), b, bernoulli(rng, 0.5))) sg.apply(a, b, *s);
    }
    Graph h = sg.to_graph();
    REQUIRE(degrees(h) == before);
    REQUIRE(is_simple(h));
  }
}

TEST_CASE("rewiring toward a target") {
  Rng rng(21);
  Graph g = gen_lpa(150, 3, 2.5, rng);
  RewireSpec spec;
  spec.label_mode = LabelMode::DEGREE;
  spec.target = 0.2;
  spec.record_swaps = true;
  auto r = rewire_to_target(g, spec, rng);
  CHECK(degree_multiset(r.graph) == degree_multiset(g));
  CHECK(degrees(r.graph) == degrees(g));
  CHECK(is_connected(r.graph));
  CHECK(r.reached);
  CHECK(std::abs(label_assortativity(r.graph, r.labels).value - r.achieved) < 1e-12);
  CHECK(r.achieved > r.initial);
  CHECK(degree_assortativity(r.graph).value > degree_assortativity(g).value);

  // Each accepted swap moves the label coefficient toward the target.
  SwapGraph replay(g);
  double prev = label_assortativity(g, r.labels).value;
  std::vector<Edge> edges = g.active_edges();
  for (const auto& s : r.swaps) {
    std::vector<Edge> next;
    for (const auto& e : edges) {
      auto same = [](const Edge& x, NodeId a, NodeId b) { return (x.u == a && x.v == b) || (x.u == b && x.v == a); };
      if (!same(e, s.i, s.l) && !same(e, s.j, s.k)) next.push_back(e);
    }
    REQUIRE(next.size() + 2 == edges.size());
    next.push_back({s.i, s.k});
    next.push_back({s.j, s.l});
    edges = next;
    const double now = label_assortativity(Graph::from_edges(g.num_nodes(), edges), r.labels).value;
    REQUIRE(now > prev);
    prev = now;
  }
  CHECK(prev == doctest::Approx(r.achieved));
}

TEST_CASE("target already met means no swaps") {
  Rng rng(22);
  Graph g = gen_lpa(80, 2, 3.0, rng);
  auto labels = assign_labels(g, LabelMode::RANDOM, rng);
  RewireSpec spec;
  spec.target = label_assortativity(g, labels).value;
  auto r = rewire_with_labels(g, labels, spec, rng);
  CHECK(r.attempts == 0);
  CHECK(r.graph.active_edges() == g.active_edges());
}

TEST_CASE("rewiring rejects disconnected input") {
  std::vector<Edge> e{{0, 1}, {2, 3}};
  Rng rng(1);
  CHECK_THROWS_AS(rewire_to_target(Graph::from_edges(4, e), RewireSpec{}, rng), ContractError);
}

TEST_CASE("random-label assortative rewiring raises modularity") {
  Rng rng(23);
  int higher = 0;
  double diff = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Graph g = gen_lpa(120, 3, uniform_real(rng, 2.0, 4.0), rng);
    RewireSpec spec;
    spec.label_mode = LabelMode::RANDOM;
    spec.target = 0.5;
    auto r = rewire_to_target(g, spec, rng);
    const double d = modularity_report(r.graph) - modularity_report(g);
    diff += d;
    if (d > 0) ++higher;
  }
  CHECK(diff > 0);
  // One-sided sign test: 33 or more of 50 has p < 0.02 under no effect.
  CHECK(higher >= 33);
}

TEST_CASE("m sampling") {
  Rng rng(30);
  std::map<std::size_t, int> count;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++count[sample_m(rng)];
  CHECK(count.size() == 8);
  // {1,6,8,10} with 1/3 overall, {2,3,4,5} with 2/3: 1/12 and 1/6 each.
  for (std::size_t m : {1u, 6u, 8u, 10u}) CHECK(count[m] / double(draws) == doctest::Approx(1.0 / 12).epsilon(0.08));
  for (std::size_t m : {2u, 3u, 4u, 5u}) CHECK(count[m] / double(draws) == doctest::Approx(1.0 / 6).epsilon(0.08));
}

TEST_CASE("corpus graphs are connected and reproducible") {
  CorpusConfig cfg;
  cfg.n_min = 30;
  cfg.n_max = 60;
  auto a = make_corpus(5, 40, cfg, 1);
  auto b = make_corpus(5, 40, cfg, 3);
  REQUIRE(a.size() == 40);
  std::set<Model> models;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(is_connected(a[i].graph));
    CHECK(is_simple(a[i].graph));
    CHECK(a[i].graph.active_edges() == b[i].graph.active_edges());
    CHECK(a[i].graph.num_nodes() <= 60);
    models.insert(a[i].model);
    if (a[i].label_mode) CHECK(a[i].target.has_value());
  }
  CHECK(models.size() == 3);
  CHECK(corpus_graph(5, 7, cfg).graph.active_edges() == a[7].graph.active_edges());
}

TEST_CASE("corpus without rewiring carries no targets") {
  CorpusConfig cfg;
  cfg.rewire = false;
  for (const auto& tg : make_corpus(9, 10, cfg)) {
    CHECK_FALSE(tg.label_mode.has_value());
    CHECK_FALSE(tg.target.has_value());
  }
}

TEST_CASE("validation set rotates models") {
  auto v = make_validation_set(1, 6, 30, 60);
  REQUIRE(v.size() == 6);
  for (const auto& g : v) {
    CHECK(is_connected(g));
    CHECK(g.num_nodes() >= 20);
    CHECK(g.num_nodes() <= 60);
  }
  CHECK(make_validation_set(1, 6, 30, 60)[4].active_edges() == v[4].active_edges());
}
