#include <benchmark/benchmark.h>

#include <algorithm>
#include <memory>
#include <numeric>

#include "mind/agent/networks.hpp"
#include "mind/dismantler/baselines.hpp"
#include "mind/dismantler/rollout.hpp"
#include "mind/encoder/batch.hpp"
#include "mind/encoder/encoder.hpp"
#include "mind/graph/curve.hpp"
#include "mind/netgen/corpus.hpp"
#include "mind/netgen/generators.hpp"

using namespace mind;

namespace {

Graph sparse(std::size_t n) {
  Rng rng(1);
  return netgen::gen_gnm(n, 2 * n, rng);
}

}  // namespace

static void BM_AucForOrder(benchmark::State& state) {
  const Graph g = sparse(static_cast<std::size_t>(state.range(0)));
  std::vector<NodeId> order(g.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), *std::make_unique<Rng>(2));
  for (auto _ : state) benchmark::DoNotOptimize(auc_for_order(g, order, 0.0).auc);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.num_nodes() + g.num_edges()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucForOrder)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oN);

static void BM_AdaptiveDegree(benchmark::State& state) {
  const Graph g = sparse(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dismantler::adaptive_degree_order(g).size());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AdaptiveDegree)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oN);

static void BM_PageRank(benchmark::State& state) {
  const Graph g = sparse(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dismantler::pagerank(g).size());
}
BENCHMARK(BM_PageRank)->Arg(1 << 12)->Arg(1 << 16);

static void BM_Betweenness(benchmark::State& state) {
  const Graph g = sparse(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dismantler::betweenness(g).size());
}
BENCHMARK(BM_Betweenness)->Arg(256)->Arg(1024);

static void BM_EncoderForward(benchmark::State& state) {
  Rng rng(3);
  encoder::Encoder<float> enc("e", {}, rng);
  const Graph g = netgen::gen_lpa(static_cast<std::size_t>(state.range(0)), 2, 3.0, rng);
  const auto batch = encoder::make_batch(g);
  for (auto _ : state) benchmark::DoNotOptimize(enc.apply(batch).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncoderForward)->Arg(50)->Arg(500)->Arg(5000);

static void BM_PolicyRollout(benchmark::State& state) {
  agent::AgentNetworks<float> nets(agent::NetworkConfig{}, 4);
  Rng rng(5);
  const Graph g = netgen::gen_lpa(static_cast<std::size_t>(state.range(0)), 2, 3.0, rng);
  dismantler::RolloutConfig rc;
  rc.batch_frac = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(dismantler::rollout(g, nets.pi, rc).auc);
}
BENCHMARK(BM_PolicyRollout)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_CorpusGraph(benchmark::State& state) {
  netgen::CorpusConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(netgen::corpus_graph(6, i++, cfg).graph.num_edges());
}
BENCHMARK(BM_CorpusGraph)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
