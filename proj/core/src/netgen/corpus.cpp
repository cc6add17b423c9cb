#include "mind/netgen/corpus.hpp"

#include <iomanip>
#include <ostream>
#include <thread>

#include "mind/graph/stats.hpp"

namespace mind::netgen {

std::size_t sample_m(Rng& rng) {
  static constexpr std::size_t kRare[] = {1, 6, 8, 10};
  static constexpr std::size_t kCommon[] = {2, 3, 4, 5};
  const bool rare = uniform_real(rng) < 1.0 / 3.0;
  const auto idx = uniform_int<std::size_t>(rng, 0, 3);
  return rare ? kRare[idx] : kCommon[idx];
}

TrainingGraph sample_training_graph(Rng& rng, const CorpusConfig& cfg) {
  require(cfg.n_min >= 12 && cfg.n_min <= cfg.n_max, "corpus: need 12 <= n_min <= n_max");
  for (;;) {
    TrainingGraph tg;
    tg.model = static_cast<Model>(uniform_int<int>(rng, 0, 2));
    tg.n = uniform_int<std::size_t>(rng, cfg.n_min, cfg.n_max);
    tg.m = sample_m(rng);
    switch (tg.model) {
      case Model::LPA:
        tg.gamma = uniform_real(rng, 2.0, 4.0);
        tg.graph = gen_lpa(tg.n, tg.m, *tg.gamma, rng);
        break;
      case Model::COPY:
        tg.gamma = uniform_real(rng, 2.0, 4.0);
        tg.graph = gen_copying(tg.n, tg.m, *tg.gamma, rng);
        break;
      default:
        tg.graph = gen_er(tg.n, tg.m, rng);
        break;
    }
    // degenerate ER draws (tiny giant component) are re-drawn
    if (tg.graph.num_nodes() < cfg.n_min / 2 || tg.graph.num_edges() < 3) continue;

    if (cfg.rewire) {
      RewireSpec rs;
      rs.label_mode = bernoulli(rng, 0.5) ? LabelMode::RANDOM : LabelMode::DEGREE;
      const double mag = kTargetMagnitudes[uniform_int<std::size_t>(rng, 0, std::size(kTargetMagnitudes) - 1)];
      rs.target = bernoulli(rng, 0.5) ? mag : -mag;
      rs.tolerance = cfg.tolerance;
      rs.max_attempts = cfg.max_attempts_per_edge * tg.graph.num_edges();
      RewireResult rr = rewire_to_target(tg.graph, rs, rng);
      tg.graph = std::move(rr.graph);
      tg.label_mode = rs.label_mode;
      tg.target = rs.target;
      tg.achieved = rr.achieved;
    }
    return tg;
  }
}

TrainingGraph corpus_graph(std::uint64_t seed, std::size_t index, const CorpusConfig& cfg) {
  Rng rng(derive_seed(seed, index));
  return sample_training_graph(rng, cfg);
}

std::vector<TrainingGraph> make_corpus(std::uint64_t seed, std::size_t count, const CorpusConfig& cfg,
                                       unsigned threads) {
  std::vector<TrainingGraph> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = corpus_graph(seed, i, cfg);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) out[i] = corpus_graph(seed, i, cfg);
    });
  for (auto& th : pool) th.join();
  return out;
}

std::vector<Graph> make_validation_set(std::uint64_t seed, std::size_t count, std::size_t n_min,
                                       std::size_t n_max) {
  std::vector<Graph> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    Rng rng(derive_seed(seed ^ 0x5eedULL, i));
    const std::size_t n = uniform_int<std::size_t>(rng, n_min, n_max);
    Graph g;
    switch (out.size() % 3) {
      case 0: {
        const std::size_t m = std::min<std::size_t>(sample_m(rng), (n - 2) / 2);
        g = gen_lpa(n, m, uniform_real(rng, 2.0, 4.0), rng);
        break;
      }
      case 1:
        g = gen_er(n, sample_m(rng), rng);
        break;
      default:
        g = largest_component_subgraph(gen_ws(n, 4, 0.1, rng));
        break;
    }
    if (g.num_nodes() >= n_min / 2 && g.num_edges() >= 3) out.push_back(std::move(g));
  }
  return out;
}

void write_manifest_header(std::ostream& out) {
  out << "id,model,n,m,gamma,label_mode,target,achieved,assortativity,modularity\n";
}

void write_manifest_row(std::ostream& out, std::size_t id, const TrainingGraph& tg) {
  const auto flags = out.flags();
  out << std::setprecision(10);
  out << id << ',' << to_string(tg.model) << ',' << tg.graph.num_nodes() << ',' << tg.m << ',';
  if (tg.gamma) out << *tg.gamma;
  out << ',' << (tg.label_mode ? to_string(*tg.label_mode) : "none") << ',';
  if (tg.target) out << *tg.target;
  out << ',';
  if (tg.achieved) out << *tg.achieved;
  out << ',' << degree_assortativity(tg.graph).value << ',' << modularity_report(tg.graph) << '\n';
  out.flags(flags);
}

}  // namespace mind::netgen
