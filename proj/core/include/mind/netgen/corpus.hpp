#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mind/netgen/generators.hpp"
#include "mind/netgen/rewire.hpp"

namespace mind::netgen {

struct CorpusConfig {
  std::size_t n_min = 100;
  std::size_t n_max = 200;
  bool rewire = true;
  double tolerance = 0.02;
  std::size_t max_attempts_per_edge = 100;
};

/// A generated training graph and how it was made.
struct TrainingGraph {
  Graph graph;
  Model model = Model::LPA;
  std::size_t n = 0;  // requested size; ER may keep fewer nodes
  std::size_t m = 0;
  std::optional<double> gamma;
  std::optional<LabelMode> label_mode;
  std::optional<double> target;
  std::optional<double> achieved;
};

/// m is drawn from {1,6,8,10} with probability 1/3, else from {2,3,4,5};
/// uniform within the chosen set.
std::size_t sample_m(Rng& rng);

/// One diversified connected graph: model uniform over LPA/COPY/ER, size
/// uniform in [n_min, n_max], gamma ~ U[2,4], then (if enabled) a coin flip
/// between RANDOM and DEGREE labels and rewiring to a signed target.
TrainingGraph sample_training_graph(Rng& rng, const CorpusConfig& cfg = {});

/// Graph `index` of a corpus is sample_training_graph with an Rng seeded by
/// derive_seed(seed, index), so corpora do not depend on thread count.
TrainingGraph corpus_graph(std::uint64_t seed, std::size_t index, const CorpusConfig& cfg = {});
std::vector<TrainingGraph> make_corpus(std::uint64_t seed, std::size_t count, const CorpusConfig& cfg = {},
                                       unsigned threads = 1);

/// Validation graphs drawn in rotation from LPA, ER and WS (k=4, beta=0.1).
std::vector<Graph> make_validation_set(std::uint64_t seed, std::size_t count, std::size_t n_min,
                                       std::size_t n_max);

/// `id,model,n,m,gamma,label_mode,target,achieved,assortativity,modularity`
void write_manifest_header(std::ostream& out);
void write_manifest_row(std::ostream& out, std::size_t id, const TrainingGraph& tg);

}  // namespace mind::netgen
