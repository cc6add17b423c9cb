#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "mind/graph/graph.hpp"
#include "mind/random.hpp"

namespace mind::netgen {

enum class Model { LPA, COPY, ER, WS };

std::string_view to_string(Model m);
Model parse_model(std::string_view s);

/// Generator parameters. `m` is the attachment count (LPA, COPY), the density
/// parameter of the ER edge probability, and the ring degree for WS.
struct GenSpec {
  Model model = Model::LPA;
  std::size_t n = 100;
  std::size_t m = 2;
  double gamma = 3.0;
  double beta = 0.1;  // WS only
  std::uint64_t seed = 0;
};

/// Weight floor for low-degree nodes when gamma < 3 pushes d + m(gamma-3) to <= 0.
inline constexpr double kLpaWeightFloor = 1e-6;

/// Linear preferential attachment from an (m+1)-clique; each new node links
/// to m distinct nodes drawn with weight max(d_i + m(gamma-3), floor).
Graph gen_lpa(std::size_t n, std::size_t m, double gamma, Rng& rng);

/// Uniform-attachment probability of the copying model, (2-gamma)/(1-gamma).
double copying_alpha(double gamma);

/// Copying model from an (m+1)-clique: each of m links goes to a uniform node
/// with probability alpha, otherwise to a uniform neighbor of a uniform node.
/// Duplicate targets are re-drawn.
Graph gen_copying(std::size_t n, std::size_t m, double gamma, Rng& rng);

/// p = [2N - (m+1)] m / (N (N-1)).
double er_edge_probability(std::size_t n, std::size_t m);

/// G(N, p) with the probability above. With keep_lcc only the largest
/// component is returned, re-compacted.
Graph gen_er(std::size_t n, std::size_t m, Rng& rng, bool keep_lcc = true);

/// Plain G(n, p) by geometric skipping, O(n + |E|).
Graph gen_gnp(std::size_t n, double p, Rng& rng);

/// G(n, m): exactly m distinct uniformly random edges.
Graph gen_gnm(std::size_t n, std::size_t m, Rng& rng);

/// Watts-Strogatz: ring lattice of even degree k, each lattice edge rewired
/// with probability beta to a uniform endpoint avoiding loops and duplicates.
Graph gen_ws(std::size_t n, std::size_t k, double beta, Rng& rng);

/// Dispatches on spec.model with an Rng seeded from spec.seed.
Graph generate(const GenSpec& spec);

}  // namespace mind::netgen
