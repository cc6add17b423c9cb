#include "mind/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mind/agent/sac.hpp"
#include "mind/encoder/reference.hpp"
#include "mind/graph/curve.hpp"
#include "mind/netgen/generators.hpp"

namespace mind {

namespace {

bool check_auc_oracle(Rng& rng, std::ostream& out) {
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = uniform_int<std::size_t>(rng, 2, 40);
    const Graph g = netgen::gen_gnp(n, uniform_real(rng, 0.02, 0.3), rng);
    std::vector<NodeId> order = g.active_nodes();
    std::shuffle(order.begin(), order.end(), rng);
    const DismantlingCurve c = auc_for_order(g, order, 0.0);
    Graph cur = g;
    for (std::size_t i = 0; i < order.size(); ++i) {
      cur.remove_node(order[i]);
      if (lcc_fraction(cur, n) != c.lcc_fractions[i]) ++mismatches;
    }
  }
  out << (mismatches == 0 ? "PASS" : "FAIL") << "  auc oracle: " << mismatches << " mismatched steps over 20 graphs\n";
  return mismatches == 0;
}

bool check_gradients(Rng& rng, std::ostream& out) {
  agent::NetworkConfig cfg;
  cfg.encoder.layers = 2;
  cfg.decoder_hidden = {8};
  agent::AgentNetworks<double> nets(cfg, rng());
  const Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 3}});
  agent::ReplayBuffer buf(4);
  for (NodeId a : {1u, 3u}) buf.push({0, agent::NodeMask(g), a, -0.8f, false});
  const std::vector<Graph> corpus{g};
  const std::vector<std::size_t> idx{0, 1};
  const auto batch = agent::make_sac_batch(buf, idx, corpus, true);
  const std::vector<double> y{-0.5, 0.25};

  auto loss = [&] {
    diff::Tape<double> t(false);
    return agent::q_loss(t, nets.q1, batch, y).value()(0, 0);
  };
  auto params = nets.q1.params();
  for (auto* p : params) p->zero_grad();
  {
    diff::Tape<double> t;
    auto l = agent::q_loss(t, nets.q1, batch, y);
    t.backward(l);
  }
  int bad = 0, checked = 0;
  for (int k = 0; k < 60; ++k) {
    auto* p = params[uniform_int<std::size_t>(rng, 0, params.size() - 1)];
    const auto i = uniform_int<Eigen::Index>(rng, 0, p->value.size() - 1);
    double& w = p->value.data()[i];
    const double keep = w, h = 1e-4;
    w = keep + h;
    const double up = loss();
    w = keep - h;
    const double down = loss();
    w = keep;
    const double num = (up - down) / (2 * h), ana = p->grad.data()[i];
    const double rel = std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-6});
    ++checked;
    if (rel > 1e-4) ++bad;
  }
  out << (bad == 0 ? "PASS" : "FAIL") << "  gradient check: " << bad << " of " << checked
      << " sampled parameters outside 1e-4 relative error\n";
  return bad == 0;
}

bool check_softmax_collapse(Rng& rng, std::ostream& out) {
  const Graph star = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  encoder::SoftmaxAttentionReference ref(6, 4, 4, rng);
  const Eigen::MatrixXd rp = ref.apply(star);
  double ref_var = 0.0;
  for (int k = 0; k < 6; ++k) ref_var = std::max(ref_var, encoder::between_row_variance(rp.middleCols(k * 16, 16), rp.rows()));
  encoder::Encoder<double> enc("enc", {}, rng);
  const auto b = encoder::make_batch(star);
  const Eigen::MatrixXd mp = enc.apply(b);
  const double am_var = encoder::between_row_variance(mp, b.num_nodes);
  const bool ok = ref_var < 1e-12 && am_var > 1e-6;
  out << (ok ? "PASS" : "FAIL") << "  softmax collapse: reference variance " << ref_var << ", sigmoid attention variance "
      << am_var << "\n";
  return ok;
}

}  // namespace

int run_selfcheck(std::ostream& out, unsigned long long seed) {
  Rng rng(seed);
  int failures = 0;
  failures += !check_auc_oracle(rng, out);
  failures += !check_gradients(rng, out);
  failures += !check_softmax_collapse(rng, out);
  return failures;
}

}  // namespace mind
