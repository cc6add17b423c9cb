#include "mind/agent/trainer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "mind/agent/sac.hpp"
#include "mind/dismantler/rollout.hpp"
#include "mind/netgen/corpus.hpp"

namespace mind::agent {

namespace {

template <class Num>
Num parse_number(const std::string& key, const std::string& value) {
  Num out{};
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || p != end) throw ContractError("config: bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ContractError("config: bad boolean '" + value + "' for " + key);
}

std::vector<int> parse_widths(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const int w = parse_number<int>(key, part);
    if (w <= 0) throw ContractError("config: widths must be positive for " + key);
    out.push_back(w);
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void store_architecture(diff::TensorMap& t, const NetworkConfig& net) {
  diff::store_scalar(t, "meta/layers", net.encoder.layers);
  diff::store_scalar(t, "meta/heads", net.encoder.heads);
  diff::store_scalar(t, "meta/features", net.encoder.features);
  diff::store_scalar(t, "meta/attn_hidden", net.encoder.attn_hidden);
  diff::store_scalar(t, "meta/normalize_omni", net.encoder.normalize_omni ? 1 : 0);
  diff::store_scalar(t, "meta/log_profile", net.log_profile ? 1 : 0);
  diff::StoredTensor hidden;
  hidden.dims = {net.decoder_hidden.size()};
  for (int w : net.decoder_hidden) hidden.data.push_back(static_cast<float>(w));
  t["meta/decoder_hidden"] = std::move(hidden);
}

NetworkConfig read_architecture(const diff::TensorMap& t) {
  NetworkConfig net;
  net.encoder.layers = static_cast<int>(diff::restore_scalar(t, "meta/layers"));
  net.encoder.heads = static_cast<int>(diff::restore_scalar(t, "meta/heads"));
  net.encoder.features = static_cast<int>(diff::restore_scalar(t, "meta/features"));
  net.encoder.attn_hidden = static_cast<int>(diff::restore_scalar(t, "meta/attn_hidden"));
  net.encoder.normalize_omni = diff::restore_scalar(t, "meta/normalize_omni") != 0.0;
  net.log_profile = diff::restore_scalar(t, "meta/log_profile") != 0.0;
  auto it = t.find("meta/decoder_hidden");
  if (it == t.end()) throw ParseError("checkpoint: missing meta/decoder_hidden");
  net.decoder_hidden.clear();
  for (float w : it->second.data) net.decoder_hidden.push_back(static_cast<int>(w));
  return net;
}

void store_counter(diff::TensorMap& t, const std::string& name, std::uint64_t v) {
  // f32 storage is exact below 2^24, so counters are split in two halves.
  diff::store_scalar(t, name + "_hi", static_cast<double>(v >> 24));
  diff::store_scalar(t, name + "_lo", static_cast<double>(v & 0xFFFFFF));
}

std::uint64_t restore_counter(const diff::TensorMap& t, const std::string& name) {
  return (static_cast<std::uint64_t>(diff::restore_scalar(t, name + "_hi")) << 24) +
         static_cast<std::uint64_t>(diff::restore_scalar(t, name + "_lo"));
}

void write_optional(std::ostream& out, std::size_t n, double v) {
  if (n > 0) out << v;
}

}  // namespace

void apply_override(TrainerConfig& c, const std::string& key, const std::string& value) {
  using u64 = std::uint64_t;
  if (key == "total_steps") c.total_steps = parse_number<u64>(key, value);
  else if (key == "buffer") c.buffer = parse_number<std::size_t>(key, value);
  else if (key == "lr_q") c.lr_q = parse_number<double>(key, value);
  else if (key == "lr_pi") c.lr_pi = parse_number<double>(key, value);
  else if (key == "lr_alpha") c.lr_alpha = parse_number<double>(key, value);
  else if (key == "batch") c.batch = parse_number<std::size_t>(key, value);
  else if (key == "start_learning") c.start_learning = parse_number<u64>(key, value);
  else if (key == "gamma") c.gamma = parse_number<double>(key, value);
  else if (key == "update_every") c.update_every = parse_number<u64>(key, value);
  else if (key == "policy_every") c.policy_every = parse_number<u64>(key, value);
  else if (key == "target_every") c.target_every = parse_number<u64>(key, value);
  else if (key == "threshold") c.threshold = parse_number<double>(key, value);
  else if (key == "validate_every") c.validate_every = parse_number<u64>(key, value);
  else if (key == "validation_size") c.validation_size = parse_number<std::size_t>(key, value);
  else if (key == "validation_n_min") c.validation_n_min = parse_number<std::size_t>(key, value);
  else if (key == "validation_n_max") c.validation_n_max = parse_number<std::size_t>(key, value);
  else if (key == "init_alpha") c.init_alpha = parse_number<double>(key, value);
  else if (key == "target_entropy_scale") c.target_entropy_scale = parse_number<double>(key, value);
  else if (key == "log_every") c.log_every = parse_number<u64>(key, value);
  else if (key == "checkpoint_every") c.checkpoint_every = parse_number<u64>(key, value);
  else if (key == "seed") c.seed = parse_number<u64>(key, value);
  else if (key == "layers") c.net.encoder.layers = parse_number<int>(key, value);
  else if (key == "heads") c.net.encoder.heads = parse_number<int>(key, value);
  else if (key == "features") c.net.encoder.features = parse_number<int>(key, value);
  else if (key == "attn_hidden") c.net.encoder.attn_hidden = parse_number<int>(key, value);
  else if (key == "normalize_omni") c.net.encoder.normalize_omni = parse_bool(key, value);
  else if (key == "log_profile") c.net.log_profile = parse_bool(key, value);
  else if (key == "decoder_hidden") c.net.decoder_hidden = parse_widths(key, value);
  else throw ContractError("config: unknown key '" + key + "'");
}

void apply_config_file(TrainerConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void describe(std::ostream& out, const TrainerConfig& c) {
  out << "total_steps=" << c.total_steps << "\nbuffer=" << c.buffer << "\nlr_q=" << c.lr_q << "\nlr_pi=" << c.lr_pi
      << "\nlr_alpha=" << c.lr_alpha << "\nbatch=" << c.batch << "\nstart_learning=" << c.start_learning
      << "\ngamma=" << c.gamma << "\nupdate_every=" << c.update_every << "\npolicy_every=" << c.policy_every
      << "\ntarget_every=" << c.target_every << "\nthreshold=" << c.threshold << "\nvalidate_every=" << c.validate_every
      << "\nvalidation_size=" << c.validation_size << "\nvalidation_n_min=" << c.validation_n_min
      << "\nvalidation_n_max=" << c.validation_n_max << "\ninit_alpha=" << c.init_alpha
      << "\ntarget_entropy_scale=" << c.target_entropy_scale << "\nlog_every=" << c.log_every
      << "\ncheckpoint_every=" << c.checkpoint_every << "\nseed=" << c.seed << "\nlayers=" << c.net.encoder.layers
      << "\nheads=" << c.net.encoder.heads << "\nfeatures=" << c.net.encoder.features
      << "\nattn_hidden=" << c.net.encoder.attn_hidden << "\nnormalize_omni=" << (c.net.encoder.normalize_omni ? 1 : 0)
      << "\nlog_profile=" << (c.net.log_profile ? 1 : 0) << "\ndecoder_hidden=" << join(c.net.decoder_hidden) << '\n';
}

Trainer::Trainer(TrainerConfig cfg, std::vector<Graph> corpus)
    : cfg_(std::move(cfg)),
      corpus_(std::move(corpus)),
      nets_(cfg_.net, derive_seed(cfg_.seed, 100)),
      replay_(cfg_.buffer),
      env_rng_(derive_seed(cfg_.seed, 300)),
      sample_rng_(derive_seed(cfg_.seed, 400)) {
  require(!corpus_.empty(), "train: corpus is empty");
  require(cfg_.batch > 0 && cfg_.update_every > 0 && cfg_.policy_every > 0 && cfg_.target_every > 0,
          "train: batch and update intervals must be positive");
  require(cfg_.threshold > 0.0 && cfg_.threshold < 1.0, "train: threshold must lie in (0, 1)");
  require(cfg_.init_alpha > 0.0, "train: init_alpha must be positive");
  for (const Graph& g : corpus_) require(g.num_active() > 0, "train: corpus graph without nodes");
  opt_q_ = diff::Adam<float>(
      [&] {
        auto p = nets_.q1.params();
        auto p2 = nets_.q2.params();
        p.insert(p.end(), p2.begin(), p2.end());
        return p;
      }(),
      {cfg_.lr_q});
  opt_pi_ = diff::Adam<float>(nets_.pi.params(), {cfg_.lr_pi});
  log_alpha_ = {"meta/log_alpha", diff::Matrix<float>::Constant(1, 1, static_cast<float>(std::log(cfg_.init_alpha))), {}};
  log_alpha_.zero_grad();
  opt_alpha_ = diff::Adam<float>({&log_alpha_}, {cfg_.lr_alpha});
  if (cfg_.validation_size > 0)
    validation_ = netgen::make_validation_set(derive_seed(cfg_.seed, 200), cfg_.validation_size,
                                              cfg_.validation_n_min, cfg_.validation_n_max);
}

double Trainer::alpha() const { return std::exp(static_cast<double>(log_alpha_.value(0, 0))); }

void Trainer::write_log_header(std::ostream& out) { out << "step,episode,q_loss,pi_loss,entropy,validation_auc\n"; }

NodeId Trainer::choose_action(const Graph& g) {
  if (step_ < cfg_.start_learning) {
    const auto nodes = g.active_nodes();
    return nodes[uniform_int<std::size_t>(env_rng_, 0, nodes.size() - 1)];
  }
  const encoder::GraphBatch b = encoder::make_batch(g, cfg_.net.encoder.normalize_omni);
  const diff::Matrix<float> logits = nets_.pi.apply(b);
  // Gumbel-max: one sample from softmax(logits).
  double best = -std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::uint32_t r = 0; r < b.num_nodes; ++r) {
    const double k = logits(r, 0) - std::log(-std::log(uniform_real(env_rng_, 1e-300, 1.0)));
    if (k > best) {
      best = k;
      arg = r;
    }
  }
  return b.node_ids[arg];
}

void Trainer::env_step() {
  if (state_.num_nodes() == 0) {
    current_ = static_cast<std::uint32_t>(uniform_int<std::size_t>(env_rng_, 0, corpus_.size() - 1));
    state_ = corpus_[current_];
    ++episode_;
  }
  Transition t;
  t.graph = current_;
  t.mask = NodeMask(state_);
  t.action = choose_action(state_);
  state_.remove_node(t.action);
  const double frac = lcc_fraction(state_, corpus_[current_].num_active());
  t.reward = static_cast<float>(-frac);
  t.terminal = frac < cfg_.threshold;
  replay_.push(std::move(t));
  if (frac < cfg_.threshold) state_ = Graph();
}

void Trainer::learn(TrainStats& acc) {
  if (replay_.size() < cfg_.batch) return;
  const auto idx = replay_.sample(cfg_.batch, sample_rng_);
  const SacBatch b = make_sac_batch(replay_, idx, corpus_, cfg_.net.encoder.normalize_omni);
  const double alpha = this->alpha();
  const std::vector<double> y = q_targets(nets_, b, alpha, cfg_.gamma);

  diff::Tape<float> tape;
  auto l1 = q_loss(tape, nets_.q1, b, y);
  auto l2 = q_loss(tape, nets_.q2, b, y);
  auto total = add(l1, l2);
  const double ql = total.value()(0, 0);
  if (!std::isfinite(ql)) {
    std::ostringstream msg;
    msg << "non-finite Q loss at step " << step_ << " (alpha=" << alpha << ", batch=" << b.size() << ", targets:";
    for (std::size_t i = 0; i < std::min<std::size_t>(y.size(), 8); ++i) msg << ' ' << y[i];
    msg << ")";
    throw std::runtime_error(msg.str());
  }
  tape.backward(total);
  opt_q_.step();
  ++q_updates_;
  acc.q_loss += ql;
  ++acc.q_updates;

  if (q_updates_ % cfg_.policy_every != 0) return;
  const diff::Matrix<float> min_q = nets_.q1.apply(b.states).cwiseMin(nets_.q2.apply(b.states));
  diff::Tape<float> ptape;
  auto pl = policy_loss(ptape, nets_.pi, b, min_q, alpha);
  const double pv = pl.loss.value()(0, 0);
  if (!std::isfinite(pv)) throw std::runtime_error("non-finite policy loss at step " + std::to_string(step_));
  ptape.backward(pl.loss);
  opt_pi_.step();
  log_alpha_.grad(0, 0) = static_cast<float>(alpha_gradient(pl.entropy, b.states, cfg_.target_entropy_scale));
  opt_alpha_.step();
  double h = 0.0;
  for (double e : pl.entropy) h += e;
  acc.pi_loss += pv;
  acc.entropy += h / static_cast<double>(pl.entropy.size());
  ++acc.pi_updates;
}

double Trainer::validate() const {
  if (validation_.empty()) return 0.0;
  dismantler::RolloutConfig rc;
  rc.threshold = cfg_.threshold;
  rc.mode = dismantler::RolloutMode::Argmax;
  rc.normalize_omni = cfg_.net.encoder.normalize_omni;
  double total = 0.0;
  for (const Graph& g : validation_) total += dismantler::rollout(g, nets_.pi, rc).auc;
  return total / static_cast<double>(validation_.size());
}

void Trainer::run(std::ostream* log, const std::function<void(const TrainStats&)>& progress,
                  const std::filesystem::path& checkpoint) {
  TrainStats acc;
  auto emit = [&](double val) {
    acc.step = step_;
    acc.episode = episode_;
    acc.alpha = alpha();
    acc.validation_auc = val;
    if (acc.q_updates) acc.q_loss /= static_cast<double>(acc.q_updates);
    if (acc.pi_updates) {
      acc.pi_loss /= static_cast<double>(acc.pi_updates);
      acc.entropy /= static_cast<double>(acc.pi_updates);
    }
    if (log) {
      *log << std::setprecision(8) << step_ << ',' << episode_ << ',';
      write_optional(*log, acc.q_updates, acc.q_loss);
      *log << ',';
      write_optional(*log, acc.pi_updates, acc.pi_loss);
      *log << ',';
      write_optional(*log, acc.pi_updates, acc.entropy);
      *log << ',';
      if (val >= 0) *log << val;
      *log << '\n' << std::flush;
    }
    if (progress) progress(acc);
    acc = TrainStats{};
  };

  if (step_ == 0 && cfg_.validate_every > 0 && !validation_.empty()) emit(validate());
  while (step_ < cfg_.total_steps) {
    env_step();
    ++step_;
    if (step_ > cfg_.start_learning && step_ % cfg_.update_every == 0) learn(acc);
    if (step_ > cfg_.start_learning && step_ % cfg_.target_every == 0) nets_.sync_targets();
    const bool validate_now = cfg_.validate_every > 0 && step_ % cfg_.validate_every == 0 && !validation_.empty();
    if (validate_now || (cfg_.log_every > 0 && step_ % cfg_.log_every == 0)) emit(validate_now ? validate() : -1.0);
    if (!checkpoint.empty() && cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0) save(checkpoint);
  }
  if (!checkpoint.empty()) save(checkpoint);
}

void Trainer::save(const std::filesystem::path& path) const {
  diff::TensorMap extra;
  store_counter(extra, "meta/step", step_);
  store_counter(extra, "meta/episode", episode_);
  store_counter(extra, "meta/q_updates", q_updates_);
  diff::store_scalar(extra, "meta/log_alpha", log_alpha_.value(0, 0));
  save_agent(path, const_cast<AgentNetworks<float>&>(nets_), extra);
}

void Trainer::load(const std::filesystem::path& path) {
  diff::TensorMap all;
  AgentNetworks<float> loaded = load_agent(path, &all);
  require(loaded.config.decoder_hidden == cfg_.net.decoder_hidden &&
              loaded.config.encoder.layers == cfg_.net.encoder.layers &&
              loaded.config.encoder.heads == cfg_.net.encoder.heads &&
              loaded.config.encoder.features == cfg_.net.encoder.features &&
              loaded.config.encoder.attn_hidden == cfg_.net.encoder.attn_hidden,
          "train: checkpoint architecture differs from the configuration");
  diff::copy_values(nets_.all_params(), loaded.all_params());
  step_ = restore_counter(all, "meta/step");
  episode_ = restore_counter(all, "meta/episode");
  q_updates_ = restore_counter(all, "meta/q_updates");
  log_alpha_.value(0, 0) = static_cast<float>(diff::restore_scalar(all, "meta/log_alpha"));
}

void save_agent(const std::filesystem::path& path, AgentNetworks<float>& nets, const diff::TensorMap& extra) {
  diff::TensorMap t = extra;
  store_architecture(t, nets.config);
  diff::store_params(t, nets.all_params());
  diff::save_checkpoint(path, t);
}

AgentNetworks<float> load_agent(const std::filesystem::path& path, diff::TensorMap* all) {
  diff::TensorMap t = diff::load_checkpoint(path);
  const NetworkConfig net = read_architecture(t);
  require(net.encoder.layers > 0 && net.encoder.heads > 0 && net.encoder.features > 0 && net.encoder.attn_hidden > 0,
          "checkpoint: invalid architecture");
  AgentNetworks<float> nets(net, 0);
  diff::restore_params(t, nets.all_params());
  if (all) *all = std::move(t);
  return nets;
}

}  // namespace mind::agent
