#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mind/agent/networks.hpp"
#include "mind/agent/replay.hpp"
#include "mind/diff/adam.hpp"
#include "mind/diff/checkpoint.hpp"

namespace mind::agent {

struct TrainerConfig {
  std::uint64_t total_steps = 200000;
  std::size_t buffer = 100000;
  double lr_q = 3e-4;
  double lr_pi = 3e-4;
  double lr_alpha = 3e-4;
  std::size_t batch = 512;
  std::uint64_t start_learning = 5000;
  double gamma = 0.99;
  std::uint64_t update_every = 1;   // environment steps per Q update
  std::uint64_t policy_every = 4;   // Q updates per policy update
  std::uint64_t target_every = 8000;
  double threshold = 0.1;
  std::uint64_t validate_every = 10000;
  std::size_t validation_size = 20;
  std::size_t validation_n_min = 30;
  std::size_t validation_n_max = 60;
  double init_alpha = 0.2;
  double target_entropy_scale = 0.35;
  std::uint64_t log_every = 1000;
  std::uint64_t checkpoint_every = 0;
  std::uint64_t seed = 0;
  NetworkConfig net;
};

/// Applies `key=value`; unknown keys and malformed values are contract errors.
void apply_override(TrainerConfig& cfg, const std::string& key, const std::string& value);
/// Reads `key=value` lines ('#' comments and blank lines allowed).
void apply_config_file(TrainerConfig& cfg, const std::filesystem::path& path);
/// Resolved configuration as `key=value` lines.
void describe(std::ostream& out, const TrainerConfig& cfg);

struct TrainStats {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  double q_loss = 0, pi_loss = 0, entropy = 0, alpha = 0;
  std::size_t q_updates = 0, pi_updates = 0;
  double validation_auc = -1;  // negative when not validated at this row
};

/// Discrete soft actor-critic over graph states; one learner thread.
class Trainer {
 public:
  Trainer(TrainerConfig cfg, std::vector<Graph> corpus);

  /// Runs until cfg.total_steps. Writes a log row every log_every steps and
  /// at each validation; calls `progress` with the same rows.
  void run(std::ostream* log, const std::function<void(const TrainStats&)>& progress = {},
           const std::filesystem::path& checkpoint = {});

  /// Mean argmax-rollout AUC over the validation graphs.
  double validate() const;
  const std::vector<Graph>& validation_graphs() const { return validation_; }

  void save(const std::filesystem::path& path) const;
  /// Restores parameters, step counter, episode counter and entropy coefficient.
  void load(const std::filesystem::path& path);

  AgentNetworks<float>& networks() { return nets_; }
  const AgentNetworks<float>& networks() const { return nets_; }
  const ReplayBuffer& replay() const { return replay_; }
  const std::vector<Graph>& corpus() const { return corpus_; }
  std::uint64_t step() const { return step_; }
  double alpha() const;
  const TrainerConfig& config() const { return cfg_; }

  static void write_log_header(std::ostream& out);

 private:
  void env_step();
  void learn(TrainStats& acc);
  NodeId choose_action(const Graph& g);

  TrainerConfig cfg_;
  std::vector<Graph> corpus_;
  std::vector<Graph> validation_;
  AgentNetworks<float> nets_;
  diff::Adam<float> opt_q_, opt_pi_;
  diff::Parameter<float> log_alpha_;
  diff::Adam<float> opt_alpha_;
  ReplayBuffer replay_;
  Rng env_rng_, sample_rng_;
  std::uint64_t step_ = 0, episode_ = 0, q_updates_ = 0;
  std::uint32_t current_ = 0;
  Graph state_;
};

/// Writes the networks (including targets), the architecture and counters.
void save_agent(const std::filesystem::path& path, AgentNetworks<float>& nets, const diff::TensorMap& extra = {});
/// Rebuilds networks from a checkpoint, validating every shape.
AgentNetworks<float> load_agent(const std::filesystem::path& path, diff::TensorMap* all = nullptr);

}  // namespace mind::agent
