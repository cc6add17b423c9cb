// mind: generate training graphs, train the dismantling agent, dismantle
// graphs with a checkpoint or a baseline, and score the resulting curves.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "mind/agent/trainer.hpp"
#include "mind/dismantler/baselines.hpp"
#include "mind/dismantler/report.hpp"
#include "mind/dismantler/rollout.hpp"
#include "mind/encoder/spectral.hpp"
#include "mind/graph/curve.hpp"
#include "mind/graph/io.hpp"
#include "mind/netgen/corpus.hpp"
#include "mind/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace mind;

namespace {

struct Global {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool quiet = false;
};

void print_config(const Global& g, const std::string& cmd, const std::vector<std::pair<std::string, std::string>>& kv) {
  if (g.quiet) return;
  std::cerr << "# mind " << cmd << " seed=" << g.seed << " threads=" << g.threads;
  for (const auto& [k, v] : kv) std::cerr << ' ' << k << '=' << v;
  std::cerr << '\n';
}

template <class V>
std::string str(const V& v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::vector<fs::path> edge_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("data directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".edges") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ContractError("no .edges files in " + dir.string());
  return files;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::size_t count = 0;
  std::string out;
  std::string rewire = "on";
  std::string manifest;
  std::size_t n_min = 100, n_max = 200;
};

int cmd_generate(const Global& g, const GenerateArgs& a) {
  require(a.count > 0, "generate: --count must be positive");
  require(a.n_min >= 10 && a.n_min <= a.n_max, "generate: need 10 <= --n-min <= --n-max");
  netgen::CorpusConfig cfg;
  cfg.n_min = a.n_min;
  cfg.n_max = a.n_max;
  cfg.rewire = a.rewire == "on";
  print_config(g, "generate", {{"count", str(a.count)}, {"out", a.out}, {"rewire", a.rewire},
                               {"n_min", str(a.n_min)}, {"n_max", str(a.n_max)}});
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());
  const auto corpus = netgen::make_corpus(g.seed, a.count, cfg, g.threads);
  const fs::path manifest = a.manifest.empty() ? fs::path(a.out) / "manifest.csv" : fs::path(a.manifest);
  std::ofstream mf(manifest);
  if (!mf) throw IoError("cannot open " + manifest.string() + " for writing");
  netgen::write_manifest_header(mf);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::ostringstream name;
    name << "graph_" << std::setw(5) << std::setfill('0') << i << ".edges";
    write_edge_list((fs::path(a.out) / name.str()).string(), corpus[i].graph);
    netgen::write_manifest_row(mf, i, corpus[i]);
  }
  if (!mf) throw IoError("failed writing " + manifest.string());
  if (!g.quiet) std::cerr << "wrote " << corpus.size() << " graphs to " << a.out << '\n';
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data, out, config, log;
  std::uint64_t steps = 0;
  std::uint64_t validate_every = 0;
  std::vector<std::string> sets;
  bool resume = false;
};

int cmd_train(const Global& g, const TrainArgs& a) {
  agent::TrainerConfig cfg;
  if (!a.config.empty()) agent::apply_config_file(cfg, a.config);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, "train: --set expects key=value, got '" + kv + "'");
    agent::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.steps) cfg.total_steps = a.steps;
  if (a.validate_every) cfg.validate_every = a.validate_every;
  cfg.seed = g.seed;

  std::vector<Graph> corpus;
  for (const auto& f : edge_files(a.data)) corpus.push_back(load_edge_list(f.string()).graph);

  if (!g.quiet) {
    std::cerr << "# mind train data=" << a.data << " graphs=" << corpus.size() << " out=" << a.out << '\n';
    std::ostringstream d;
    agent::describe(d, cfg);
    std::string line;
    std::istringstream in(d.str());
    while (std::getline(in, line)) std::cerr << "#   " << line << '\n';
  }
  agent::Trainer trainer(cfg, std::move(corpus));
  if (a.resume && fs::exists(a.out)) {
    trainer.load(a.out);
    if (!g.quiet) std::cerr << "resumed at step " << trainer.step() << '\n';
  }
  const std::string log_path = a.log.empty() ? a.out + ".log.csv" : a.log;
  const bool append = a.resume && trainer.step() > 0 && fs::exists(log_path);
  std::ofstream log(log_path, append ? std::ios::app : std::ios::trunc);
  if (!log) throw IoError("cannot open " + log_path + " for writing");
  if (!append) agent::Trainer::write_log_header(log);
  trainer.run(&log,
              [&](const agent::TrainStats& s) {
                if (g.quiet) return;
                std::cerr << "step " << s.step << " episode " << s.episode << " q_loss " << s.q_loss << " pi_loss "
                          << s.pi_loss << " entropy " << s.entropy << " alpha " << s.alpha;
                if (s.validation_auc >= 0) std::cerr << " validation_auc " << s.validation_auc;
                std::cerr << '\n';
              },
              a.out);
  return 0;
}

// --------------------------------------------------------------- dismantle

struct DismantleArgs {
  std::string graph, model, out;
  double threshold = 0.1;
  double batch_frac = 0.0;
  std::string mode = "argmax";
};

void emit_curve(const std::string& out, const DismantlingCurve& c, const EdgeListFile& f, bool quiet) {
  if (out.empty() || out == "-")
    write_curve_csv(std::cout, c, f.original_ids);
  else
    write_curve_csv(out, c, f.original_ids);
  if (!quiet) std::cerr << "removed " << c.size() << " of " << c.n0 << " nodes, auc " << c.auc << '\n';
}

int cmd_dismantle(const Global& g, const DismantleArgs& a) {
  print_config(g, "dismantle", {{"graph", a.graph}, {"model", a.model}, {"threshold", str(a.threshold)},
                                {"batch_frac", str(a.batch_frac)}, {"mode", a.mode}});
  const EdgeListFile f = load_edge_list(a.graph);
  const auto nets = agent::load_agent(a.model);
  dismantler::RolloutConfig rc;
  rc.threshold = a.threshold;
  rc.batch_frac = a.batch_frac;
  rc.mode = a.mode == "sample" ? dismantler::RolloutMode::Sample : dismantler::RolloutMode::Argmax;
  rc.seed = g.seed;
  rc.normalize_omni = nets.config.encoder.normalize_omni;
  emit_curve(a.out, dismantler::rollout(f.graph, nets.pi, rc), f, g.quiet);
  return 0;
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
  std::string graph, method = "ad", out;
  double threshold = 0.1;
};

int cmd_baseline(const Global& g, const BaselineArgs& a) {
  const auto method = dismantler::parse_baseline(a.method);
  print_config(g, "baseline", {{"graph", a.graph}, {"method", a.method}, {"threshold", str(a.threshold)}});
  require(a.threshold >= 0.0 && a.threshold <= 1.0, "baseline: --threshold must lie in [0, 1]");
  const EdgeListFile f = load_edge_list(a.graph);
  emit_curve(a.out, dismantler::run_baseline(method, f.graph, a.threshold, g.seed), f, g.quiet);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::vector<std::string> curves;
  std::string reference;
  double threshold = -1.0;
  bool table = false;
};

int cmd_evaluate(const Global& g, const EvaluateArgs& a) {
  require(!a.curves.empty(), "evaluate: no curve files given");
  print_config(g, "evaluate", {{"curves", str(a.curves.size())}, {"reference", a.reference},
                               {"threshold", a.threshold < 0 ? std::string("recorded") : str(a.threshold)}});
  std::vector<dismantler::ReportRow> rows;
  std::map<std::string, double> aucs;
  for (const auto& path : a.curves) {
    const CurveFile c = read_curve_csv(path);
    dismantler::ReportRow r;
    r.method = fs::path(path).stem().string();
    require(!aucs.count(r.method), "evaluate: duplicate method name '" + r.method + "'");
    r.auc = a.threshold < 0 ? c.auc : thresholded_auc(c.lcc_fractions, a.threshold).first;
    r.full_auc = thresholded_auc(c.lcc_fractions, 0.0).first;
    aucs[r.method] = r.auc;
    rows.push_back(r);
  }
  const std::string ref = a.reference.empty() ? rows.front().method : a.reference;
  const auto rel = dismantler::relative_auc(aucs, ref);
  for (auto& r : rows) r.relative = rel.at(r.method);
  if (a.table)
    dismantler::write_table(std::cout, rows, ref, a.threshold < 0 ? 0.1 : a.threshold);
  else
    dismantler::write_evaluation_csv(std::cout, rows);
  return 0;
}

// ---------------------------------------------------------------- spectral

struct SpectralArgs {
  std::string graph;
  int iters = 500;
};

int cmd_spectral(const Global& g, const SpectralArgs& a) {
  print_config(g, "spectral", {{"graph", a.graph}, {"iters", str(a.iters)}});
  const EdgeListFile f = load_edge_list(a.graph);
  const auto est = encoder::fiedler_estimate(f.graph, a.iters);
  const Eigen::VectorXd oracle = encoder::fiedler_vector(f.graph);
  // Orient the oracle like the estimate so the columns are comparable.
  const double sign = est.vector.dot(oracle) < 0 ? -1.0 : 1.0;
  const double cosine = encoder::abs_cosine(est.vector, oracle);
  std::cout << "node,estimate,oracle,cosine\n" << std::setprecision(12);
  for (std::size_t i = 0; i < est.nodes.size(); ++i)
    std::cout << f.original_ids[est.nodes[i]] << ',' << est.vector(static_cast<Eigen::Index>(i)) << ','
              << sign * oracle(static_cast<Eigen::Index>(i)) << ',' << cosine << '\n';
  if (!g.quiet) {
    std::cerr << "cosine " << cosine << " residual_ratio " << est.residual_ratio;
    if (est.degenerate) std::cerr << " (degenerate: the all-ones start has no Fiedler component)";
    if (est.bipartite) std::cerr << " (bipartite: convergence not guaranteed)";
    std::cerr << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned network dismantling: training graphs, agent training, dismantling and evaluation."};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for generation")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress and configuration output");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a diversified training corpus of edge lists plus a manifest");
  gen->add_option("--count", ga.count, "Number of graphs")->required();
  gen->add_option("--out", ga.out, "Output directory")->required();
  gen->add_option("--rewire", ga.rewire, "Degree-preserving rewiring")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  gen->add_option("--manifest", ga.manifest, "Manifest CSV path (default: <out>/manifest.csv)");
  gen->add_option("--n-min", ga.n_min, "Smallest graph size")->capture_default_str();
  gen->add_option("--n-max", ga.n_max, "Largest graph size")->capture_default_str();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train the agent with discrete soft actor-critic");
  train->add_option("--data", ta.data, "Directory of .edges training graphs")->required();
  train->add_option("--out", ta.out, "Checkpoint path")->required();
  train->add_option("--steps", ta.steps, "Total environment steps (overrides the config)");
  train->add_option("--config", ta.config, "key=value configuration file");
  train->add_option("--set", ta.sets, "Configuration override key=value (repeatable)");
  train->add_option("--validate-every", ta.validate_every, "Validation interval in steps");
  train->add_option("--log", ta.log, "Training log CSV (default: <out>.log.csv)");
  train->add_flag("--resume", ta.resume, "Continue from an existing checkpoint at --out");

  DismantleArgs da;
  auto* dis = app.add_subcommand("dismantle", "Dismantle a graph with a trained checkpoint");
  dis->add_option("--graph", da.graph, "Edge list")->required();
  dis->add_option("--model", da.model, "Checkpoint")->required();
  dis->add_option("--out", da.out, "Curve CSV (default: stdout)");
  dis->add_option("--threshold", da.threshold, "Stop once the LCC fraction falls below this")->capture_default_str();
  dis->add_option("--batch-frac", da.batch_frac, "Fraction removed per forward pass (0: automatic)")->capture_default_str();
  dis->add_option("--mode", da.mode, "Node selection")->check(CLI::IsMember({"argmax", "sample"}))->capture_default_str();

  BaselineArgs ba;
  auto* base = app.add_subcommand("baseline", "Dismantle a graph with a heuristic");
  base->add_option("--graph", ba.graph, "Edge list")->required();
  base->add_option("--method", ba.method, "ad, pr, bc or random")->capture_default_str();
  base->add_option("--out", ba.out, "Curve CSV (default: stdout)");
  base->add_option("--threshold", ba.threshold, "Stop once the LCC fraction falls below this")->capture_default_str();

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Compare curve files; prints method,auc,relative_auc");
  eval->add_option("curves", ea.curves, "Curve CSV files (method name = file stem)")->required();
  eval->add_option("--reference", ea.reference, "Method normalized to 100 (default: first file)");
  eval->add_option("--threshold", ea.threshold, "Re-score recorded fractions at this threshold");
  eval->add_flag("--table", ea.table, "Print a fixed-width table instead of CSV");

  SpectralArgs sa;
  auto* spec = app.add_subcommand("spectral", "Fiedler vector estimate by power iteration, with the dense oracle");
  spec->add_option("--graph", sa.graph, "Edge list of a connected graph")->required();
  spec->add_option("--iters", sa.iters, "Power iterations")->capture_default_str();

  auto* self = app.add_subcommand("selfcheck", "Run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return cmd_generate(g, ga);
    if (*train) return cmd_train(g, ta);
    if (*dis) return cmd_dismantle(g, da);
    if (*base) return cmd_baseline(g, ba);
    if (*eval) return cmd_evaluate(g, ea);
    if (*spec) return cmd_spectral(g, sa);
    if (*self) {
      print_config(g, "selfcheck", {});
      return run_selfcheck(std::cout, g.seed) == 0 ? 0 : 1;
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
