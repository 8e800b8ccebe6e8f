#include "deal/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "deal/checkpoint.hpp"
#include "deal/error.hpp"

namespace deal {

namespace {

namespace fs = std::filesystem;

std::string out_dir(const RunConfig& config) {
  const std::string dir = config.get_string("out");
  if (dir.empty()) throw ConfigError("config: out directory must not be empty");
  fs::create_directories(dir);
  return dir;
}

void write_echo(const RunConfig& config, const std::string& dir) {
  std::ofstream out(dir + "/effective_config.txt");
  if (!out) throw IoError("cannot write effective config in " + dir);
  out << config.echo();
}

AttributedGraph load_configured_graph(const RunConfig& config) {
  const std::string edges = config.get_string("data.edges");
  const std::string features = config.get_string("data.features");
  if (edges.empty() || features.empty())
    throw ConfigError("config: data.edges and data.features must be set");
  LoadWarnings warnings;
  AttributedGraph graph = load_graph_files(edges, features, &warnings);
  if (warnings.self_loops_dropped || warnings.duplicate_edges_dropped) {
    std::cerr << "load_graph: dropped " << warnings.self_loops_dropped << " self-loops, "
              << warnings.duplicate_edges_dropped << " duplicate edges\n";
  }
  return normalize_features(graph, config.feature_norm());
}

std::string split_path(const RunConfig& config, const std::string& dir) {
  const std::string path = config.get_string("split.path");
  return path.empty() ? dir + "/split.txt" : path;
}

std::string checkpoint_path(const RunConfig& config, const std::string& dir) {
  const std::string path = config.get_string("model.checkpoint");
  return path.empty() ? dir + "/checkpoint.txt" : path;
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_train_report(const std::string& path, const std::vector<EpochLog>& curve,
                        const std::string& error_line = "") {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write run report: " + path);
  out << "epoch,mean_train_loss,val_auc,val_ap,snapshot_taken\n";
  for (const auto& log : curve) {
    out << log.epoch << ',' << fmt(log.mean_train_loss, "%.9g") << ',';
    if (std::isfinite(log.val_auc)) out << fmt(log.val_auc);
    out << ',';
    if (std::isfinite(log.val_ap)) out << fmt(log.val_ap);
    out << ',' << (log.snapshot_taken ? 1 : 0) << '\n';
  }
  if (!error_line.empty()) out << "error,\"" << error_line << "\"\n";
}

void write_metrics_report(const std::string& path, const Metrics& metrics) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics report: " + path);
  out << "trial,auc,ap\n";
  for (std::size_t t = 0; t < metrics.trials.size(); ++t)
    out << t << ',' << fmt(metrics.trials[t].auc) << ',' << fmt(metrics.trials[t].ap) << '\n';
  out << "mean," << fmt(metrics.auc_mean) << ',' << fmt(metrics.ap_mean) << '\n';
  out << "stddev," << fmt(metrics.auc_stddev) << ',' << fmt(metrics.ap_stddev) << '\n';
}

}  // namespace

int cmd_split(const RunConfig& config) {
  const std::string dir = out_dir(config);
  write_echo(config, dir);
  const AttributedGraph graph = load_configured_graph(config);
  const SplitSpec split = make_split(graph, config.split_recipe(), config.get_u64("seed"));
  validate_split(split, graph);
  write_split_file(split, split_path(config, dir));
  std::cout << "split: " << split.train_edges.size() << " train, " << split.val_pos.size()
            << " val, " << split.test_pos.size() << " test positives -> "
            << split_path(config, dir) << '\n';
  return 0;
}

int cmd_train(const RunConfig& config) {
  const std::string dir = out_dir(config);
  write_echo(config, dir);
  const AttributedGraph graph = load_configured_graph(config);
  const std::string split_file = split_path(config, dir);
  if (!fs::exists(split_file)) throw IoError("split file not found: " + split_file);
  const SplitSpec split = read_split_file(split_file);

  const TrainConfig cfg = config.train_config();
  TrainedModel model;
  try {
    model = train(graph, split, cfg);
  } catch (const ValidationError& e) {
    write_train_report(dir + "/train_log.csv", {}, e.what());
    throw;
  }

  write_checkpoint_file({model.params, model.hp}, dir + "/checkpoint.txt");
  write_train_report(dir + "/train_log.csv", model.curve);
  std::cout << "train: best validation auc " << fmt(model.best_val_auc) << " (epoch "
            << model.best_epoch << ") -> " << dir << "/checkpoint.txt\n";
  return 0;
}

int cmd_eval(const RunConfig& config) {
  const std::string dir = out_dir(config);
  write_echo(config, dir);
  const AttributedGraph graph = load_configured_graph(config);
  const std::array<double, 3> lambda = config.hyper_params().lambda;

  Metrics metrics;
  if (config.is_set("model.checkpoint")) {
    const Checkpoint ckpt = read_checkpoint_file(config.get_string("model.checkpoint"));
    const std::string split_file = split_path(config, dir);
    if (!fs::exists(split_file)) throw IoError("split file not found: " + split_file);
    const SplitSpec split = read_split_file(split_file);
    const EvalSet set = config.get_string("eval.set") == "val" ? EvalSet::val : EvalSet::test;
    metrics = aggregate_trials({evaluate(ckpt.params, graph, split, lambda, set)});
  } else {
    metrics = run_trials(graph, config.split_recipe(), config.train_config(),
                         config.get_int("eval.trials"), config.get_u64("seed"));
  }
  write_metrics_report(dir + "/metrics.csv", metrics);
  std::cout << "eval: auc " << fmt(metrics.auc_mean) << " +/- " << fmt(metrics.auc_stddev)
            << ", ap " << fmt(metrics.ap_mean) << " +/- " << fmt(metrics.ap_stddev) << " ("
            << metrics.trials.size() << " trials) -> " << dir << "/metrics.csv\n";
  return 0;
}

namespace {

struct SweepAxis {
  std::string key;                  // config key the axis overrides
  std::vector<std::string> values;  // raw strings written into the config
};

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> overrides;
  double val_auc = 0.0, val_ap = 0.0;
};

// Mean validation metrics over sweep.trials runs with shared per-trial
// seeds, so every grid point sees identical splits.
void run_sweep_point(const RunConfig& base, const AttributedGraph& graph, SweepPoint& point,
                     int trials, std::uint64_t base_seed) {
  RunConfig config = base;
  for (const auto& [key, value] : point.overrides) {
    if (key == "loss.gamma") {
      config.set("loss.gamma1", value);
      config.set("loss.gamma2", value);
    } else if (key == "loss.b") {
      config.set("loss.b1", value);
      config.set("loss.b2", value);
    } else {
      config.set(key, value);
    }
  }
  const TrainConfig cfg = config.train_config();
  double auc_sum = 0.0, ap_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed_t = base_seed + static_cast<std::uint64_t>(t);
    const SplitSpec split = make_split(graph, config.split_recipe(), seed_t);
    TrainConfig trial_cfg = cfg;
    trial_cfg.seed = seed_t;
    const TrainedModel model = train(graph, split, trial_cfg);
    const TrialMetrics val = evaluate(model, graph, split, cfg.hp.lambda, EvalSet::val);
    auc_sum += val.auc;
    ap_sum += val.ap;
  }
  point.val_auc = auc_sum / trials;
  point.val_ap = ap_sum / trials;
}

}  // namespace

int cmd_sweep(const RunConfig& config) {
  const std::string dir = out_dir(config);
  write_echo(config, dir);

  std::vector<SweepAxis> axes;
  auto add_axis = [&](const std::string& sweep_key, const std::string& target_key) {
    const auto values = config.get_string_list(sweep_key);
    if (!values.empty()) axes.push_back({target_key, values});
  };
  add_axis("sweep.gamma", "loss.gamma");  // sets both branches
  add_axis("sweep.gamma1", "loss.gamma1");
  add_axis("sweep.gamma2", "loss.gamma2");
  add_axis("sweep.b", "loss.b");
  add_axis("sweep.b1", "loss.b1");
  add_axis("sweep.b2", "loss.b2");
  add_axis("sweep.beta", "loss.beta");
  add_axis("sweep.theta", "loss.theta");
  add_axis("sweep.lambda", "eval.lambda");
  add_axis("sweep.align", "loss.align");
  if (axes.empty()) throw ArgumentError("sweep: no sweep.* keys define a grid");

  std::size_t grid_size = 1;
  for (const auto& axis : axes) grid_size *= axis.values.size();

  std::vector<SweepPoint> points(grid_size);
  for (std::size_t p = 0; p < grid_size; ++p) {
    std::size_t rest = p;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {  // last axis fastest
      points[p].overrides.emplace_back(it->key, it->values[rest % it->values.size()]);
      rest /= it->values.size();
    }
    std::reverse(points[p].overrides.begin(), points[p].overrides.end());
  }

  const AttributedGraph graph = load_configured_graph(config);
  const int trials = std::max(1, config.get_int("sweep.trials"));
  const std::uint64_t base_seed = config.get_u64("seed");
  const int jobs = std::max(1, config.get_int("sweep.jobs"));

  if (jobs == 1) {
    for (auto& point : points) run_sweep_point(config, graph, point, trials, base_seed);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t p = next.fetch_add(1);
        if (p >= points.size()) return;
        run_sweep_point(config, graph, points[p], trials, base_seed);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream csv(dir + "/sweep.csv");
  if (!csv) throw IoError("cannot write sweep report");
  for (const auto& axis : axes) csv << axis.key << ',';
  csv << "val_auc,val_ap\n";
  for (const auto& point : points) {
    for (const auto& [key, value] : point.overrides) csv << value << ',';
    csv << fmt(point.val_auc) << ',' << fmt(point.val_ap) << '\n';
  }

  const auto best = std::max_element(points.begin(), points.end(),
                                     [](const SweepPoint& a, const SweepPoint& b) {
                                       return a.val_auc < b.val_auc;
                                     });
  std::ofstream best_out(dir + "/sweep_best.txt");
  for (const auto& [key, value] : best->overrides) best_out << key << " = " << value << '\n';
  best_out << "# val_auc = " << fmt(best->val_auc) << ", val_ap = " << fmt(best->val_ap) << '\n';

  // gamma x beta pivot when exactly those two axes are swept
  if (axes.size() == 2 && axes[0].key == "loss.gamma" && axes[1].key == "loss.beta") {
    std::ofstream matrix(dir + "/sweep_matrix.csv");
    matrix << "gamma\\beta";
    for (const auto& beta : axes[1].values) matrix << ',' << beta;
    matrix << '\n';
    std::size_t p = 0;
    for (const auto& gamma : axes[0].values) {
      matrix << gamma;
      for (std::size_t b = 0; b < axes[1].values.size(); ++b) matrix << ',' << fmt(points[p++].val_auc);
      matrix << '\n';
    }
  }

  std::cout << "sweep: " << grid_size << " grid points -> " << dir << "/sweep.csv; best";
  for (const auto& [key, value] : best->overrides) std::cout << ' ' << key << '=' << value;
  std::cout << " (val auc " << fmt(best->val_auc) << ")\n";
  return 0;
}

int cmd_diagnose(const RunConfig& config) {
  const std::string dir = out_dir(config);
  write_echo(config, dir);
  const AttributedGraph graph = load_configured_graph(config);
  const Checkpoint ckpt = read_checkpoint_file(checkpoint_path(config, dir));
  const int h_max = config.get_int("diag.h_max");
  const auto max_pairs = static_cast<std::size_t>(config.get_int("diag.max_pairs_per_hop"));
  const std::uint64_t seed = config.get_u64("seed");

  const std::string kind = config.get_string("diag.kind");
  auto write_profile = [&](EmbeddingKind k, const std::string& path) {
    const auto profile = hop_similarity_profile(ckpt.params, graph, h_max, k, max_pairs, seed);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write hop profile: " + path);
    out << "hop,mean_cosine,pair_count\n";
    for (const auto& stat : profile)
      out << stat.hop << ',' << fmt(stat.mean_cosine) << ',' << stat.pair_count << '\n';
    std::cout << "diagnose: wrote " << path << '\n';
  };
  if (kind == "structure" || kind == "both")
    write_profile(EmbeddingKind::structure, dir + "/hop_structure.csv");
  if (kind == "attribute" || kind == "both")
    write_profile(EmbeddingKind::attribute, dir + "/hop_attribute.csv");
  if (kind != "structure" && kind != "attribute" && kind != "both")
    throw ConfigError("config: diag.kind must be structure, attribute or both");
  return 0;
}

namespace {

Eigen::SparseVector<double> read_attribute_file(const std::string& path, Index width) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open attribute file: " + path);
  Eigen::SparseVector<double> x(width);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long attr = -1;
    double value = 0.0;
    if (!(fields >> attr >> value))
      throw ParseError(path + ": malformed line " + std::to_string(line_no));
    if (attr < 0 || attr >= width)
      throw ShapeError(path + ": attribute id " + std::to_string(attr) +
                       " outside encoder width " + std::to_string(width));
    x.coeffRef(static_cast<Index>(attr)) = value;
  }
  return x;
}

LinkEndpoint parse_endpoint(const std::string& spec, Index width) {
  if (!spec.empty() && spec[0] == '@')
    return LinkEndpoint::attributes(read_attribute_file(spec.substr(1), width));
  try {
    std::size_t pos = 0;
    const int id = std::stoi(spec, &pos);
    if (pos != spec.size()) throw std::invalid_argument(spec);
    return LinkEndpoint::node(id);
  } catch (const std::exception&) {
    throw ArgumentError("predict: endpoint \"" + spec +
                        "\" is neither a node id nor @attribute-file");
  }
}

}  // namespace

int cmd_predict(const RunConfig& config, const std::vector<std::string>& pair_specs) {
  if (pair_specs.empty()) throw ArgumentError("predict: no pairs given");
  const std::string dir = out_dir(config);
  write_echo(config, dir);
  const AttributedGraph graph = load_configured_graph(config);
  const Checkpoint ckpt = read_checkpoint_file(checkpoint_path(config, dir));
  const std::array<double, 3> lambda = config.hyper_params().lambda;
  const LinkScorer scorer(ckpt.params, graph);
  const Index width = ckpt.params.attr.input_dim();

  std::ofstream out(dir + "/predictions.txt");
  if (!out) throw IoError("cannot write predictions");
  for (const auto& spec : pair_specs) {
    const std::size_t comma = spec.find(',');
    if (comma == std::string::npos)
      throw ArgumentError("predict: pair spec \"" + spec + "\" must be A,B");
    const LinkEndpoint p = parse_endpoint(spec.substr(0, comma), width);
    const LinkEndpoint q = parse_endpoint(spec.substr(comma + 1), width);
    const double score = scorer.score(p, q, lambda);
    const std::string line = spec.substr(0, comma) + "\t" + spec.substr(comma + 1) + "\t" +
                             fmt(score, "%.9g");
    std::cout << line << '\n';
    out << line << '\n';
  }
  return 0;
}

}  // namespace deal
