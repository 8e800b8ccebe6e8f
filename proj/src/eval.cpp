#include "deal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deal/error.hpp"

namespace deal {

Metrics aggregate_trials(std::vector<TrialMetrics> trials) {
  if (trials.empty()) throw ArgumentError("aggregate_trials: no trials");
  Metrics metrics;
  metrics.trials = std::move(trials);
  const auto n = static_cast<double>(metrics.trials.size());
  for (const auto& t : metrics.trials) {
    metrics.auc_mean += t.auc;
    metrics.ap_mean += t.ap;
  }
  metrics.auc_mean /= n;
  metrics.ap_mean /= n;
  if (metrics.trials.size() > 1) {
    double auc_ss = 0.0, ap_ss = 0.0;
    for (const auto& t : metrics.trials) {
      auc_ss += (t.auc - metrics.auc_mean) * (t.auc - metrics.auc_mean);
      ap_ss += (t.ap - metrics.ap_mean) * (t.ap - metrics.ap_mean);
    }
    metrics.auc_stddev = std::sqrt(auc_ss / (n - 1.0));
    metrics.ap_stddev = std::sqrt(ap_ss / (n - 1.0));
  }
  return metrics;
}

namespace {

void check_metric_input(const std::vector<int>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size()) throw MetricError("metric: label/score length mismatch");
  if (labels.empty()) throw MetricError("metric: empty input");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1)
      has_pos = true;
    else if (y == 0)
      has_neg = true;
    else
      throw MetricError("metric: labels must be 0 or 1");
  }
  if (!has_pos || !has_neg) throw MetricError("metric: need at least one positive and one negative");
}

}  // namespace

double auc_score(const std::vector<int>& labels, const std::vector<double>& scores) {
  check_metric_input(labels, scores);
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t num_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // ranks are 1-based; tied scores share the average rank of their block
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
        ++num_pos;
      }
    }
    i = j;
  }
  const auto num_neg = n - num_pos;
  return (positive_rank_sum - 0.5 * static_cast<double>(num_pos) * static_cast<double>(num_pos + 1)) /
         (static_cast<double>(num_pos) * static_cast<double>(num_neg));
}

double average_precision(const std::vector<int>& labels, const std::vector<double>& scores) {
  check_metric_input(labels, scores);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0, sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      hits += 1.0;
      sum += hits / static_cast<double>(rank + 1);
    }
  }
  return sum / hits;
}

LinkScorer::LinkScorer(const ModelParams& params, const AttributedGraph& graph,
                       std::vector<NodeId> attribute_only)
    : attr_(params.attr), attribute_only_(std::move(attribute_only)) {
  std::sort(attribute_only_.begin(), attribute_only_.end());
  z_struct_ = encode_structure(params.structure).rows();
  z_attr_ = encode_attributes(params.attr, graph.features()).rows();
}

LinkScorer::Resolved LinkScorer::resolve(const LinkEndpoint& e) const {
  Resolved r;
  if (e.id.has_value()) {
    const NodeId id = *e.id;
    if (id < 0 || id >= z_attr_.rows())
      throw ArgumentError("link_score: node id out of range: " + std::to_string(id));
    r.z_attr = z_attr_.row(id).transpose();
    r.has_struct = !std::binary_search(attribute_only_.begin(), attribute_only_.end(), id);
    if (r.has_struct) {
      r.z_struct_rows = &z_struct_;
      r.struct_row = id;
    }
  } else if (e.attrs.has_value()) {
    r.z_attr = encode_attribute_vector(attr_, *e.attrs);
    r.has_struct = false;
  } else {
    throw ArgumentError("link_score: endpoint is neither a node id nor an attribute vector");
  }
  return r;
}

double LinkScorer::score(const LinkEndpoint& p, const LinkEndpoint& q,
                         const std::array<double, 3>& lambda) const {
  const Resolved rp = resolve(p);
  const Resolved rq = resolve(q);
  double total = 0.0;
  if (lambda[0] != 0.0 && rp.has_struct && rq.has_struct) {
    total += lambda[0] * cosine_similarity(rp.z_struct_rows->row(rp.struct_row),
                                           rq.z_struct_rows->row(rq.struct_row));
  }
  if (lambda[1] != 0.0) total += lambda[1] * cosine_similarity(rp.z_attr, rq.z_attr);
  if (lambda[2] != 0.0 && rp.has_struct) {
    total += lambda[2] *
             cosine_similarity(rp.z_struct_rows->row(rp.struct_row), rq.z_attr.transpose());
  }
  return total;
}

double LinkScorer::score(NodeId p, NodeId q, const std::array<double, 3>& lambda) const {
  return score(LinkEndpoint::node(p), LinkEndpoint::node(q), lambda);
}

double link_score(const ModelParams& params, const AttributedGraph& graph, const LinkEndpoint& p,
                  const LinkEndpoint& q, const std::array<double, 3>& lambda) {
  return LinkScorer(params, graph).score(p, q, lambda);
}

TrialMetrics evaluate(const ModelParams& params, const AttributedGraph& graph,
                      const SplitSpec& split, const std::array<double, 3>& lambda, EvalSet set) {
  const auto& pos = set == EvalSet::val ? split.val_pos : split.test_pos;
  const auto& neg = set == EvalSet::val ? split.val_neg : split.test_neg;
  if (pos.empty() || neg.empty()) throw MetricError("evaluate: empty evaluation set");

  const LinkScorer scorer(params, graph,
                          split.mode == SplitMode::inductive ? split.hidden_nodes
                                                             : std::vector<NodeId>{});
  std::vector<int> labels;
  std::vector<double> scores;
  labels.reserve(pos.size() + neg.size());
  scores.reserve(pos.size() + neg.size());
  for (const auto& [u, v] : pos) {
    labels.push_back(1);
    scores.push_back(scorer.score(u, v, lambda));
  }
  for (const auto& [u, v] : neg) {
    labels.push_back(0);
    scores.push_back(scorer.score(u, v, lambda));
  }
  return {auc_score(labels, scores), average_precision(labels, scores)};
}

TrialMetrics evaluate(const TrainedModel& model, const AttributedGraph& graph,
                      const SplitSpec& split, const std::array<double, 3>& lambda, EvalSet set) {
  return evaluate(model.params, graph, split, lambda, set);
}

SplitSpec make_split(const AttributedGraph& graph, const SplitRecipe& recipe, std::uint64_t seed) {
  if (recipe.mode == SplitMode::transductive)
    return split_transductive(graph, recipe.val_frac, recipe.test_frac, seed);
  return split_inductive(graph, recipe.hidden_frac, recipe.val_frac, seed);
}

Metrics run_trials(const AttributedGraph& graph, const SplitRecipe& recipe, const TrainConfig& cfg,
                   int trials, std::uint64_t base_seed) {
  if (trials < 1) throw ArgumentError("run_trials: trials must be >= 1");
  std::vector<TrialMetrics> results;
  results.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed_t = base_seed + static_cast<std::uint64_t>(t);
    try {
      const SplitSpec split = make_split(graph, recipe, seed_t);
      TrainConfig trial_cfg = cfg;
      trial_cfg.seed = seed_t;
      const TrainedModel model = train(graph, split, trial_cfg);
      results.push_back(evaluate(model, graph, split, cfg.hp.lambda, EvalSet::test));
    } catch (const std::exception& e) {
      throw SplitError("run_trials: trial " + std::to_string(t) + " failed: " + e.what());
    }
  }
  return aggregate_trials(std::move(results));
}

std::vector<HopStat> hop_similarity_profile(const ModelParams& params,
                                            const AttributedGraph& graph, int h_max,
                                            EmbeddingKind kind, std::size_t max_pairs_per_hop,
                                            std::uint64_t seed) {
  if (h_max < 1) throw ArgumentError("hop_similarity_profile: h_max must be >= 1");

  const Matrix emb = kind == EmbeddingKind::structure
                         ? encode_structure(params.structure).rows()
                         : encode_attributes(params.attr, graph.features()).rows();

  // Uniform reservoir per hop over all unordered pairs at that exact
  // distance, enumerated with truncated BFS from each node.
  Rng rng(seed);
  std::vector<std::vector<Edge>> reservoir(static_cast<std::size_t>(h_max) + 1);
  std::vector<std::size_t> total(static_cast<std::size_t>(h_max) + 1, 0);

  const auto& adjacency = graph.adjacency();
  std::vector<int> dist(static_cast<std::size_t>(graph.num_nodes()), -1);
  std::vector<NodeId> frontier, next, touched;
  for (NodeId src = 0; src < graph.num_nodes(); ++src) {
    touched.clear();
    frontier.assign(1, src);
    dist[static_cast<std::size_t>(src)] = 0;
    touched.push_back(src);
    for (int hop = 1; hop <= h_max && !frontier.empty(); ++hop) {
      next.clear();
      for (NodeId u : frontier) {
        for (NodeId v : adjacency[static_cast<std::size_t>(u)]) {
          if (dist[static_cast<std::size_t>(v)] != -1) continue;
          dist[static_cast<std::size_t>(v)] = hop;
          touched.push_back(v);
          next.push_back(v);
          if (v > src) {  // count each unordered pair once
            auto& bucket = reservoir[static_cast<std::size_t>(hop)];
            const std::size_t seen = ++total[static_cast<std::size_t>(hop)];
            if (bucket.size() < max_pairs_per_hop) {
              bucket.emplace_back(src, v);
            } else {
              const std::size_t slot = rng.below(seen);
              if (slot < max_pairs_per_hop) bucket[slot] = Edge{src, v};
            }
          }
        }
      }
      frontier.swap(next);
    }
    for (NodeId u : touched) dist[static_cast<std::size_t>(u)] = -1;
  }

  std::vector<HopStat> profile;
  for (int hop = 1; hop <= h_max; ++hop) {
    const auto& bucket = reservoir[static_cast<std::size_t>(hop)];
    if (bucket.empty()) continue;
    double sum = 0.0;
    for (const auto& [u, v] : bucket) sum += cosine_similarity(emb.row(u), emb.row(v));
    profile.push_back({hop, sum / static_cast<double>(bucket.size()), bucket.size()});
  }
  return profile;
}

}  // namespace deal
