#pragma once

#include <array>
#include <optional>
#include <vector>

#include "deal/training.hpp"

namespace deal {

struct TrialMetrics {
  double auc = std::numeric_limits<double>::quiet_NaN();
  double ap = std::numeric_limits<double>::quiet_NaN();
};

/// Per-trial AUC/AP values and their mean / sample standard deviation.
struct Metrics {
  std::vector<TrialMetrics> trials;
  double auc_mean = 0.0, auc_stddev = 0.0;
  double ap_mean = 0.0, ap_stddev = 0.0;
};

Metrics aggregate_trials(std::vector<TrialMetrics> trials);

/// Rank-based (Mann-Whitney) AUC with average ranks on ties: equals
/// P(score+ > score-) + 0.5 * P(tie).
double auc_score(const std::vector<int>& labels, const std::vector<double>& scores);

/// Mean over positives of precision at each positive's rank, after a stable
/// descending sort (ties keep original index order).
double average_precision(const std::vector<int>& labels, const std::vector<double>& scores);

/// A pair endpoint: either a node of the trained graph or a raw attribute
/// vector for a node never seen in training.
struct LinkEndpoint {
  std::optional<NodeId> id;
  std::optional<Eigen::SparseVector<double>> attrs;

  static LinkEndpoint node(NodeId node_id) { return {node_id, std::nullopt}; }
  static LinkEndpoint attributes(Eigen::SparseVector<double> x) { return {std::nullopt, std::move(x)}; }
};

/// Scores node pairs as a lambda-weighted sum of structure/structure,
/// attribute/attribute and structure/attribute cosines. Terms whose
/// embeddings are unavailable for an endpoint are dropped: endpoints listed
/// in `attribute_only` (or given as raw attributes) contribute no structure
/// embedding, so the first term needs two trained endpoints and the third a
/// trained first endpoint.
class LinkScorer {
 public:
  LinkScorer(const ModelParams& params, const AttributedGraph& graph,
             std::vector<NodeId> attribute_only = {});

  double score(NodeId p, NodeId q, const std::array<double, 3>& lambda) const;
  double score(const LinkEndpoint& p, const LinkEndpoint& q,
               const std::array<double, 3>& lambda) const;

 private:
  struct Resolved {
    Vector z_attr;
    const Matrix* z_struct_rows = nullptr;
    Index struct_row = -1;
    bool has_struct = false;
  };
  Resolved resolve(const LinkEndpoint& e) const;

  AttrEncoderParams attr_;
  Matrix z_struct_;
  Matrix z_attr_;
  std::vector<NodeId> attribute_only_;  // sorted
};

/// One-off convenience wrapper over LinkScorer.
double link_score(const ModelParams& params, const AttributedGraph& graph, const LinkEndpoint& p,
                  const LinkEndpoint& q, const std::array<double, 3>& lambda);

enum class EvalSet { val, test };

/// Scores every positive/negative pair of the chosen split section. In
/// inductive mode the split's hidden nodes are scored from attributes only.
TrialMetrics evaluate(const ModelParams& params, const AttributedGraph& graph,
                      const SplitSpec& split, const std::array<double, 3>& lambda, EvalSet set);
TrialMetrics evaluate(const TrainedModel& model, const AttributedGraph& graph,
                      const SplitSpec& split, const std::array<double, 3>& lambda, EvalSet set);

/// Split parameters regenerated per trial.
struct SplitRecipe {
  SplitMode mode = SplitMode::transductive;
  double val_frac = 0.10;
  double test_frac = 0.10;    // transductive only
  double hidden_frac = 0.10;  // inductive only
};

SplitSpec make_split(const AttributedGraph& graph, const SplitRecipe& recipe, std::uint64_t seed);

/// Trains and tests once per trial with seed base_seed + t and a freshly
/// generated split, then aggregates.
Metrics run_trials(const AttributedGraph& graph, const SplitRecipe& recipe, const TrainConfig& cfg,
                   int trials, std::uint64_t base_seed);

struct HopStat {
  int hop = 0;
  double mean_cosine = 0.0;
  std::size_t pair_count = 0;  // pairs the mean was computed over
};

/// Mean pairwise cosine at each exact hop distance h <= h_max, over at most
/// max_pairs_per_hop uniformly sampled node pairs per hop. Hops with no
/// pairs are omitted.
std::vector<HopStat> hop_similarity_profile(const ModelParams& params,
                                            const AttributedGraph& graph, int h_max,
                                            EmbeddingKind kind,
                                            std::size_t max_pairs_per_hop = 20000,
                                            std::uint64_t seed = 0);

}  // namespace deal
