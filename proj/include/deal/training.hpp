#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deal/distance.hpp"
#include "deal/grad.hpp"
#include "deal/loss.hpp"
#include "deal/split.hpp"

namespace deal {

struct TrainConfig {
  int epochs = 500;
  int batches_per_epoch = 0;  // 0: ceil(|train_edges| / (pos_frac * batch_size))
  HyperParams hp;

  Index embed_dim = 64;
  Index attr_hidden = 256;
  int attr_depth = 2;
  double elu_alpha = 1.0;
  int max_hops = 5;

  std::string optimizer = "adam";  // "adam" | "sgd"
  double learning_rate = 1e-2;
  double adam_decay1 = 0.9, adam_decay2 = 0.999, adam_epsilon = 1e-8;

  int eval_every = 5;  // epochs between validation evaluations
  int patience = 10;   // evaluations without improvement before stopping
  std::uint64_t seed = 1;
  LossOptions loss_options;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double mean_train_loss = 0.0;
  double val_auc = std::numeric_limits<double>::quiet_NaN();
  double val_ap = std::numeric_limits<double>::quiet_NaN();
  bool snapshot_taken = false;
};

/// Output of train(): the best-validation parameter snapshot plus the
/// training curve. When the split has no validation pairs the final epoch's
/// parameters are returned and the best metrics stay NaN.
struct TrainedModel {
  ModelParams params;
  HyperParams hp;
  double best_val_auc = std::numeric_limits<double>::quiet_NaN();
  double best_val_ap = std::numeric_limits<double>::quiet_NaN();
  int best_epoch = 0;
  std::vector<EpochLog> curve;
};

/// Precomputed sampling state shared across batches of one training run.
struct SamplingContext {
  std::vector<NodeId> pool;  // nodes negatives may touch (visible nodes)
  std::unordered_set<std::uint64_t> train_edge_set;

  static SamplingContext build(const AttributedGraph& graph, const SplitSpec& split);
};

/// Draws round(pos_frac * k) positives uniformly from the training edges
/// (hop distance 1) and fills the rest with uniform non-train-edge pairs
/// annotated from the distance cache. Endpoint order of every sampled pair
/// is randomized. In inductive mode hidden nodes are never touched.
MiniBatch sample_minibatch(const AttributedGraph& graph, const SplitSpec& split,
                           const HyperParams& hp, const DistanceCache& dist, Rng& rng);
MiniBatch sample_minibatch(const SamplingContext& ctx, const SplitSpec& split,
                           const HyperParams& hp, const DistanceCache& dist, Rng& rng);

/// Mini-batch training of both encoders against the combined objective,
/// with periodic validation scoring and best-snapshot selection.
TrainedModel train(const AttributedGraph& graph, const SplitSpec& split, const TrainConfig& cfg);

}  // namespace deal
