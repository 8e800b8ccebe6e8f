#include "deal/training.hpp"

#include <algorithm>
#include <cmath>

#include "deal/error.hpp"
#include "deal/eval.hpp"

namespace deal {

void TrainConfig::validate() const {
  hp.validate();
  if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
  if (batches_per_epoch < 0) throw ValidationError("train config: negative batches_per_epoch");
  if (std::llround(hp.pos_frac * hp.batch_size) < 1)
    throw ValidationError("train config: pos_frac * batch_size must be >= 1");
  if (embed_dim < 1 || attr_hidden < 1 || attr_depth < 1)
    throw ValidationError("train config: encoder dimensions must be positive");
  if (eval_every < 1 || patience < 1)
    throw ValidationError("train config: eval_every and patience must be >= 1");
  if (max_hops < 1) throw ValidationError("train config: max_hops must be >= 1");
  if (optimizer != "adam" && optimizer != "sgd")
    throw ValidationError("train config: unknown optimizer \"" + optimizer + "\"");
  if (!(learning_rate > 0.0)) throw ValidationError("train config: learning rate must be positive");
}

SamplingContext SamplingContext::build(const AttributedGraph& graph, const SplitSpec& split) {
  SamplingContext ctx;
  ctx.pool.reserve(static_cast<std::size_t>(graph.num_nodes()));
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    if (split.mode == SplitMode::inductive && split.is_hidden(u)) continue;
    ctx.pool.push_back(u);
  }
  ctx.train_edge_set.reserve(split.train_edges.size() * 2);
  for (const auto& [u, v] : split.train_edges) ctx.train_edge_set.insert(edge_key(u, v));
  return ctx;
}

MiniBatch sample_minibatch(const SamplingContext& ctx, const SplitSpec& split,
                           const HyperParams& hp, const DistanceCache& dist, Rng& rng) {
  if (split.train_edges.empty()) throw SamplingError("sample_minibatch: no training edges");
  const auto num_pos = static_cast<std::size_t>(std::llround(hp.pos_frac * hp.batch_size));
  const auto k = static_cast<std::size_t>(hp.batch_size);
  if (num_pos < 1 || num_pos > k)
    throw SamplingError("sample_minibatch: positive count out of range");

  MiniBatch batch;
  batch.pairs.reserve(k);
  for (std::size_t i = 0; i < num_pos; ++i) {
    const Edge& e = split.train_edges[rng.below(split.train_edges.size())];
    const bool flip = rng.below(2) == 1;
    batch.pairs.push_back({flip ? e.second : e.first, flip ? e.first : e.second, 1, 1});
  }

  const std::size_t num_neg = k - num_pos;
  const std::size_t max_tries = 100 * std::max<std::size_t>(num_neg, 1);
  std::size_t tries = 0, drawn = 0;
  while (drawn < num_neg) {
    if (++tries > max_tries)
      throw SamplingError("sample_minibatch: negative rejection sampling exhausted");
    const NodeId u = ctx.pool[rng.below(ctx.pool.size())];
    const NodeId v = ctx.pool[rng.below(ctx.pool.size())];
    if (u == v || ctx.train_edge_set.count(edge_key(u, v))) continue;
    const int d = dist.distance(u, v);
    batch.pairs.push_back({u, v, 0, d});
    ++drawn;
  }

  if (split.mode == SplitMode::inductive) {
    for (const auto& s : batch.pairs) {
      if (split.is_hidden(s.p) || split.is_hidden(s.q))
        throw SamplingError("sample_minibatch: hidden node leaked into a batch");
    }
  }
  batch.validate();
  return batch;
}

MiniBatch sample_minibatch(const AttributedGraph& graph, const SplitSpec& split,
                           const HyperParams& hp, const DistanceCache& dist, Rng& rng) {
  const SamplingContext ctx = SamplingContext::build(graph, split);
  return sample_minibatch(ctx, split, hp, dist, rng);
}

TrainedModel train(const AttributedGraph& graph, const SplitSpec& split, const TrainConfig& cfg) {
  cfg.validate();
  validate_split(split, graph);
  if (split.train_edges.empty()) throw ValidationError("train: split has no training edges");

  Rng rng(cfg.seed);
  ModelParams params;
  params.attr = init_attr_encoder(graph.num_attrs(), cfg.attr_hidden, cfg.embed_dim,
                                  cfg.attr_depth, cfg.elu_alpha, rng);
  params.structure = init_struct_encoder(graph.num_nodes(), cfg.embed_dim, rng);

  const SamplingContext ctx = SamplingContext::build(graph, split);
  const auto train_adjacency = adjacency_from_edges(graph.num_nodes(), split.train_edges);
  const DistanceCache dist =
      bfs_distances(graph.num_nodes(), train_adjacency, ctx.pool, cfg.max_hops);

  const auto layout = make_layout(params);
  ParamVector flat = flatten_params(params, layout);
  OptimizerState opt = OptimizerState::make(flat.size(), cfg.learning_rate);
  opt.decay1 = cfg.adam_decay1;
  opt.decay2 = cfg.adam_decay2;
  opt.epsilon = cfg.adam_epsilon;

  const auto num_pos = static_cast<double>(std::llround(cfg.hp.pos_frac * cfg.hp.batch_size));
  int batches_per_epoch = cfg.batches_per_epoch;
  if (batches_per_epoch == 0) {
    batches_per_epoch = static_cast<int>(
        std::ceil(static_cast<double>(split.train_edges.size()) / num_pos));
  }

  const bool have_validation = !split.val_pos.empty() && !split.val_neg.empty();

  TrainedModel model;
  model.hp = cfg.hp;
  Vector best_flat = flat.values;
  double best_auc = -1.0;
  int evals_since_best = 0;
  bool stop = false;

  ModelParams current = params;  // step buffers, reused across batches
  ModelParams grads;
  Vector grad_flat(flat.size());

  for (int epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    double loss_sum = 0.0;
    for (int b = 0; b < batches_per_epoch; ++b) {
      const MiniBatch batch = sample_minibatch(ctx, split, cfg.hp, dist, rng);
      unflatten_params_into(flat, current);
      LossTerms terms;
      try {
        terms = total_loss_with_gradient(current, graph.features(), batch, cfg.hp, &grads,
                                         cfg.loss_options);
      } catch (const ValidationError& e) {
        throw ValidationError("train: epoch " + std::to_string(epoch) + " batch " +
                              std::to_string(b) + ": " + e.what());
      }
      if (!std::isfinite(terms.total))
        throw ValidationError("train: non-finite loss at epoch " + std::to_string(epoch) +
                              " batch " + std::to_string(b));
      loss_sum += terms.total;
      flatten_params_into(grads, grad_flat);
      if (cfg.optimizer == "adam")
        adam_step(flat.values, grad_flat, opt);
      else
        sgd_step(flat.values, grad_flat, opt);
    }

    EpochLog log;
    log.epoch = epoch;
    log.mean_train_loss = loss_sum / static_cast<double>(batches_per_epoch);

    if (have_validation && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)) {
      unflatten_params_into(flat, current);
      const TrialMetrics val = evaluate(current, graph, split, cfg.hp.lambda, EvalSet::val);
      log.val_auc = val.auc;
      log.val_ap = val.ap;
      if (val.auc > best_auc) {
        best_auc = val.auc;
        best_flat = flat.values;
        model.best_val_auc = val.auc;
        model.best_val_ap = val.ap;
        model.best_epoch = epoch;
        log.snapshot_taken = true;
        evals_since_best = 0;
      } else if (++evals_since_best >= cfg.patience) {
        stop = true;
      }
    }
    model.curve.push_back(log);
  }

  if (!have_validation) best_flat = flat.values;
  ParamVector best;
  best.values = std::move(best_flat);
  best.layout = layout;
  model.params = unflatten_params(best, params);
  return model;
}

}  // namespace deal
