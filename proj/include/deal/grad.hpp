#pragma once

#include <memory>
#include <string>
#include <vector>

#include "deal/encoders.hpp"
#include "deal/loss.hpp"
#include "deal/rng.hpp"

namespace deal {

/// Both encoders' trainable tensors.
struct ModelParams {
  AttrEncoderParams attr;
  StructEncoderParams structure;
};

/// Name -> slice map for the flattened parameter vector. The entry order is
/// fixed (attr layers in depth order, weight then bias, then structure
/// directions and scales) so a layout built from equal shapes is identical.
struct ParamLayout {
  struct Entry {
    std::string name;
    Index offset = 0, rows = 0, cols = 0;
    Index size() const { return rows * cols; }
  };
  std::vector<Entry> entries;
  Index total_size = 0;

  const Entry& find(const std::string& name) const;
};

/// Flat view over all trainable tensors plus the layout describing it.
struct ParamVector {
  Vector values;
  std::shared_ptr<const ParamLayout> layout;

  Index size() const { return values.size(); }
};

std::shared_ptr<const ParamLayout> make_layout(const ModelParams& params);
ParamVector flatten_params(const ModelParams& params,
                           std::shared_ptr<const ParamLayout> layout = nullptr);
/// Inverse of flatten_params; `prototype` supplies tensor shapes and the
/// non-trainable elu shape parameter.
ModelParams unflatten_params(const ParamVector& flat, const ModelParams& prototype);

// Allocation-free variants for the training loop's inner step.
void flatten_params_into(const ModelParams& params, Vector& out);
void unflatten_params_into(const ParamVector& flat, ModelParams& out);

/// A differentiable scalar function of the parameters. Gradients are exact
/// (explicit backward functions per primitive, no tape).
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const ParamVector& at) const = 0;
  virtual Vector gradient(const ParamVector& at) const = 0;
};

inline Vector gradient(const Objective& objective, const ParamVector& at) {
  return objective.gradient(at);
}

struct LossTerms {
  double total = 0.0;
  double rank_struct = 0.0, rank_attr = 0.0, align = 0.0;
};

struct LossOptions {
  /// Average the tight alignment over every node instead of the batch's.
  bool tight_full_graph = false;
};

/// Evaluates the combined objective on one mini-batch and, when `grads` is
/// non-null, fills it with the exact gradient (same tensor shapes as
/// `params`). This is the training step's workhorse.
LossTerms total_loss_with_gradient(const ModelParams& params, const SparseRowMatrix& features,
                                   const MiniBatch& batch, const HyperParams& hp,
                                   ModelParams* grads, const LossOptions& options = {});

/// The combined objective bound to one batch, exposed through the generic
/// Objective interface (used by the finite-difference harness).
class TotalLossObjective : public Objective {
 public:
  TotalLossObjective(ModelParams prototype, SparseRowMatrix features, MiniBatch batch,
                     HyperParams hp, LossOptions options = {});

  double value(const ParamVector& at) const override;
  Vector gradient(const ParamVector& at) const override;

 private:
  ModelParams prototype_;
  SparseRowMatrix features_;
  MiniBatch batch_;
  HyperParams hp_;
  LossOptions options_;
};

/// Central-difference check of objective.gradient against function values.
/// Vectors longer than 2000 coordinates are probed on a 500-coordinate
/// uniform random subset. Returns the max relative error with denominator
/// max(|analytic|, |numeric|, 1e-8).
double finite_difference_check(const Objective& objective, const ParamVector& at, double eps,
                               Rng* rng = nullptr);

/// Bias-corrected adaptive-moment optimizer state.
struct OptimizerState {
  Vector first_moment, second_moment;
  long long step = 0;
  double learning_rate = 1e-2;
  double decay1 = 0.9, decay2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState make(Index size, double learning_rate);
};

void adam_step(Vector& params, const Vector& grads, OptimizerState& state);
/// Plain gradient descent, kept behind the same state type for ablations.
void sgd_step(Vector& params, const Vector& grads, OptimizerState& state);

}  // namespace deal
