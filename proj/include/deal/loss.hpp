#pragma once

#include <array>
#include <vector>

#include "deal/distance.hpp"
#include "deal/encoders.hpp"
#include "deal/math.hpp"

namespace deal {

enum class AlignMode { tight, loose };

/// Everything the objectives and the scorer are parameterized by. gamma1/b1
/// shape the negative-pair branch, gamma2/b2 the positive-pair branch;
/// beta = 0 disables the distance weighting (alpha identically 1).
struct HyperParams {
  double gamma1 = 1.0, b1 = 0.0;
  double gamma2 = 1.0, b2 = 0.0;
  double beta = 1.0;
  std::array<double, 3> theta{1.0, 1.0, 1.0};
  std::array<double, 3> lambda{1.0 / 3, 1.0 / 3, 1.0 / 3};
  AlignMode align_mode = AlignMode::loose;
  int batch_size = 512;
  double pos_frac = 0.40;
  bool symmetrize_loose_align = false;

  void validate() const;
};

/// One labeled node pair; d_sp is the hop distance on the training graph
/// (kUnreachable when beyond the cap or disconnected).
struct PairSample {
  NodeId p = 0, q = 0;
  int label = 0;  // 1 if linked
  int d_sp = kUnreachable;
};

struct MiniBatch {
  std::vector<PairSample> pairs;

  std::size_t size() const { return pairs.size(); }
  /// Enforces p != q, label/distance consistency (positives at hop 1,
  /// negatives at hop >= 2 or unreachable).
  void validate() const;
};

/// exp(beta / d_sp); 1 for unreachable pairs.
double negative_weight(int d_sp, double beta);

/// Mean over the batch of phi2(s) on positives and alpha * phi1(-s) on
/// negatives, with s the cosine similarity between the pair's rows in `emb`.
double ranking_loss(const MiniBatch& batch, const EmbeddingMatrix& emb, const HyperParams& hp);

/// Negative mean rowwise cosine between the two embedding blocks.
double tight_align_loss(const EmbeddingMatrix& z_struct, const EmbeddingMatrix& z_attr);

/// Ranking-shaped loss over cross pairs s(z_struct[p], z_attr[q]).
double loose_align_loss(const MiniBatch& batch, const EmbeddingMatrix& z_struct,
                        const EmbeddingMatrix& z_attr, const HyperParams& hp);

/// theta1 * ranking(struct) + theta2 * ranking(attr) + theta3 * alignment,
/// the alignment term dispatching on hp.align_mode.
double total_loss(const MiniBatch& batch, const EmbeddingMatrix& z_struct,
                  const EmbeddingMatrix& z_attr, const HyperParams& hp);

}  // namespace deal
