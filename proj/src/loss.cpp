#include "deal/loss.hpp"

#include <cmath>

#include "deal/error.hpp"

namespace deal {

void HyperParams::validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw ValidationError("hyperparams: gamma1 and gamma2 must be positive");
  if (beta < 0.0) throw ValidationError("hyperparams: beta must be nonnegative");
  if (!(pos_frac > 0.0 && pos_frac < 1.0))
    throw ValidationError("hyperparams: pos_frac must lie in (0,1)");
  if (batch_size < 2) throw ValidationError("hyperparams: batch size must be >= 2");
  double theta_sum = 0.0;
  for (double t : theta) {
    if (t < 0.0) throw ValidationError("hyperparams: theta components must be nonnegative");
    theta_sum += t;
  }
  if (theta_sum <= 0.0) throw ValidationError("hyperparams: theta must not be all zero");
}

void MiniBatch::validate() const {
  for (const auto& s : pairs) {
    if (s.p == s.q) throw ValidationError("minibatch: pair with equal endpoints");
    if (s.label == 1 && s.d_sp != 1)
      throw ValidationError("minibatch: positive pair must sit at hop distance 1");
    if (s.label == 0 && s.d_sp != kUnreachable && s.d_sp < 2)
      throw ValidationError("minibatch: negative pair at hop distance below 2");
  }
}

double negative_weight(int d_sp, double beta) {
  if (beta < 0.0) throw ArgumentError("negative_weight: beta must be nonnegative");
  if (d_sp == kUnreachable) return 1.0;
  if (d_sp < 1) throw ArgumentError("negative_weight: hop distance must be >= 1");
  return std::exp(beta / static_cast<double>(d_sp));
}

namespace {

// Shared summation for the ranking and loose-alignment objectives; the two
// differ only in which embedding block each endpoint is read from.
double pair_loss_sum(const MiniBatch& batch, const EmbeddingMatrix& emb_p,
                     const EmbeddingMatrix& emb_q, const HyperParams& hp) {
  if (batch.pairs.empty()) throw ArgumentError("loss: empty batch");
  double sum = 0.0;
  for (const auto& s : batch.pairs) {
    const double sim =
        cosine_similarity(emb_p.rows().row(emb_p.row_of(s.p)), emb_q.rows().row(emb_q.row_of(s.q)));
    if (s.label == 1) {
      sum += generalized_logistic(sim, hp.gamma2, hp.b2);
    } else {
      sum += negative_weight(s.d_sp, hp.beta) * generalized_logistic(-sim, hp.gamma1, hp.b1);
    }
  }
  return sum;
}

}  // namespace

double ranking_loss(const MiniBatch& batch, const EmbeddingMatrix& emb, const HyperParams& hp) {
  return pair_loss_sum(batch, emb, emb, hp) / static_cast<double>(batch.size());
}

double tight_align_loss(const EmbeddingMatrix& z_struct, const EmbeddingMatrix& z_attr) {
  if (z_struct.count() != z_attr.count())
    throw ShapeError("tight_align_loss: row count mismatch");
  if (z_struct.count() == 0) throw ArgumentError("tight_align_loss: empty embedding block");
  double sum = 0.0;
  for (Index i = 0; i < z_struct.count(); ++i)
    sum += cosine_similarity(z_struct.rows().row(i), z_attr.rows().row(i));
  return -sum / static_cast<double>(z_struct.count());
}

double loose_align_loss(const MiniBatch& batch, const EmbeddingMatrix& z_struct,
                        const EmbeddingMatrix& z_attr, const HyperParams& hp) {
  double sum = pair_loss_sum(batch, z_struct, z_attr, hp);
  if (hp.symmetrize_loose_align) {
    MiniBatch mirrored;
    mirrored.pairs.reserve(batch.pairs.size());
    for (const auto& s : batch.pairs) mirrored.pairs.push_back({s.q, s.p, s.label, s.d_sp});
    sum += pair_loss_sum(mirrored, z_struct, z_attr, hp);
  }
  return sum / static_cast<double>(batch.size());
}

double total_loss(const MiniBatch& batch, const EmbeddingMatrix& z_struct,
                  const EmbeddingMatrix& z_attr, const HyperParams& hp) {
  double loss = 0.0;
  if (hp.theta[0] != 0.0) loss += hp.theta[0] * ranking_loss(batch, z_struct, hp);
  if (hp.theta[1] != 0.0) loss += hp.theta[1] * ranking_loss(batch, z_attr, hp);
  if (hp.theta[2] != 0.0) {
    const double align = hp.align_mode == AlignMode::tight
                             ? tight_align_loss(z_struct, z_attr)
                             : loose_align_loss(batch, z_struct, z_attr, hp);
    loss += hp.theta[2] * align;
  }
  return loss;
}

}  // namespace deal
