#include <doctest.h>

#include <cmath>

#include "deal/error.hpp"
#include "deal/loss.hpp"
#include "deal/rng.hpp"

using namespace deal;

namespace {

EmbeddingMatrix emb_from(const Matrix& rows, std::vector<NodeId> ids, EmbeddingKind kind) {
  return EmbeddingMatrix(rows, std::move(ids), kind);
}

// phi2(1) with gamma2=1, b2=0; the positive-pair unit used by several cases
const double kPhiOne = std::log(1.0 + std::exp(-1.0));  // 0.31326168751822286

EmbeddingMatrix random_embedding(Index count, Index dim, Rng& rng, EmbeddingKind kind) {
  Matrix rows(count, dim);
  for (Index r = 0; r < count; ++r)
    for (Index c = 0; c < dim; ++c) rows(r, c) = rng.range(-1.0, 1.0);
  std::vector<NodeId> ids(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) ids[static_cast<std::size_t>(i)] = static_cast<NodeId>(i);
  return emb_from(rows, std::move(ids), kind);
}

MiniBatch random_batch(Index count, Rng& rng, std::size_t pairs) {
  MiniBatch batch;
  for (std::size_t i = 0; i < pairs; ++i) {
    NodeId p = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(count)));
    NodeId q = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(count)));
    if (p == q) q = static_cast<NodeId>((q + 1) % count);
    const bool pos = rng.unit() < 0.4;
    batch.pairs.push_back({p, q, pos ? 1 : 0,
                           pos ? 1 : (rng.unit() < 0.3 ? kUnreachable : 2 + static_cast<int>(rng.below(4)))});
  }
  return batch;
}

}  // namespace

TEST_CASE("hyperparams validation") {
  HyperParams hp;
  hp.validate();
  hp.gamma1 = 0.0;
  CHECK_THROWS_AS(hp.validate(), ValidationError);
  hp = HyperParams{};
  hp.beta = -0.1;
  CHECK_THROWS_AS(hp.validate(), ValidationError);
  hp = HyperParams{};
  hp.beta = 0.0;  // "off" cell: alpha identically 1
  hp.validate();
  hp = HyperParams{};
  hp.theta = {0, 0, 0};
  CHECK_THROWS_AS(hp.validate(), ValidationError);
  hp = HyperParams{};
  hp.pos_frac = 1.0;
  CHECK_THROWS_AS(hp.validate(), ValidationError);
}

TEST_CASE("minibatch invariants") {
  MiniBatch b;
  b.pairs.push_back({0, 0, 1, 1});
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b.pairs = {{0, 1, 1, 2}};  // positive at d=2
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b.pairs = {{0, 1, 0, 1}};  // negative at d=1
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b.pairs = {{0, 1, 1, 1}, {0, 2, 0, 2}, {1, 2, 0, kUnreachable}};
  b.validate();
}

TEST_CASE("negative weight values") {
  CHECK(negative_weight(kUnreachable, 5.0) == 1.0);
  CHECK(negative_weight(1, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(negative_weight(4, 2.0) == doctest::Approx(1.6487212707001282).epsilon(1e-15));
  CHECK_THROWS_AS(negative_weight(0, 1.0), ArgumentError);
  CHECK_THROWS_AS(negative_weight(2, -1.0), ArgumentError);
}

TEST_CASE("negative weight monotonicity and limit") {
  for (double beta : {0.0, 0.5, 1.0, 3.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= 50; ++d) {
      const double w = negative_weight(d, beta);
      CHECK(w >= 1.0);
      CHECK(w <= prev);
      prev = w;
    }
    CHECK(negative_weight(1000000, beta) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(negative_weight(kUnreachable, beta) == 1.0);
  }
}

TEST_CASE("ranking loss pinned examples") {
  HyperParams hp;  // gammas 1, bs 0
  Matrix rows(2, 2);
  rows << 1, 0, 1, 0;  // identical embeddings
  const auto emb = emb_from(rows, {0, 1}, EmbeddingKind::structure);

  MiniBatch positive;
  positive.pairs.push_back({0, 1, 1, 1});
  CHECK(ranking_loss(positive, emb, hp) == doctest::Approx(kPhiOne).epsilon(1e-12));

  Matrix ortho(2, 2);
  ortho << 1, 0, 0, 1;
  const auto emb2 = emb_from(ortho, {0, 1}, EmbeddingKind::structure);
  MiniBatch negative;
  negative.pairs.push_back({0, 1, 0, kUnreachable});
  CHECK(ranking_loss(negative, emb2, hp) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // two-pair mean over the cases above, on a 3-node embedding set
  Matrix three(3, 2);
  three << 1, 0, 1, 0, 0, 1;
  const auto emb3 = emb_from(three, {0, 1, 2}, EmbeddingKind::structure);
  MiniBatch both;
  both.pairs.push_back({0, 1, 1, 1});
  both.pairs.push_back({0, 2, 0, kUnreachable});
  CHECK(ranking_loss(both, emb3, hp) ==
        doctest::Approx(0.5 * (kPhiOne + std::log(2.0))).epsilon(1e-12));
  CHECK(0.5 * (kPhiOne + std::log(2.0)) == doctest::Approx(0.503204).epsilon(1e-6));

  MiniBatch empty;
  CHECK_THROWS_AS(ranking_loss(empty, emb, hp), ArgumentError);
}

TEST_CASE("tight alignment pinned examples") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 0, 2, 2;
  const auto za = emb_from(a, {0, 1}, EmbeddingKind::structure);
  CHECK(tight_align_loss(za, za) == doctest::Approx(-1.0).epsilon(1e-12));

  b << 0, 1, 2, -2;  // rowwise orthogonal to a
  const auto zb = emb_from(b, {0, 1}, EmbeddingKind::attribute);
  CHECK(tight_align_loss(za, zb) == doctest::Approx(0.0).epsilon(1e-12));

  // cosines 1.0 and 0.6 -> -0.8
  Matrix c(2, 2), d(2, 2);
  c << 1, 0, 3, 4;
  d << 2, 0, 5, 0;  // cos(row0)=1, cos(row1)=3/5
  CHECK(tight_align_loss(emb_from(c, {0, 1}, EmbeddingKind::structure),
                         emb_from(d, {0, 1}, EmbeddingKind::attribute)) ==
        doctest::Approx(-0.8).epsilon(1e-12));

  Matrix e(3, 2);
  e.setOnes();
  CHECK_THROWS_AS(tight_align_loss(za, emb_from(e, {0, 1, 2}, EmbeddingKind::attribute)),
                  ShapeError);
}

TEST_CASE("loose alignment pinned examples and reduction identity") {
  HyperParams hp;
  Matrix rows(2, 2);
  rows << 1, 0, 1, 0;
  const auto zs = emb_from(rows, {0, 1}, EmbeddingKind::structure);
  const auto za = emb_from(rows, {0, 1}, EmbeddingKind::attribute);
  MiniBatch pos;
  pos.pairs.push_back({0, 1, 1, 1});
  CHECK(loose_align_loss(pos, zs, za, hp) == doctest::Approx(kPhiOne).epsilon(1e-12));

  Matrix ortho(2, 2);
  ortho << 1, 0, 0, 1;
  const auto zo = emb_from(ortho, {0, 1}, EmbeddingKind::attribute);
  MiniBatch neg;
  neg.pairs.push_back({0, 1, 0, kUnreachable});
  CHECK(loose_align_loss(neg, zs, zo, hp) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // with identical blocks the loose alignment reduces to the ranking loss
  Rng rng(3);
  const auto z = random_embedding(8, 4, rng, EmbeddingKind::structure);
  const auto batch = random_batch(8, rng, 20);
  CHECK(loose_align_loss(batch, z, z, hp) ==
        doctest::Approx(ranking_loss(batch, z, hp)).epsilon(1e-12));
}

TEST_CASE("loose alignment asymmetry and mirror flag") {
  HyperParams hp;
  Rng rng(9);
  const auto zs = random_embedding(6, 3, rng, EmbeddingKind::structure);
  const auto za = random_embedding(6, 3, rng, EmbeddingKind::attribute);
  MiniBatch fwd, rev;
  fwd.pairs.push_back({0, 1, 1, 1});
  rev.pairs.push_back({1, 0, 1, 1});
  // stored orientation matters by default
  CHECK(loose_align_loss(fwd, zs, za, hp) != loose_align_loss(rev, zs, za, hp));
  hp.symmetrize_loose_align = true;
  CHECK(loose_align_loss(fwd, zs, za, hp) ==
        doctest::Approx(loose_align_loss(rev, zs, za, hp)).epsilon(1e-12));
}

TEST_CASE("total loss composition and masking") {
  Rng rng(21);
  const auto zs = random_embedding(10, 4, rng, EmbeddingKind::structure);
  const auto za = random_embedding(10, 4, rng, EmbeddingKind::attribute);
  const auto batch = random_batch(10, rng, 16);

  HyperParams hp;
  hp.theta = {1, 0, 0};
  CHECK(total_loss(batch, zs, za, hp) ==
        doctest::Approx(ranking_loss(batch, zs, hp)).epsilon(1e-12));

  hp.theta = {0, 0, 1};
  hp.align_mode = AlignMode::tight;
  CHECK(total_loss(batch, zs, zs, hp) == doctest::Approx(-1.0).epsilon(1e-12));

  // single positive pair, all embeddings equal and unit: three phi2(1) terms
  Matrix unit(2, 2);
  unit << 1, 0, 1, 0;
  const auto u1 = emb_from(unit, {0, 1}, EmbeddingKind::structure);
  const auto u2 = emb_from(unit, {0, 1}, EmbeddingKind::attribute);
  MiniBatch pos;
  pos.pairs.push_back({0, 1, 1, 1});
  hp = HyperParams{};
  hp.align_mode = AlignMode::loose;
  CHECK(total_loss(pos, u1, u2, hp) == doctest::Approx(3.0 * kPhiOne).epsilon(1e-12));
  CHECK(3.0 * kPhiOne == doctest::Approx(0.939785).epsilon(1e-5));
}

TEST_CASE("ranking loss is nonnegative") {
  Rng rng(55);
  HyperParams hp;
  hp.gamma1 = 2.5;
  hp.b1 = -0.5;
  hp.gamma2 = 0.7;
  hp.b2 = 1.0;
  hp.beta = 2.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = random_embedding(8, 3, rng, EmbeddingKind::structure);
    const auto batch = random_batch(8, rng, 12);
    CHECK(ranking_loss(batch, z, hp) >= 0.0);
  }
}

TEST_CASE("losses are invariant under positive row rescaling") {
  Rng rng(66);
  HyperParams hp;
  hp.beta = 1.5;
  for (int trial = 0; trial < 25; ++trial) {
    auto zs = random_embedding(8, 4, rng, EmbeddingKind::structure);
    auto za = random_embedding(8, 4, rng, EmbeddingKind::attribute);
    const auto batch = random_batch(8, rng, 10);
    const double before = total_loss(batch, zs, za, hp);
    const Index row = static_cast<Index>(rng.below(8));
    const double scale = rng.range(0.05, 20.0);
    Matrix scaled = zs.rows();
    scaled.row(row) *= scale;
    const auto zs2 = emb_from(scaled, zs.node_ids(), EmbeddingKind::structure);
    CHECK(total_loss(batch, zs2, za, hp) == doctest::Approx(before).epsilon(1e-9));
  }
}
