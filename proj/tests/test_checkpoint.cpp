#include <doctest.h>

#include <sstream>

#include "deal/checkpoint.hpp"
#include "deal/error.hpp"

using namespace deal;

namespace {

Checkpoint sample_checkpoint(std::uint64_t seed) {
  Rng rng(seed);
  Checkpoint ckpt;
  ckpt.params.attr = init_attr_encoder(7, 5, 3, 2, 1.25, rng);
  ckpt.params.structure = init_struct_encoder(4, 3, rng);
  ckpt.hp.gamma1 = 2.5;
  ckpt.hp.b1 = 0.1;
  ckpt.hp.gamma2 = 3.5;
  ckpt.hp.b2 = -0.25;
  ckpt.hp.beta = 0.75;
  ckpt.hp.theta = {0.1, 0.85, 0.05};
  ckpt.hp.lambda = {0.0, 0.7, 0.3};
  ckpt.hp.align_mode = AlignMode::tight;
  ckpt.hp.batch_size = 256;
  ckpt.hp.pos_frac = 0.4;
  // exercise exact decimal round-tripping with awkward values
  ckpt.params.attr.layers[0].weight(0, 0) = 1.0 / 3.0;
  ckpt.params.structure.directions(0, 0) = -1.2345678901234567e-13;
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round trip is exact") {
  const Checkpoint ckpt = sample_checkpoint(5);
  std::ostringstream out;
  write_checkpoint(ckpt, out);
  std::istringstream in(out.str());
  const Checkpoint back = read_checkpoint(in);

  CHECK(back.params.attr.layers.size() == 2);
  CHECK(back.params.attr.layers[0].weight == ckpt.params.attr.layers[0].weight);
  CHECK(back.params.attr.layers[0].bias == ckpt.params.attr.layers[0].bias);
  CHECK(back.params.attr.layers[1].weight == ckpt.params.attr.layers[1].weight);
  CHECK(back.params.structure.directions == ckpt.params.structure.directions);
  CHECK(back.params.structure.scales == ckpt.params.structure.scales);
  CHECK(back.params.attr.elu_alpha == ckpt.params.attr.elu_alpha);
  CHECK(back.hp.gamma1 == ckpt.hp.gamma1);
  CHECK(back.hp.b2 == ckpt.hp.b2);
  CHECK(back.hp.theta == ckpt.hp.theta);
  CHECK(back.hp.lambda == ckpt.hp.lambda);
  CHECK(back.hp.align_mode == AlignMode::tight);
  CHECK(back.hp.batch_size == 256);

  // serialization itself is stable
  std::ostringstream out2;
  write_checkpoint(back, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("checkpoint header and version are enforced") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_checkpoint(empty), ParseError);
  std::istringstream wrong("deal-checkpoint v2\n");
  CHECK_THROWS_AS(read_checkpoint(wrong), ParseError);
  std::istringstream junk("deal-checkpoint v1\nbogus line\n");
  CHECK_THROWS_AS(read_checkpoint(junk), ParseError);
}

TEST_CASE("checkpoint requires all tensors") {
  const Checkpoint ckpt = sample_checkpoint(9);
  std::ostringstream out;
  write_checkpoint(ckpt, out);
  const std::string text = out.str();
  // drop the scales tensor at the end
  const std::string cut = text.substr(0, text.find("tensor struct.scales"));
  std::istringstream in(cut);
  CHECK_THROWS_AS(read_checkpoint(in), ParseError);
}

TEST_CASE("checkpoint begins with the versioned header line") {
  const Checkpoint ckpt = sample_checkpoint(11);
  std::ostringstream out;
  write_checkpoint(ckpt, out);
  CHECK(out.str().rfind("deal-checkpoint v1\n", 0) == 0);
}
