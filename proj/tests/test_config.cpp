#include <doctest.h>

#include <sstream>

#include "deal/config.hpp"
#include "deal/error.hpp"

using namespace deal;

TEST_CASE("defaults cover the documented keys") {
  RunConfig config;
  CHECK(config.get_int("embed.dim") == 64);
  CHECK(config.get_int("attr.hidden") == 256);
  CHECK(config.get_int("batch.size") == 512);
  CHECK(config.get_double("batch.pos_frac") == 0.40);
  CHECK(config.get_int("train.epochs") == 500);
  CHECK(config.get_double("train.lr") == 0.01);
  CHECK(config.get_int("train.eval_every") == 5);
  CHECK(config.get_int("train.patience") == 10);
  CHECK(config.get_int("dist.max_hops") == 5);
  CHECK(config.get_string("loss.align") == "loose");
  CHECK(config.get_double("loss.gamma1") == 1.0);
  CHECK(config.get_int("eval.trials") == 10);
}

TEST_CASE("file parsing with comments and overrides") {
  std::istringstream file(
      "# a comment line\n"
      "loss.gamma1 = 2.5   # trailing comment\n"
      "\n"
      "loss.theta = 0.1:0.85:0.05\n"
      "split.mode = inductive\n");
  RunConfig config;
  config.load_stream(file, "test");
  CHECK(config.get_double("loss.gamma1") == 2.5);
  const auto theta = config.get_triple("loss.theta");
  CHECK(theta[1] == 0.85);
  CHECK(config.split_mode() == SplitMode::inductive);
  config.set_pair("loss.gamma1=4");
  CHECK(config.get_double("loss.gamma1") == 4.0);
}

TEST_CASE("unknown keys are hard errors") {
  RunConfig config;
  CHECK_THROWS_AS(config.set("loss.gamm1", "2"), ConfigError);
  CHECK_THROWS_AS(config.raw("nope"), ConfigError);
  std::istringstream file("unknown.key = 3\n");
  CHECK_THROWS_AS(config.load_stream(file, "test"), ConfigError);
  std::istringstream bad("loss.gamma1 2.5\n");
  CHECK_THROWS_AS(config.load_stream(bad, "test"), ConfigError);
}

TEST_CASE("typed getters validate") {
  RunConfig config;
  config.set("train.epochs", "12.5");
  CHECK_THROWS_AS(config.get_int("train.epochs"), ConfigError);
  config.set("loss.theta", "1:2");
  CHECK_THROWS_AS(config.get_triple("loss.theta"), ConfigError);
  config.set("loss.theta", "1:2:3:4");
  CHECK_THROWS_AS(config.get_triple("loss.theta"), ConfigError);
  config.set("loss.symmetrize_loose", "maybe");
  CHECK_THROWS_AS(config.get_bool("loss.symmetrize_loose"), ConfigError);
  config.set("sweep.gamma", "1, 2.5 ,4");
  const auto list = config.get_double_list("sweep.gamma");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);
  CHECK(config.get_double_list("sweep.beta").empty());
}

TEST_CASE("echo replays to an identical config") {
  RunConfig config;
  config.set("loss.gamma1", "3.5");
  config.set("data.edges", "data/cora.edges");
  config.set("split.mode", "inductive");
  const std::string echoed = config.echo();

  RunConfig replay;
  std::istringstream in(echoed);
  replay.load_stream(in, "echo");
  CHECK(replay.echo() == echoed);
  CHECK(replay.get_double("loss.gamma1") == 3.5);
}

TEST_CASE("eval.lambda auto resolves by mode") {
  RunConfig config;
  CHECK(config.hyper_params().lambda ==
        std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  config.set("split.mode", "inductive");
  CHECK(config.hyper_params().lambda == std::array<double, 3>{0.0, 0.7, 0.3});
  config.set("eval.lambda", "0.2:0.5:0.3");
  CHECK(config.hyper_params().lambda == std::array<double, 3>{0.2, 0.5, 0.3});
}

TEST_CASE("train_config assembles and validates") {
  RunConfig config;
  config.set("loss.align", "tight");
  config.set("train.optimizer", "sgd");
  config.set("batch.size", "64");
  const TrainConfig cfg = config.train_config();
  CHECK(cfg.hp.align_mode == AlignMode::tight);
  CHECK(cfg.optimizer == "sgd");
  CHECK(cfg.hp.batch_size == 64);
  config.set("train.optimizer", "newton");
  CHECK_THROWS_AS(config.train_config(), ValidationError);
}
