#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "deal/commands.hpp"
#include "deal/config.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string seed, trials, out;
  std::vector<std::string> overrides;
};

void attach_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "config file (key = value lines)");
  cmd->add_option("--seed", flags.seed, "base random seed");
  cmd->add_option("--trials", flags.trials, "number of evaluation trials");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--set", flags.overrides, "override a config key, key=value")
      ->take_all();
}

deal::RunConfig build_config(const CommonFlags& flags) {
  deal::RunConfig config;
  if (!flags.config_path.empty()) config.load_file(flags.config_path);
  for (const auto& pair : flags.overrides) config.set_pair(pair);
  // dedicated flags win over file values and --set
  if (!flags.seed.empty()) config.set("seed", flags.seed);
  if (!flags.trials.empty()) config.set("eval.trials", flags.trials);
  if (!flags.out.empty()) config.set("out", flags.out);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-encoder graph embedding toolchain for link prediction"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> pairs;

  CLI::App* split = app.add_subcommand("split", "generate a train/val/test split");
  CLI::App* train = app.add_subcommand("train", "train both encoders on a split");
  CLI::App* eval = app.add_subcommand("eval", "evaluate: multi-trial protocol or a checkpoint");
  CLI::App* sweep = app.add_subcommand("sweep", "grid search over hyper-parameters");
  CLI::App* diagnose = app.add_subcommand("diagnose", "per-hop embedding similarity profile");
  CLI::App* predict = app.add_subcommand("predict", "score node pairs with a checkpoint");
  for (CLI::App* cmd : {split, train, eval, sweep, diagnose, predict}) attach_common(cmd, flags);
  predict->add_option("pairs", pairs, "pairs A,B; each side a node id or @attribute-file");

  CLI11_PARSE(app, argc, argv);

  try {
    const deal::RunConfig config = build_config(flags);
    if (split->parsed()) return deal::cmd_split(config);
    if (train->parsed()) return deal::cmd_train(config);
    if (eval->parsed()) return deal::cmd_eval(config);
    if (sweep->parsed()) return deal::cmd_sweep(config);
    if (diagnose->parsed()) return deal::cmd_diagnose(config);
    if (predict->parsed()) return deal::cmd_predict(config, pairs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
