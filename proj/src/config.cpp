#include "deal/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "deal/error.hpp"

namespace deal {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> defaults = {
      {"data.edges", ""},
      {"data.features", ""},
      {"data.feature_norm", "none"},
      {"split.mode", "transductive"},
      {"split.val_frac", "0.10"},
      {"split.test_frac", "0.10"},
      {"split.hidden_frac", "0.10"},
      {"split.path", ""},
      {"dist.max_hops", "5"},
      {"embed.dim", "64"},
      {"attr.depth", "2"},
      {"attr.hidden", "256"},
      {"attr.elu_alpha", "1.0"},
      {"loss.gamma1", "1.0"},
      {"loss.b1", "0.0"},
      {"loss.gamma2", "1.0"},
      {"loss.b2", "0.0"},
      {"loss.beta", "1.0"},
      {"loss.theta", "1:1:1"},
      {"loss.align", "loose"},
      {"loss.symmetrize_loose", "false"},
      {"loss.tight_full_graph", "false"},
      {"batch.size", "512"},
      {"batch.pos_frac", "0.40"},
      {"train.epochs", "500"},
      {"train.batches_per_epoch", "0"},
      {"train.optimizer", "adam"},
      {"train.lr", "0.01"},
      {"train.adam_decay1", "0.9"},
      {"train.adam_decay2", "0.999"},
      {"train.adam_epsilon", "1e-8"},
      {"train.eval_every", "5"},
      {"train.patience", "10"},
      {"eval.lambda", "auto"},
      {"eval.trials", "10"},
      {"eval.set", "test"},
      {"model.checkpoint", ""},
      {"seed", "1"},
      {"out", "out"},
      {"diag.h_max", "5"},
      {"diag.max_pairs_per_hop", "20000"},
      {"diag.kind", "both"},
      {"sweep.gamma", ""},
      {"sweep.gamma1", ""},
      {"sweep.gamma2", ""},
      {"sweep.b", ""},
      {"sweep.b1", ""},
      {"sweep.b2", ""},
      {"sweep.beta", ""},
      {"sweep.theta", ""},
      {"sweep.lambda", ""},
      {"sweep.align", ""},
      {"sweep.trials", "1"},
      {"sweep.jobs", "1"},
  };
  return defaults;
}

std::array<double, 3> parse_triple(const std::string& key, const std::string& s) {
  std::array<double, 3> out{};
  std::stringstream ss(s);
  std::string tok;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(ss, tok, ':'))
      throw ConfigError("config: " + key + ": expected a:b:c triple, got \"" + s + "\"");
    char* end = nullptr;
    out[static_cast<std::size_t>(i)] = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
      throw ConfigError("config: " + key + ": malformed number \"" + tok + "\"");
  }
  std::string rest;
  if (std::getline(ss, rest, ':'))
    throw ConfigError("config: " + key + ": too many components in \"" + s + "\"");
  return out;
}

}  // namespace

RunConfig::RunConfig() : values_(default_values()) {}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  load_stream(in, path);
}

void RunConfig::load_stream(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: unknown key \"" + key + "\"");
  it->second = value;
}

void RunConfig::set_pair(const std::string& pair) {
  const std::size_t eq = pair.find('=');
  if (eq == std::string::npos) throw ConfigError("config: --set expects key=value, got \"" + pair + "\"");
  set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
}

bool RunConfig::is_set(const std::string& key) const { return !raw(key).empty(); }

const std::string& RunConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: unknown key \"" + key + "\"");
  return it->second;
}

std::string RunConfig::get_string(const std::string& key) const { return raw(key); }

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = raw(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("config: " + key + ": malformed number \"" + s + "\"");
  return v;
}

int RunConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config: " + key + ": expected integer, got \"" + raw(key) + "\"");
  return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& s = raw(key);
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected unsigned integer, got \"" + s + "\"");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  std::string s = raw(key);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: " + key + ": expected boolean, got \"" + raw(key) + "\"");
}

std::array<double, 3> RunConfig::get_triple(const std::string& key) const {
  return parse_triple(key, raw(key));
}

std::vector<std::string> RunConfig::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  const std::string& s = raw(key);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : get_string_list(key)) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw ConfigError("config: " + key + ": malformed number \"" + tok + "\"");
    out.push_back(v);
  }
  return out;
}

std::vector<std::array<double, 3>> RunConfig::get_triple_list(const std::string& key) const {
  std::vector<std::array<double, 3>> out;
  for (const auto& tok : get_string_list(key)) out.push_back(parse_triple(key, tok));
  return out;
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
  return out.str();
}

FeatureNorm RunConfig::feature_norm() const {
  const std::string s = raw("data.feature_norm");
  if (s == "none") return FeatureNorm::none;
  if (s == "l1") return FeatureNorm::l1;
  if (s == "l2") return FeatureNorm::l2;
  throw ConfigError("config: data.feature_norm must be none, l1 or l2");
}

SplitMode RunConfig::split_mode() const {
  const std::string s = raw("split.mode");
  if (s == "transductive") return SplitMode::transductive;
  if (s == "inductive") return SplitMode::inductive;
  throw ConfigError("config: split.mode must be transductive or inductive");
}

SplitRecipe RunConfig::split_recipe() const {
  SplitRecipe recipe;
  recipe.mode = split_mode();
  recipe.val_frac = get_double("split.val_frac");
  recipe.test_frac = get_double("split.test_frac");
  recipe.hidden_frac = get_double("split.hidden_frac");
  return recipe;
}

HyperParams RunConfig::hyper_params() const {
  HyperParams hp;
  hp.gamma1 = get_double("loss.gamma1");
  hp.b1 = get_double("loss.b1");
  hp.gamma2 = get_double("loss.gamma2");
  hp.b2 = get_double("loss.b2");
  hp.beta = get_double("loss.beta");
  hp.theta = get_triple("loss.theta");
  const std::string align = raw("loss.align");
  if (align == "tight")
    hp.align_mode = AlignMode::tight;
  else if (align == "loose")
    hp.align_mode = AlignMode::loose;
  else
    throw ConfigError("config: loss.align must be tight or loose");
  hp.batch_size = get_int("batch.size");
  hp.pos_frac = get_double("batch.pos_frac");
  hp.symmetrize_loose_align = get_bool("loss.symmetrize_loose");
  if (raw("eval.lambda") == "auto") {
    hp.lambda = split_mode() == SplitMode::transductive
                    ? std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}
                    : std::array<double, 3>{0.0, 0.7, 0.3};
  } else {
    hp.lambda = get_triple("eval.lambda");
  }
  hp.validate();
  return hp;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.hp = hyper_params();
  cfg.epochs = get_int("train.epochs");
  cfg.batches_per_epoch = get_int("train.batches_per_epoch");
  cfg.embed_dim = get_int("embed.dim");
  cfg.attr_hidden = get_int("attr.hidden");
  cfg.attr_depth = get_int("attr.depth");
  cfg.elu_alpha = get_double("attr.elu_alpha");
  cfg.max_hops = get_int("dist.max_hops");
  cfg.optimizer = raw("train.optimizer");
  cfg.learning_rate = get_double("train.lr");
  cfg.adam_decay1 = get_double("train.adam_decay1");
  cfg.adam_decay2 = get_double("train.adam_decay2");
  cfg.adam_epsilon = get_double("train.adam_epsilon");
  cfg.eval_every = get_int("train.eval_every");
  cfg.patience = get_int("train.patience");
  cfg.seed = get_u64("seed");
  cfg.loss_options.tight_full_graph = get_bool("loss.tight_full_graph");
  cfg.validate();
  return cfg;
}

}  // namespace deal
