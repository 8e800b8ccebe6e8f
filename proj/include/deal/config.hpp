#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "deal/eval.hpp"
#include "deal/graph.hpp"
#include "deal/training.hpp"

namespace deal {

/// Flat key -> value configuration. Every known key carries a default;
/// setting an unknown key is a hard error. The echo() output is itself a
/// valid config file reproducing the effective state of a run.
class RunConfig {
 public:
  RunConfig();

  /// Reads "key = value" lines; '#' starts a comment, blank lines ignored.
  void load_file(const std::string& path);
  void load_stream(std::istream& in, const std::string& origin);

  void set(const std::string& key, const std::string& value);
  /// Parses a single "key=value" override (the --set flag).
  void set_pair(const std::string& pair);

  bool is_set(const std::string& key) const;  // value non-empty
  const std::string& raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// "a:b:c" triples.
  std::array<double, 3> get_triple(const std::string& key) const;
  /// Comma-separated doubles; empty value gives an empty list.
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::array<double, 3>> get_triple_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Sorted "key = value" lines for every key.
  std::string echo() const;

  // Typed views assembled from several keys.
  FeatureNorm feature_norm() const;
  SplitMode split_mode() const;
  SplitRecipe split_recipe() const;
  HyperParams hyper_params() const;  // eval.lambda "auto" resolves by mode
  TrainConfig train_config() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace deal
