#include "deal/split.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "deal/error.hpp"
#include "deal/rng.hpp"

namespace deal {

namespace {

Edge canonical(NodeId u, NodeId v) { return {std::min(u, v), std::max(u, v)}; }

// Draws `count` distinct non-edges with both endpoints taken from `pool`
// (uniformly, by rejection). `used` carries pairs already taken by earlier
// sections so negatives never repeat across lists.
std::vector<Edge> sample_negatives(const AttributedGraph& graph, const std::vector<NodeId>& pool,
                                   std::size_t count, std::unordered_set<std::uint64_t>& used,
                                   Rng& rng) {
  std::vector<Edge> out;
  out.reserve(count);
  if (count == 0) return out;
  const std::size_t max_tries = 100 * count;
  std::size_t tries = 0;
  while (out.size() < count) {
    if (++tries > max_tries)
      throw SplitError("negative sampling exhausted after " + std::to_string(max_tries) +
                       " tries; not enough non-edges");
    NodeId u = pool[rng.below(pool.size())];
    NodeId v = pool[rng.below(pool.size())];
    if (u == v || graph.has_edge(u, v)) continue;
    if (!used.insert(edge_key(u, v)).second) continue;
    out.push_back(canonical(u, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> all_nodes(const AttributedGraph& graph) {
  std::vector<NodeId> ids(static_cast<std::size_t>(graph.num_nodes()));
  for (NodeId i = 0; i < graph.num_nodes(); ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

}  // namespace

SplitSpec split_transductive(const AttributedGraph& graph, double val_frac, double test_frac,
                             std::uint64_t seed) {
  if (val_frac < 0 || test_frac < 0 || val_frac + test_frac >= 1.0)
    throw ArgumentError("split_transductive: fractions must be nonnegative and sum below 1");
  if (graph.num_edges() < 10)
    throw ArgumentError("split_transductive: graph needs at least 10 edges");

  const std::size_t num_edges = graph.num_edges();
  const auto val_count = static_cast<std::size_t>(val_frac * static_cast<double>(num_edges));
  const auto test_count = static_cast<std::size_t>(test_frac * static_cast<double>(num_edges));

  Rng rng(seed);
  std::vector<std::size_t> order(num_edges);
  for (std::size_t i = 0; i < num_edges; ++i) order[i] = i;
  for (std::size_t i = num_edges - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);

  SplitSpec split;
  split.mode = SplitMode::transductive;
  split.seed = seed;
  const auto& edges = graph.edges();
  for (std::size_t i = 0; i < num_edges; ++i) {
    const Edge& e = edges[order[i]];
    if (i < val_count)
      split.val_pos.push_back(e);
    else if (i < val_count + test_count)
      split.test_pos.push_back(e);
    else
      split.train_edges.push_back(e);
  }
  std::sort(split.val_pos.begin(), split.val_pos.end());
  std::sort(split.test_pos.begin(), split.test_pos.end());
  std::sort(split.train_edges.begin(), split.train_edges.end());

  const auto pool = all_nodes(graph);
  std::unordered_set<std::uint64_t> used;
  split.val_neg = sample_negatives(graph, pool, val_count, used, rng);
  split.test_neg = sample_negatives(graph, pool, test_count, used, rng);
  return split;
}

SplitSpec split_inductive(const AttributedGraph& graph, double hidden_frac, double val_frac,
                          std::uint64_t seed) {
  if (!(hidden_frac > 0.0 && hidden_frac < 1.0))
    throw ArgumentError("split_inductive: hidden_frac must be in (0,1)");
  if (val_frac < 0 || val_frac >= 1.0)
    throw ArgumentError("split_inductive: val_frac must be in [0,1)");

  const auto n = static_cast<std::size_t>(graph.num_nodes());
  const auto hidden_count = static_cast<std::size_t>(hidden_frac * static_cast<double>(n));
  if (hidden_count == 0) throw ArgumentError("split_inductive: hidden set is empty at this size");

  Rng rng(seed);
  std::vector<NodeId> order = all_nodes(graph);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  const auto retained = n - hidden_count;
  const auto val_count = static_cast<std::size_t>(val_frac * static_cast<double>(retained));

  std::vector<NodeId> test_hidden(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hidden_count));
  std::vector<NodeId> val_hidden(order.begin() + static_cast<std::ptrdiff_t>(hidden_count),
                                 order.begin() + static_cast<std::ptrdiff_t>(hidden_count + val_count));
  std::sort(test_hidden.begin(), test_hidden.end());
  std::sort(val_hidden.begin(), val_hidden.end());

  auto in = [](const std::vector<NodeId>& sorted, NodeId u) {
    return std::binary_search(sorted.begin(), sorted.end(), u);
  };

  SplitSpec split;
  split.mode = SplitMode::inductive;
  split.seed = seed;
  for (const Edge& e : graph.edges()) {
    const bool ut = in(test_hidden, e.first), vt = in(test_hidden, e.second);
    const bool uv = in(val_hidden, e.first), vv = in(val_hidden, e.second);
    if (ut && vt)
      split.test_pos.push_back(e);
    else if (uv && vv)
      split.val_pos.push_back(e);
    else if (!ut && !vt && !uv && !vv)
      split.train_edges.push_back(e);
    // edges bridging a hidden node and the retained graph are discarded
  }
  if (split.test_pos.empty())
    throw SplitError("split_inductive: no edges between hidden nodes; try a different seed");
  if (val_count > 0 && split.val_pos.empty())
    throw SplitError("split_inductive: no edges between validation-hidden nodes; try a different seed");
  std::sort(split.test_pos.begin(), split.test_pos.end());
  std::sort(split.val_pos.begin(), split.val_pos.end());
  std::sort(split.train_edges.begin(), split.train_edges.end());

  std::unordered_set<std::uint64_t> used;
  split.test_neg = sample_negatives(graph, test_hidden, split.test_pos.size(), used, rng);
  split.val_neg = sample_negatives(graph, val_hidden, split.val_pos.size(), used, rng);

  split.hidden_nodes.reserve(hidden_count + val_count);
  split.hidden_nodes.insert(split.hidden_nodes.end(), test_hidden.begin(), test_hidden.end());
  split.hidden_nodes.insert(split.hidden_nodes.end(), val_hidden.begin(), val_hidden.end());
  std::sort(split.hidden_nodes.begin(), split.hidden_nodes.end());
  return split;
}

namespace {

void write_pairs(std::ostream& out, const char* header, const std::vector<Edge>& pairs) {
  out << header << '\n';
  for (const auto& [u, v] : pairs) out << u << '\t' << v << '\n';
}

}  // namespace

void write_split(const SplitSpec& split, std::ostream& out) {
  out << "#mode\n" << (split.mode == SplitMode::transductive ? "transductive" : "inductive") << '\n';
  out << "#hidden\n";
  for (NodeId u : split.hidden_nodes) out << u << '\n';
  write_pairs(out, "#train", split.train_edges);
  write_pairs(out, "#val_pos", split.val_pos);
  write_pairs(out, "#val_neg", split.val_neg);
  write_pairs(out, "#test_pos", split.test_pos);
  write_pairs(out, "#test_neg", split.test_neg);
  out << "#seed\n" << split.seed << '\n';
}

SplitSpec read_split(std::istream& in) {
  SplitSpec split;
  std::string line, section;
  std::size_t line_no = 0;
  bool have_mode = false;

  auto pair_list = [&](const std::string& name) -> std::vector<Edge>* {
    if (name == "#train") return &split.train_edges;
    if (name == "#val_pos") return &split.val_pos;
    if (name == "#val_neg") return &split.val_neg;
    if (name == "#test_pos") return &split.test_pos;
    if (name == "#test_neg") return &split.test_neg;
    return nullptr;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      section = line;
      continue;
    }
    if (section == "#mode") {
      if (line == "transductive")
        split.mode = SplitMode::transductive;
      else if (line == "inductive")
        split.mode = SplitMode::inductive;
      else
        throw ParseError("split: line " + std::to_string(line_no) + ": unknown mode \"" + line + "\"");
      have_mode = true;
    } else if (section == "#hidden") {
      split.hidden_nodes.push_back(static_cast<NodeId>(std::stol(line)));
    } else if (section == "#seed") {
      split.seed = std::stoull(line);
    } else if (auto* list = pair_list(section)) {
      long long u = 0, v = 0;
      const char* s = line.c_str();
      char* mid = nullptr;
      u = std::strtoll(s, &mid, 10);
      if (mid == s) throw ParseError("split: malformed pair at line " + std::to_string(line_no));
      char* end = nullptr;
      v = std::strtoll(mid, &end, 10);
      if (end == mid) throw ParseError("split: malformed pair at line " + std::to_string(line_no));
      list->emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    } else {
      throw ParseError("split: line " + std::to_string(line_no) + " outside any known section");
    }
  }
  if (!have_mode) throw ParseError("split: missing #mode section");
  std::sort(split.hidden_nodes.begin(), split.hidden_nodes.end());
  return split;
}

void write_split_file(const SplitSpec& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write split file: " + path);
  write_split(split, out);
}

SplitSpec read_split_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file: " + path);
  return read_split(in);
}

void validate_split(const SplitSpec& split, const AttributedGraph& graph) {
  auto check_pos = [&](const std::vector<Edge>& pairs, const char* name) {
    for (const auto& [u, v] : pairs) {
      if (!graph.has_edge(u, v))
        throw ValidationError(std::string("split: ") + name + " pair is not a graph edge");
    }
  };
  auto check_neg = [&](const std::vector<Edge>& pairs, const char* name) {
    for (const auto& [u, v] : pairs) {
      if (u == v) throw ValidationError(std::string("split: ") + name + " pair has equal endpoints");
      if (graph.has_edge(u, v))
        throw ValidationError(std::string("split: ") + name + " pair is a graph edge");
    }
  };
  check_pos(split.train_edges, "train");
  check_pos(split.val_pos, "val_pos");
  check_pos(split.test_pos, "test_pos");
  check_neg(split.val_neg, "val_neg");
  check_neg(split.test_neg, "test_neg");
  if (split.val_neg.size() != split.val_pos.size() || split.test_neg.size() != split.test_pos.size())
    throw ValidationError("split: negative list counts do not match positives");

  std::set<Edge> seen;
  for (const auto* list : {&split.train_edges, &split.val_pos, &split.test_pos}) {
    for (const auto& e : *list) {
      if (!seen.insert(canonical(e.first, e.second)).second)
        throw ValidationError("split: positive pair appears in two sections");
    }
  }

  if (split.mode == SplitMode::inductive) {
    for (const auto& [u, v] : split.train_edges) {
      if (split.is_hidden(u) || split.is_hidden(v))
        throw ValidationError("split: train edge touches a hidden node");
    }
    for (const auto* list : {&split.test_pos, &split.test_neg}) {
      for (const auto& [u, v] : *list) {
        if (!split.is_hidden(u) || !split.is_hidden(v))
          throw ValidationError("split: test pair endpoint outside the hidden set");
      }
    }
  } else if (!split.hidden_nodes.empty()) {
    throw ValidationError("split: transductive split must not list hidden nodes");
  }
}

}  // namespace deal
