#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "deal/graph.hpp"

namespace deal {

enum class SplitMode { transductive, inductive };

/// Deterministic train/validation/test partition of node pairs. Positive
/// lists hold true edges of the source graph; negative lists hold sampled
/// non-edges of equal count. In inductive mode `hidden_nodes` is the set of
/// nodes the training side must never see (test holdout plus the
/// validation holdout carved from the retained subgraph).
struct SplitSpec {
  SplitMode mode = SplitMode::transductive;
  std::vector<Edge> train_edges;
  std::vector<Edge> val_pos, val_neg;
  std::vector<Edge> test_pos, test_neg;
  std::vector<NodeId> hidden_nodes;  // sorted; empty in transductive mode
  std::uint64_t seed = 0;

  bool is_hidden(NodeId u) const {
    return std::binary_search(hidden_nodes.begin(), hidden_nodes.end(), u);
  }
};

/// Samples floor(val_frac*|E|) validation and floor(test_frac*|E|) test
/// positives without replacement, equal-count negatives uniformly from the
/// non-edges, and leaves the rest as training edges.
SplitSpec split_transductive(const AttributedGraph& graph, double val_frac, double test_frac,
                             std::uint64_t seed);

/// Hides floor(hidden_frac*n) nodes; edges between hidden nodes become test
/// positives. A disjoint floor(val_frac*|retained|) node subset is hidden
/// the same way to build the validation set. Edges touching exactly one
/// hidden node are discarded; the rest train the model.
SplitSpec split_inductive(const AttributedGraph& graph, double hidden_frac, double val_frac,
                          std::uint64_t seed);

/// Line-oriented text format with #mode/#hidden/#train/#val_pos/#val_neg/
/// #test_pos/#test_neg/#seed sections.
void write_split(const SplitSpec& split, std::ostream& out);
SplitSpec read_split(std::istream& in);

void write_split_file(const SplitSpec& split, const std::string& path);
SplitSpec read_split_file(const std::string& path);

/// Checks the split against its source graph: positives are true edges and
/// pairwise disjoint across sections, negatives are non-edges with distinct
/// endpoints, counts balance, and in inductive mode no train edge touches a
/// hidden node. Throws ValidationError on the first violation.
void validate_split(const SplitSpec& split, const AttributedGraph& graph);

}  // namespace deal
