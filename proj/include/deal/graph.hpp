#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <unordered_set>
#include <utility>
#include <vector>

#include "deal/math.hpp"

namespace deal {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;  // canonical: first < second

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

struct LoadWarnings {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_dropped = 0;
};

/// Undirected graph with one sparse attribute vector per node. Immutable
/// after construction; safe to share across threads.
class AttributedGraph {
 public:
  AttributedGraph(NodeId num_nodes, Index num_attrs, std::vector<Edge> edges,
                  SparseRowMatrix features);

  NodeId num_nodes() const { return num_nodes_; }
  Index num_attrs() const { return num_attrs_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Row i holds the attribute vector of node i (num_nodes x num_attrs).
  const SparseRowMatrix& features() const { return features_; }

  const std::vector<std::vector<NodeId>>& adjacency() const { return adjacency_; }

  bool has_edge(NodeId u, NodeId v) const { return edge_set_.count(edge_key(u, v)) > 0; }

 private:
  NodeId num_nodes_;
  Index num_attrs_;
  std::vector<Edge> edges_;
  SparseRowMatrix features_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::unordered_set<std::uint64_t> edge_set_;
};

/// Reads the edge stream (header "n m", then "u<TAB>v" lines) and the sparse
/// feature stream ("node<TAB>attr<TAB>value" lines). Self-loops are dropped
/// and duplicate (or reversed-duplicate) edges collapsed, each counted into
/// `warnings` when given.
AttributedGraph load_graph(std::istream& edges_source, std::istream& features_source,
                           LoadWarnings* warnings = nullptr);

/// Convenience overload opening the two files by path.
AttributedGraph load_graph_files(const std::string& edges_path, const std::string& features_path,
                                 LoadWarnings* warnings = nullptr);

/// Writes the graph back out in the exact load_graph format.
void save_graph(const AttributedGraph& graph, std::ostream& edges_out,
                std::ostream& features_out);

/// Rescales every attribute row to unit L1 or L2 norm (all-zero rows stay
/// zero). Returns a new graph with the same structure.
enum class FeatureNorm { none, l1, l2 };
AttributedGraph normalize_features(const AttributedGraph& graph, FeatureNorm norm);

}  // namespace deal
