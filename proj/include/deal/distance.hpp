#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "deal/graph.hpp"

namespace deal {

/// Hop distance reported for pairs that are unreachable, beyond the cap,
/// or simply not cached.
inline constexpr int kUnreachable = -1;

/// Truncated BFS distances from a fixed set of source nodes. Immutable
/// after construction; lookups are safe from many threads.
class DistanceCache {
 public:
  DistanceCache() = default;

  /// Hop distance between u and v if either direction is cached and within
  /// the cap, else kUnreachable.
  int distance(NodeId u, NodeId v) const {
    int d = lookup(u, v);
    if (d != kUnreachable) return d;
    return lookup(v, u);
  }

  bool has_source(NodeId u) const { return source_slot_.count(u) > 0; }
  int max_hops() const { return max_hops_; }
  std::size_t num_sources() const { return source_slot_.size(); }

 private:
  friend DistanceCache bfs_distances(NodeId num_nodes,
                                     const std::vector<std::vector<NodeId>>& adjacency,
                                     std::span<const NodeId> sources, int max_hops);

  int lookup(NodeId src, NodeId dst) const {
    auto slot = source_slot_.find(src);
    if (slot == source_slot_.end()) return kUnreachable;
    const auto& nodes = reached_nodes_[slot->second];
    auto it = std::lower_bound(nodes.begin(), nodes.end(), dst);
    if (it == nodes.end() || *it != dst) return kUnreachable;
    return reached_dists_[slot->second][static_cast<std::size_t>(it - nodes.begin())];
  }

  std::unordered_map<NodeId, std::size_t> source_slot_;
  // per source: nodes reached within the cap (sorted) and their hop counts
  std::vector<std::vector<NodeId>> reached_nodes_;
  std::vector<std::vector<std::uint16_t>> reached_dists_;
  int max_hops_ = 0;
};

/// Breadth-first hop distances from each source over the given adjacency,
/// truncated at max_hops.
DistanceCache bfs_distances(NodeId num_nodes, const std::vector<std::vector<NodeId>>& adjacency,
                            std::span<const NodeId> sources, int max_hops);

/// As above, over the full edge set of `graph`.
DistanceCache shortest_path_distances(const AttributedGraph& graph,
                                      std::span<const NodeId> sources, int max_hops);

/// Builds an adjacency list from an explicit edge subset (used to compute
/// distances over the training subgraph only).
std::vector<std::vector<NodeId>> adjacency_from_edges(NodeId num_nodes,
                                                      std::span<const Edge> edges);

}  // namespace deal
