#include "deal/distance.hpp"

#include <algorithm>
#include <deque>

#include "deal/error.hpp"

namespace deal {

DistanceCache bfs_distances(NodeId num_nodes, const std::vector<std::vector<NodeId>>& adjacency,
                            std::span<const NodeId> sources, int max_hops) {
  if (max_hops < 1) throw ArgumentError("bfs_distances: max_hops must be >= 1");

  DistanceCache cache;
  cache.max_hops_ = max_hops;
  cache.reached_nodes_.reserve(sources.size());
  cache.reached_dists_.reserve(sources.size());

  std::vector<int> dist(static_cast<std::size_t>(num_nodes), kUnreachable);
  std::vector<NodeId> frontier, next, touched;

  for (NodeId src : sources) {
    if (src < 0 || src >= num_nodes)
      throw ArgumentError("bfs_distances: invalid source node " + std::to_string(src));
    if (cache.source_slot_.count(src)) continue;  // duplicate source, keep first

    touched.clear();
    frontier.assign(1, src);
    dist[static_cast<std::size_t>(src)] = 0;
    touched.push_back(src);
    for (int hop = 1; hop <= max_hops && !frontier.empty(); ++hop) {
      next.clear();
      for (NodeId u : frontier) {
        for (NodeId v : adjacency[static_cast<std::size_t>(u)]) {
          auto& d = dist[static_cast<std::size_t>(v)];
          if (d == kUnreachable) {
            d = hop;
            touched.push_back(v);
            next.push_back(v);
          }
        }
      }
      frontier.swap(next);
    }

    std::sort(touched.begin(), touched.end());
    std::vector<std::uint16_t> dists(touched.size());
    for (std::size_t i = 0; i < touched.size(); ++i)
      dists[i] = static_cast<std::uint16_t>(dist[static_cast<std::size_t>(touched[i])]);

    cache.source_slot_.emplace(src, cache.reached_nodes_.size());
    cache.reached_nodes_.push_back(touched);
    cache.reached_dists_.push_back(std::move(dists));

    for (NodeId u : touched) dist[static_cast<std::size_t>(u)] = kUnreachable;
  }
  return cache;
}

DistanceCache shortest_path_distances(const AttributedGraph& graph,
                                      std::span<const NodeId> sources, int max_hops) {
  return bfs_distances(graph.num_nodes(), graph.adjacency(), sources, max_hops);
}

std::vector<std::vector<NodeId>> adjacency_from_edges(NodeId num_nodes,
                                                      std::span<const Edge> edges) {
  std::vector<std::vector<NodeId>> adjacency(static_cast<std::size_t>(num_nodes));
  for (const auto& [u, v] : edges) {
    adjacency[static_cast<std::size_t>(u)].push_back(v);
    adjacency[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
  return adjacency;
}

}  // namespace deal
