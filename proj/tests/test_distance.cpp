#include <doctest.h>

#include <sstream>

#include "deal/distance.hpp"
#include "deal/error.hpp"
#include "deal/rng.hpp"

using namespace deal;

namespace {

AttributedGraph make_graph(NodeId n, const std::vector<Edge>& edges) {
  SparseRowMatrix feats(n, 1);
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}};
  feats.setFromTriplets(t.begin(), t.end());
  return AttributedGraph(n, 1, edges, feats);
}

// Brute-force all-pairs oracle, capped like the BFS cache.
std::vector<std::vector<int>> floyd_warshall(NodeId n, const std::vector<Edge>& edges, int cap) {
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (NodeId i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [u, v] : edges) d[u][v] = d[v][u] = 1;
  for (NodeId k = 0; k < n; ++k)
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (d[i][j] > cap) d[i][j] = kUnreachable;
  return d;
}

std::vector<NodeId> range_ids(NodeId n) {
  std::vector<NodeId> ids(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

}  // namespace

TEST_CASE("path graph distances") {
  const auto g = make_graph(3, {{0, 1}, {1, 2}});
  const NodeId sources[] = {0};
  const auto cache = shortest_path_distances(g, sources, 5);
  CHECK(cache.distance(0, 0) == 0);
  CHECK(cache.distance(0, 1) == 1);
  CHECK(cache.distance(0, 2) == 2);
  CHECK(cache.distance(1, 0) == 1);  // symmetric lookup through the source
}

TEST_CASE("disconnected pair is unreachable") {
  const auto g = make_graph(3, {{0, 1}});
  const NodeId sources[] = {0};
  const auto cache = shortest_path_distances(g, sources, 5);
  CHECK(cache.distance(0, 2) == kUnreachable);
}

TEST_CASE("5-cycle capped at one hop") {
  const auto g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
  const auto oracle = floyd_warshall(5, g.edges(), 1);
  const NodeId sources[] = {0};
  const auto cache = shortest_path_distances(g, sources, 1);
  CHECK(cache.distance(0, 1) == 1);
  CHECK(oracle[0][2] == kUnreachable);  // true distance 2, beyond cap
  CHECK(cache.distance(0, 2) == kUnreachable);
}

TEST_CASE("invalid source rejected") {
  const auto g = make_graph(3, {{0, 1}});
  const NodeId bad[] = {7};
  CHECK_THROWS_AS(shortest_path_distances(g, bad, 3), ArgumentError);
  const NodeId ok[] = {0};
  CHECK_THROWS_AS(shortest_path_distances(g, ok, 0), ArgumentError);
}

TEST_CASE("BFS cache equals Floyd-Warshall on random graphs") {
  Rng rng(12345);
  for (int trial = 0; trial < 25; ++trial) {
    const NodeId n = 5 + static_cast<NodeId>(rng.below(46));
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (rng.unit() < 0.08) edges.emplace_back(u, v);
    if (edges.empty()) edges.emplace_back(0, 1);
    const auto g = make_graph(n, edges);
    const int cap = 1 + static_cast<int>(rng.below(6));
    const auto ids = range_ids(n);
    const auto cache = shortest_path_distances(g, ids, cap);
    const auto oracle = floyd_warshall(n, edges, cap);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        CHECK(cache.distance(u, v) == oracle[u][v]);
      }
    }
  }
}

TEST_CASE("symmetry on cached pairs") {
  Rng rng(99);
  const NodeId n = 30;
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.unit() < 0.1) edges.emplace_back(u, v);
  if (edges.empty()) edges.emplace_back(0, 1);
  const auto g = make_graph(n, edges);
  const auto ids = range_ids(n);
  const auto cache = shortest_path_distances(g, ids, 4);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v) CHECK(cache.distance(u, v) == cache.distance(v, u));
}

TEST_CASE("uncached pairs report unreachable") {
  const auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  const NodeId sources[] = {0};
  const auto cache = shortest_path_distances(g, sources, 5);
  CHECK_FALSE(cache.has_source(2));
  CHECK(cache.distance(2, 3) == kUnreachable);  // cache miss counts as infinite
}
