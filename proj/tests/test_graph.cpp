#include <doctest.h>

#include <fstream>
#include <sstream>

#include "deal/error.hpp"
#include "deal/graph.hpp"

using namespace deal;

namespace {

AttributedGraph from_text(const std::string& edges, const std::string& feats,
                          LoadWarnings* w = nullptr) {
  std::istringstream e(edges), f(feats);
  return load_graph(e, f, w);
}

}  // namespace

TEST_CASE("minimal graph") {
  const auto g = from_text("2 1\n0\t1\n", "0\t0\t1.0\n");
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_attrs() == 1);
  CHECK(g.num_edges() == 1);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.features().coeff(0, 0) == 1.0);
}

TEST_CASE("self-loop dropped with one warning") {
  LoadWarnings w;
  const auto g = from_text("4 1\n0\t1\n3\t3\n1\t2\n", "0\t0\t1\n", &w);
  CHECK(g.num_edges() == 2);
  CHECK(w.self_loops_dropped == 1);
  CHECK(w.duplicate_edges_dropped == 0);
}

TEST_CASE("duplicate and reversed edges are symmetrized away") {
  LoadWarnings w;
  const auto g = from_text("3 1\n0\t1\n1\t0\n0\t1\n1\t2\n", "0\t0\t1\n", &w);
  CHECK(g.num_edges() == 2);
  CHECK(w.duplicate_edges_dropped == 2);
}

TEST_CASE("parse errors carry the line number") {
  CHECK_THROWS_WITH_AS(from_text("2 1\n0\tx\n", ""), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(from_text("2 1\n0\t1\n", "0\tnope\t1\n"), doctest::Contains("line 1"),
                       ParseError);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(from_text("2 1\n0\t5\n", ""), ValidationError);           // node id range
  CHECK_THROWS_AS(from_text("2 1\n0\t1\n", "0\t7\t1\n"), ValidationError);  // attr id range
  CHECK_THROWS_AS(from_text("2 1\n", ""), ValidationError);                 // empty edge set
  CHECK_THROWS_AS(from_text("2 1\n0\t1\n", "0\t0\tnan\n"), ValidationError);
}

TEST_CASE("load-save-load round trip is identity") {
  const std::string edges = "5 3\n0\t1\n1\t2\n2\t3\n3\t4\n0\t4\n";
  const std::string feats = "0\t0\t1\n1\t2\t0.25\n3\t1\t-2\n4\t0\t0.125\n";
  const auto g1 = from_text(edges, feats);
  std::ostringstream e2, f2;
  save_graph(g1, e2, f2);
  const auto g2 = from_text(e2.str(), f2.str());
  CHECK(g1.num_nodes() == g2.num_nodes());
  CHECK(g1.num_attrs() == g2.num_attrs());
  CHECK(g1.edges() == g2.edges());
  CHECK((g1.features() - g2.features()).norm() == 0.0);
  std::ostringstream e3, f3;
  save_graph(g2, e3, f3);
  CHECK(e2.str() == e3.str());
  CHECK(f2.str() == f3.str());
}

TEST_CASE("feature normalization") {
  const auto g = from_text("2 3\n0\t1\n", "0\t0\t3\n0\t1\t4\n");
  const auto l1 = normalize_features(g, FeatureNorm::l1);
  CHECK(l1.features().coeff(0, 0) == doctest::Approx(3.0 / 7.0));
  const auto l2 = normalize_features(g, FeatureNorm::l2);
  CHECK(l2.features().coeff(0, 0) == doctest::Approx(0.6));
  CHECK(l2.features().coeff(0, 1) == doctest::Approx(0.8));
  // all-zero rows stay zero
  CHECK(l2.features().row(1).norm() == 0.0);
}

TEST_CASE("cora dataset statistics" * doctest::skip(false)) {
  std::ifstream probe(std::string(DEAL_DATA_DIR) + "/cora.edges");
  REQUIRE_MESSAGE(probe.good(), "cora dataset missing under " DEAL_DATA_DIR);
  const auto g = load_graph_files(std::string(DEAL_DATA_DIR) + "/cora.edges",
                                  std::string(DEAL_DATA_DIR) + "/cora.features");
  CHECK(g.num_nodes() == 2708);
  CHECK(g.num_edges() == 5278);
  CHECK(g.num_attrs() == 1433);
}

TEST_CASE("citeseer dataset statistics") {
  std::ifstream probe(std::string(DEAL_DATA_DIR) + "/citeseer.edges");
  REQUIRE_MESSAGE(probe.good(), "citeseer dataset missing under " DEAL_DATA_DIR);
  const auto g = load_graph_files(std::string(DEAL_DATA_DIR) + "/citeseer.edges",
                                  std::string(DEAL_DATA_DIR) + "/citeseer.features");
  CHECK(g.num_nodes() == 3327);
  CHECK(g.num_edges() == 4552);
  CHECK(g.num_attrs() == 3703);
}
