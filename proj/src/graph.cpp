#include "deal/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deal/error.hpp"

namespace deal {

namespace {

// Parses a whitespace-separated list of tokens; returns false on any junk.
bool parse_long(const std::string& tok, long long& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& tok, double& out) {
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && !tok.empty();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t' || c == ' ' || c == '\r') {
      if (!cur.empty()) fields.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  return fields;
}

[[noreturn]] void parse_fail(const char* stream_name, std::size_t line_no, const std::string& line) {
  throw ParseError(std::string(stream_name) + ": malformed line " + std::to_string(line_no) +
                   ": \"" + line + "\"");
}

}  // namespace

AttributedGraph::AttributedGraph(NodeId num_nodes, Index num_attrs, std::vector<Edge> edges,
                                 SparseRowMatrix features)
    : num_nodes_(num_nodes),
      num_attrs_(num_attrs),
      edges_(std::move(edges)),
      features_(std::move(features)) {
  if (num_nodes_ <= 0) throw ValidationError("graph: node count must be positive");
  if (num_attrs_ <= 0) throw ValidationError("graph: attribute count must be positive");
  if (edges_.empty()) throw ValidationError("graph: empty edge set");
  if (features_.rows() != num_nodes_ || features_.cols() != num_attrs_)
    throw ShapeError("graph: feature matrix shape does not match declared counts");

  for (auto& [u, v] : edges_) {
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());  // canonical order

  adjacency_.assign(static_cast<std::size_t>(num_nodes_), {});
  edge_set_.reserve(edges_.size() * 2);
  for (auto& [u, v] : edges_) {
    if (u == v) throw ValidationError("graph: self-loop on node " + std::to_string(u));
    if (u < 0 || v >= num_nodes_)
      throw ValidationError("graph: edge endpoint out of range: " + std::to_string(v));
    if (!edge_set_.insert(edge_key(u, v)).second)
      throw ValidationError("graph: duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  for (int k = 0; k < features_.outerSize(); ++k) {
    for (SparseRowMatrix::InnerIterator it(features_, k); it; ++it) {
      if (!std::isfinite(it.value()))
        throw ValidationError("graph: non-finite feature value at node " + std::to_string(it.row()));
    }
  }
}

AttributedGraph load_graph(std::istream& edges_source, std::istream& features_source,
                           LoadWarnings* warnings) {
  LoadWarnings local;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(edges_source, line)) throw ParseError("edges: missing header line");
  ++line_no;
  auto header = split_fields(line);
  long long n = 0, m = 0;
  if (header.size() != 2 || !parse_long(header[0], n) || !parse_long(header[1], m))
    parse_fail("edges", line_no, line);
  if (n <= 0 || m <= 0) throw ValidationError("edges: header counts must be positive");

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  while (std::getline(edges_source, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    long long u = 0, v = 0;
    if (fields.size() != 2 || !parse_long(fields[0], u) || !parse_long(fields[1], v))
      parse_fail("edges", line_no, line);
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ValidationError("edges: line " + std::to_string(line_no) + ": node id out of range [0," +
                            std::to_string(n) + ")");
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    if (!seen.insert(edge_key(static_cast<NodeId>(u), static_cast<NodeId>(v))).second) {
      ++local.duplicate_edges_dropped;
      continue;
    }
    edges.emplace_back(static_cast<NodeId>(std::min(u, v)), static_cast<NodeId>(std::max(u, v)));
  }
  if (edges.empty()) throw ValidationError("edges: empty edge set");

  std::vector<Eigen::Triplet<double>> triplets;
  line_no = 0;
  while (std::getline(features_source, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    long long node = 0, attr = 0;
    double value = 0.0;
    if (fields.size() != 3 || !parse_long(fields[0], node) || !parse_long(fields[1], attr) ||
        !parse_double(fields[2], value))
      parse_fail("features", line_no, line);
    if (node < 0 || node >= n)
      throw ValidationError("features: line " + std::to_string(line_no) + ": node id out of range");
    if (attr < 0 || attr >= m)
      throw ValidationError("features: line " + std::to_string(line_no) + ": attribute id out of range");
    if (!std::isfinite(value))
      throw ValidationError("features: line " + std::to_string(line_no) + ": non-finite value");
    triplets.emplace_back(static_cast<Index>(node), static_cast<Index>(attr), value);
  }

  SparseRowMatrix features(static_cast<Index>(n), static_cast<Index>(m));
  features.setFromTriplets(triplets.begin(), triplets.end());

  if (warnings) *warnings = local;
  return AttributedGraph(static_cast<NodeId>(n), static_cast<Index>(m), std::move(edges),
                         std::move(features));
}

AttributedGraph load_graph_files(const std::string& edges_path, const std::string& features_path,
                                 LoadWarnings* warnings) {
  std::ifstream edges(edges_path);
  if (!edges) throw IoError("cannot open edge file: " + edges_path);
  std::ifstream feats(features_path);
  if (!feats) throw IoError("cannot open feature file: " + features_path);
  return load_graph(edges, feats, warnings);
}

namespace {
std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void save_graph(const AttributedGraph& graph, std::ostream& edges_out,
                std::ostream& features_out) {
  edges_out << graph.num_nodes() << ' ' << graph.num_attrs() << '\n';
  auto edges = graph.edges();
  std::sort(edges.begin(), edges.end());
  for (const auto& [u, v] : edges) edges_out << u << '\t' << v << '\n';

  const auto& f = graph.features();
  for (int row = 0; row < f.outerSize(); ++row) {
    for (SparseRowMatrix::InnerIterator it(f, row); it; ++it) {
      if (it.value() == 0.0) continue;
      features_out << it.row() << '\t' << it.col() << '\t' << format_value(it.value()) << '\n';
    }
  }
}

AttributedGraph normalize_features(const AttributedGraph& graph, FeatureNorm norm) {
  if (norm == FeatureNorm::none) return graph;
  SparseRowMatrix scaled = graph.features();
  for (int row = 0; row < scaled.outerSize(); ++row) {
    double denom = 0.0;
    for (SparseRowMatrix::InnerIterator it(scaled, row); it; ++it) {
      denom += norm == FeatureNorm::l1 ? std::abs(it.value()) : it.value() * it.value();
    }
    if (norm == FeatureNorm::l2) denom = std::sqrt(denom);
    if (denom <= 0.0) continue;
    for (SparseRowMatrix::InnerIterator it(scaled, row); it; ++it) it.valueRef() /= denom;
  }
  return AttributedGraph(graph.num_nodes(), graph.num_attrs(), graph.edges(), std::move(scaled));
}

}  // namespace deal
