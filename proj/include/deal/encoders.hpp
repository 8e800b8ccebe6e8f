#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "deal/graph.hpp"
#include "deal/math.hpp"
#include "deal/rng.hpp"

namespace deal {

/// Attribute-side encoder: a plain MLP over the sparse attribute vector,
/// with the exponential linear unit applied after every layer, the output
/// layer included.
struct AttrEncoderParams {
  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };
  std::vector<Layer> layers;
  double elu_alpha = 1.0;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().weight.rows(); }

  /// Checks the dimension chain and that every parameter is finite.
  void validate() const;
};

/// Structure-side encoder: one learned embedding row per node, stored in
/// weight-normalized form. The realized embedding of node i is
/// scales[i] * directions.row(i) / |directions.row(i)|.
struct StructEncoderParams {
  Matrix directions;  // n x l
  Vector scales;      // n

  NodeId num_nodes() const { return static_cast<NodeId>(directions.rows()); }
  Index embed_dim() const { return directions.cols(); }
  void validate() const;
};

enum class EmbeddingKind { structure, attribute };

/// A block of embedding rows together with the node ids they belong to.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(Matrix rows, std::vector<NodeId> node_ids, EmbeddingKind kind);

  const Matrix& rows() const { return rows_; }
  Matrix& rows() { return rows_; }
  const std::vector<NodeId>& node_ids() const { return node_ids_; }
  EmbeddingKind kind() const { return kind_; }
  Index count() const { return rows_.rows(); }
  Index dim() const { return rows_.cols(); }

  /// Row index holding node `id`; throws ArgumentError if absent.
  Index row_of(NodeId id) const;
  bool contains(NodeId id) const;

 private:
  Matrix rows_;
  std::vector<NodeId> node_ids_;
  EmbeddingKind kind_ = EmbeddingKind::structure;
  bool identity_ids_ = false;  // node_ids == 0..count-1
  std::unordered_map<NodeId, Index> index_;
};

/// Runs the MLP over the given feature rows (one embedding per node id).
EmbeddingMatrix encode_attributes(const AttrEncoderParams& params, const SparseRowMatrix& features,
                                  std::span<const NodeId> node_ids);

/// All-node overload.
EmbeddingMatrix encode_attributes(const AttrEncoderParams& params, const SparseRowMatrix& features);

/// Encodes a single raw attribute vector (a node not present in the graph).
Vector encode_attribute_vector(const AttrEncoderParams& params, const Eigen::SparseVector<double>& x);

/// Looks up the weight-normalized structure embeddings of the given nodes.
EmbeddingMatrix encode_structure(const StructEncoderParams& params, std::span<const NodeId> node_ids);
EmbeddingMatrix encode_structure(const StructEncoderParams& params);

/// Uniform [-a, a] initialization with a = sqrt(6 / (fan_in + fan_out));
/// biases start at zero, scales at one.
AttrEncoderParams init_attr_encoder(Index num_attrs, Index hidden_dim, Index embed_dim, int depth,
                                    double elu_alpha, Rng& rng);
StructEncoderParams init_struct_encoder(NodeId num_nodes, Index embed_dim, Rng& rng);

}  // namespace deal
