#include "deal/encoders.hpp"

#include <cmath>

#include "deal/error.hpp"

namespace deal {

void AttrEncoderParams::validate() const {
  if (layers.empty()) throw ValidationError("attr encoder: no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (layer.bias.size() != layer.weight.rows())
      throw ShapeError("attr encoder: bias length mismatch at layer " + std::to_string(k));
    if (k > 0 && layer.weight.cols() != layers[k - 1].weight.rows())
      throw ShapeError("attr encoder: dimension chain broken at layer " + std::to_string(k));
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw ValidationError("attr encoder: non-finite parameter at layer " + std::to_string(k));
  }
}

void StructEncoderParams::validate() const {
  if (directions.rows() != scales.size())
    throw ShapeError("struct encoder: scales length does not match direction rows");
  if (!directions.allFinite() || !scales.allFinite())
    throw ValidationError("struct encoder: non-finite parameter");
  for (Index i = 0; i < directions.rows(); ++i) {
    if (directions.row(i).norm() <= 0.0)
      throw ValidationError("struct encoder: zero direction row " + std::to_string(i));
  }
}

EmbeddingMatrix::EmbeddingMatrix(Matrix rows, std::vector<NodeId> node_ids, EmbeddingKind kind)
    : rows_(std::move(rows)), node_ids_(std::move(node_ids)), kind_(kind) {
  if (static_cast<Index>(node_ids_.size()) != rows_.rows())
    throw ShapeError("embedding matrix: row count does not match node id list");
  identity_ids_ = true;
  for (std::size_t i = 0; i < node_ids_.size(); ++i) {
    if (node_ids_[i] != static_cast<NodeId>(i)) {
      identity_ids_ = false;
      break;
    }
  }
  if (!identity_ids_) {
    index_.reserve(node_ids_.size());
    for (std::size_t i = 0; i < node_ids_.size(); ++i)
      index_.emplace(node_ids_[i], static_cast<Index>(i));
  }
}

Index EmbeddingMatrix::row_of(NodeId id) const {
  if (identity_ids_) {
    if (id < 0 || id >= rows_.rows())
      throw ArgumentError("embedding matrix: node " + std::to_string(id) + " not encoded");
    return id;
  }
  auto it = index_.find(id);
  if (it == index_.end())
    throw ArgumentError("embedding matrix: node " + std::to_string(id) + " not encoded");
  return it->second;
}

bool EmbeddingMatrix::contains(NodeId id) const {
  if (identity_ids_) return id >= 0 && id < rows_.rows();
  return index_.count(id) > 0;
}

namespace {

// Dense forward pass over a block of gathered feature rows.
Matrix mlp_forward(const AttrEncoderParams& params, const SparseRowMatrix& x) {
  Matrix h = x * params.layers.front().weight.transpose();
  h.rowwise() += params.layers.front().bias.transpose();
  h = h.unaryExpr([&](double v) { return elu(v, params.elu_alpha); });
  for (std::size_t k = 1; k < params.layers.size(); ++k) {
    Matrix pre = h * params.layers[k].weight.transpose();
    pre.rowwise() += params.layers[k].bias.transpose();
    h = pre.unaryExpr([&](double v) { return elu(v, params.elu_alpha); });
  }
  return h;
}

SparseRowMatrix gather_rows(const SparseRowMatrix& features, std::span<const NodeId> ids) {
  SparseRowMatrix out(static_cast<Index>(ids.size()), features.cols());
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const NodeId id = ids[i];
    if (id < 0 || id >= features.rows())
      throw ArgumentError("encode_attributes: node id out of range: " + std::to_string(id));
    for (SparseRowMatrix::InnerIterator it(features, id); it; ++it)
      triplets.emplace_back(static_cast<Index>(i), it.col(), it.value());
  }
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

EmbeddingMatrix encode_attributes(const AttrEncoderParams& params, const SparseRowMatrix& features,
                                  std::span<const NodeId> node_ids) {
  if (params.input_dim() != features.cols())
    throw ShapeError("encode_attributes: feature width " + std::to_string(features.cols()) +
                     " does not match encoder input " + std::to_string(params.input_dim()));
  const SparseRowMatrix x = gather_rows(features, node_ids);
  return EmbeddingMatrix(mlp_forward(params, x),
                         std::vector<NodeId>(node_ids.begin(), node_ids.end()),
                         EmbeddingKind::attribute);
}

EmbeddingMatrix encode_attributes(const AttrEncoderParams& params, const SparseRowMatrix& features) {
  std::vector<NodeId> ids(static_cast<std::size_t>(features.rows()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i);
  if (params.input_dim() != features.cols())
    throw ShapeError("encode_attributes: feature width does not match encoder input");
  return EmbeddingMatrix(mlp_forward(params, features), std::move(ids), EmbeddingKind::attribute);
}

Vector encode_attribute_vector(const AttrEncoderParams& params, const Eigen::SparseVector<double>& x) {
  if (x.size() != params.input_dim())
    throw ShapeError("encode_attribute_vector: attribute width " + std::to_string(x.size()) +
                     " does not match encoder input " + std::to_string(params.input_dim()));
  Vector h = params.layers.front().weight * x + params.layers.front().bias;
  h = h.unaryExpr([&](double v) { return elu(v, params.elu_alpha); });
  for (std::size_t k = 1; k < params.layers.size(); ++k) {
    h = (params.layers[k].weight * h + params.layers[k].bias)
            .unaryExpr([&](double v) { return elu(v, params.elu_alpha); });
  }
  return h;
}

EmbeddingMatrix encode_structure(const StructEncoderParams& params, std::span<const NodeId> node_ids) {
  Matrix rows(static_cast<Index>(node_ids.size()), params.embed_dim());
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    const NodeId id = node_ids[i];
    if (id < 0 || id >= params.num_nodes())
      throw ArgumentError("encode_structure: node id out of range: " + std::to_string(id));
    const double norm = params.directions.row(id).norm();
    if (norm <= 0.0)
      throw ValidationError("encode_structure: zero direction row " + std::to_string(id));
    rows.row(static_cast<Index>(i)) = params.directions.row(id) * (params.scales(id) / norm);
  }
  return EmbeddingMatrix(std::move(rows), std::vector<NodeId>(node_ids.begin(), node_ids.end()),
                         EmbeddingKind::structure);
}

EmbeddingMatrix encode_structure(const StructEncoderParams& params) {
  std::vector<NodeId> ids(static_cast<std::size_t>(params.num_nodes()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i);
  return encode_structure(params, ids);
}

namespace {
void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rng.range(-bound, bound);
}
}  // namespace

AttrEncoderParams init_attr_encoder(Index num_attrs, Index hidden_dim, Index embed_dim, int depth,
                                    double elu_alpha, Rng& rng) {
  if (depth < 1) throw ArgumentError("init_attr_encoder: depth must be >= 1");
  AttrEncoderParams params;
  params.elu_alpha = elu_alpha;
  Index in = num_attrs;
  for (int k = 0; k < depth; ++k) {
    const Index out = (k == depth - 1) ? embed_dim : hidden_dim;
    AttrEncoderParams::Layer layer;
    layer.weight.resize(out, in);
    fill_uniform(layer.weight, std::sqrt(6.0 / static_cast<double>(in + out)), rng);
    layer.bias = Vector::Zero(out);
    params.layers.push_back(std::move(layer));
    in = out;
  }
  return params;
}

StructEncoderParams init_struct_encoder(NodeId num_nodes, Index embed_dim, Rng& rng) {
  StructEncoderParams params;
  params.directions.resize(num_nodes, embed_dim);
  fill_uniform(params.directions, std::sqrt(6.0 / static_cast<double>(num_nodes + embed_dim)), rng);
  params.scales = Vector::Ones(num_nodes);
  return params;
}

}  // namespace deal
