#include "deal/grad.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "deal/error.hpp"

namespace deal {

const ParamLayout::Entry& ParamLayout::find(const std::string& name) const {
  for (const auto& entry : entries) {
    if (entry.name == name) return entry;
  }
  throw ArgumentError("param layout: unknown tensor \"" + name + "\"");
}

std::shared_ptr<const ParamLayout> make_layout(const ModelParams& params) {
  auto layout = std::make_shared<ParamLayout>();
  Index offset = 0;
  auto add = [&](const std::string& name, Index rows, Index cols) {
    layout->entries.push_back({name, offset, rows, cols});
    offset += rows * cols;
  };
  for (std::size_t k = 0; k < params.attr.layers.size(); ++k) {
    const auto& layer = params.attr.layers[k];
    add("attr.layer" + std::to_string(k) + ".weight", layer.weight.rows(), layer.weight.cols());
    add("attr.layer" + std::to_string(k) + ".bias", layer.bias.size(), 1);
  }
  add("struct.directions", params.structure.directions.rows(), params.structure.directions.cols());
  add("struct.scales", params.structure.scales.size(), 1);
  layout->total_size = offset;
  return layout;
}

ParamVector flatten_params(const ModelParams& params, std::shared_ptr<const ParamLayout> layout) {
  if (!layout) layout = make_layout(params);
  ParamVector flat;
  flat.layout = layout;
  flat.values.resize(layout->total_size);
  Index offset = 0;
  auto put = [&](const double* data, Index size) {
    flat.values.segment(offset, size) = Eigen::Map<const Vector>(data, size);
    offset += size;
  };
  for (const auto& layer : params.attr.layers) {
    put(layer.weight.data(), layer.weight.size());
    put(layer.bias.data(), layer.bias.size());
  }
  put(params.structure.directions.data(), params.structure.directions.size());
  put(params.structure.scales.data(), params.structure.scales.size());
  if (offset != layout->total_size)
    throw ShapeError("flatten_params: layout does not match parameter shapes");
  return flat;
}

ModelParams unflatten_params(const ParamVector& flat, const ModelParams& prototype) {
  ModelParams out = prototype;
  unflatten_params_into(flat, out);
  return out;
}

void flatten_params_into(const ModelParams& params, Vector& out) {
  Index offset = 0;
  auto put = [&](const double* data, Index size) {
    if (offset + size > out.size()) throw ShapeError("flatten_params_into: vector too short");
    out.segment(offset, size) = Eigen::Map<const Vector>(data, size);
    offset += size;
  };
  for (const auto& layer : params.attr.layers) {
    put(layer.weight.data(), layer.weight.size());
    put(layer.bias.data(), layer.bias.size());
  }
  put(params.structure.directions.data(), params.structure.directions.size());
  put(params.structure.scales.data(), params.structure.scales.size());
  if (offset != out.size())
    throw ShapeError("flatten_params_into: vector size does not match parameters");
}

void unflatten_params_into(const ParamVector& flat, ModelParams& out) {
  Index offset = 0;
  auto take = [&](double* data, Index size) {
    if (offset + size > flat.values.size())
      throw ShapeError("unflatten_params: flat vector too short");
    Eigen::Map<Vector>(data, size) = flat.values.segment(offset, size);
    offset += size;
  };
  for (auto& layer : out.attr.layers) {
    take(layer.weight.data(), layer.weight.size());
    take(layer.bias.data(), layer.bias.size());
  }
  take(out.structure.directions.data(), out.structure.directions.size());
  take(out.structure.scales.data(), out.structure.scales.size());
  if (offset != flat.values.size())
    throw ShapeError("unflatten_params: flat vector size does not match prototype");
}

namespace {

// Batch-local forward state kept for the backward pass.
struct ForwardState {
  std::vector<NodeId> nodes;                   // sorted unique node ids
  std::unordered_map<NodeId, Index> local;     // node id -> row
  SparseRowMatrix x;                           // gathered feature rows
  std::vector<Matrix> pre;                     // per layer pre-activation
  std::vector<Matrix> post;                    // per layer elu output
  Matrix z_struct;                             // weight-normalized rows
  Vector norms;                                // direction row norms
};

std::vector<NodeId> collect_nodes(const MiniBatch& batch, const LossOptions& options, NodeId n) {
  std::vector<NodeId> nodes;
  if (options.tight_full_graph) {
    nodes.resize(static_cast<std::size_t>(n));
    for (NodeId i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = i;
    return nodes;
  }
  nodes.reserve(batch.pairs.size() * 2);
  for (const auto& s : batch.pairs) {
    nodes.push_back(s.p);
    nodes.push_back(s.q);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

void forward(const ModelParams& params, const SparseRowMatrix& features, const MiniBatch& batch,
             const LossOptions& options, ForwardState& fs) {
  fs.nodes = collect_nodes(batch, options, static_cast<NodeId>(params.structure.directions.rows()));
  fs.local.clear();
  fs.local.reserve(fs.nodes.size());
  for (std::size_t i = 0; i < fs.nodes.size(); ++i)
    fs.local.emplace(fs.nodes[i], static_cast<Index>(i));

  const auto count = static_cast<Index>(fs.nodes.size());

  // gather sparse feature rows for the batch nodes
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < count; ++i) {
    const NodeId id = fs.nodes[static_cast<std::size_t>(i)];
    if (id < 0 || id >= features.rows())
      throw ArgumentError("total_loss: node id out of range: " + std::to_string(id));
    for (SparseRowMatrix::InnerIterator it(features, id); it; ++it)
      triplets.emplace_back(i, it.col(), it.value());
  }
  fs.x.resize(count, features.cols());
  fs.x.setZero();
  fs.x.setFromTriplets(triplets.begin(), triplets.end());

  // attribute encoder with stored intermediates
  const auto& layers = params.attr.layers;
  const double alpha = params.attr.elu_alpha;
  fs.pre.assign(layers.size(), Matrix());
  fs.post.assign(layers.size(), Matrix());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Matrix pre = (k == 0) ? Matrix(fs.x * layers[k].weight.transpose())
                          : Matrix(fs.post[k - 1] * layers[k].weight.transpose());
    pre.rowwise() += layers[k].bias.transpose();
    if (!pre.allFinite())
      throw ValidationError("total_loss: non-finite values in attr.layer" + std::to_string(k) +
                            " pre-activation");
    fs.pre[k] = pre;
    fs.post[k] = pre.unaryExpr([&](double v) { return elu(v, alpha); });
  }

  // structure encoder rows
  fs.z_struct.resize(count, params.structure.directions.cols());
  fs.norms.resize(count);
  for (Index i = 0; i < count; ++i) {
    const NodeId id = fs.nodes[static_cast<std::size_t>(i)];
    const double norm = params.structure.directions.row(id).norm();
    if (!(norm > 0.0))
      throw ValidationError("total_loss: zero direction row in struct.directions at node " +
                            std::to_string(id));
    fs.norms(i) = norm;
    fs.z_struct.row(i) = params.structure.directions.row(id) * (params.structure.scales(id) / norm);
  }
  if (!fs.z_struct.allFinite())
    throw ValidationError("total_loss: non-finite values in struct embedding");
}

// d(loss term)/d(similarity) for one pair.
double pair_dloss_dsim(const PairSample& s, double sim, const HyperParams& hp) {
  if (s.label == 1) return generalized_logistic_dx(sim, hp.gamma2, hp.b2);
  return -negative_weight(s.d_sp, hp.beta) * generalized_logistic_dx(-sim, hp.gamma1, hp.b1);
}

double pair_loss_value(const PairSample& s, double sim, const HyperParams& hp) {
  if (s.label == 1) return generalized_logistic(sim, hp.gamma2, hp.b2);
  return negative_weight(s.d_sp, hp.beta) * generalized_logistic(-sim, hp.gamma1, hp.b1);
}

}  // namespace

LossTerms total_loss_with_gradient(const ModelParams& params, const SparseRowMatrix& features,
                                   const MiniBatch& batch, const HyperParams& hp,
                                   ModelParams* grads, const LossOptions& options) {
  if (batch.pairs.empty()) throw ArgumentError("total_loss: empty batch");
  hp.validate();

  ForwardState fs;
  forward(params, features, batch, options, fs);
  const Matrix& z_attr = fs.post.back();
  const Matrix& z_struct = fs.z_struct;
  const auto count = static_cast<Index>(fs.nodes.size());
  const double batch_n = static_cast<double>(batch.pairs.size());

  Matrix d_struct = Matrix::Zero(count, z_struct.cols());
  Matrix d_attr = Matrix::Zero(count, z_attr.cols());
  const bool want_grads = grads != nullptr;

  LossTerms terms;

  // accumulate one ranking-style term; emb_p/emb_q select the blocks
  auto accumulate_pairs = [&](const Matrix& emb_p, const Matrix& emb_q, Matrix* demb_p,
                              Matrix* demb_q, double weight, bool swap_roles) -> double {
    double sum = 0.0;
    for (const auto& s : batch.pairs) {
      const Index ip = fs.local.at(swap_roles ? s.q : s.p);
      const Index iq = fs.local.at(swap_roles ? s.p : s.q);
      const double sim = cosine_similarity(emb_p.row(ip), emb_q.row(iq));
      sum += pair_loss_value(s, sim, hp);
      if (want_grads && weight != 0.0) {
        const double dls = pair_dloss_dsim(s, sim, hp) * weight / batch_n;
        demb_p->row(ip) += dls * cosine_similarity_grad_u(emb_p.row(ip), emb_q.row(iq)).transpose();
        demb_q->row(iq) += dls * cosine_similarity_grad_u(emb_q.row(iq), emb_p.row(ip)).transpose();
      }
    }
    return sum / batch_n;
  };

  if (hp.theta[0] != 0.0)
    terms.rank_struct = accumulate_pairs(z_struct, z_struct, &d_struct, &d_struct, hp.theta[0], false);
  if (hp.theta[1] != 0.0)
    terms.rank_attr = accumulate_pairs(z_attr, z_attr, &d_attr, &d_attr, hp.theta[1], false);

  if (hp.theta[2] != 0.0) {
    if (hp.align_mode == AlignMode::tight) {
      const double node_n = static_cast<double>(count);
      double sum = 0.0;
      for (Index i = 0; i < count; ++i) {
        sum += cosine_similarity(z_struct.row(i), z_attr.row(i));
        if (want_grads) {
          const double w = -hp.theta[2] / node_n;
          d_struct.row(i) += w * cosine_similarity_grad_u(z_struct.row(i), z_attr.row(i)).transpose();
          d_attr.row(i) += w * cosine_similarity_grad_u(z_attr.row(i), z_struct.row(i)).transpose();
        }
      }
      terms.align = -sum / node_n;
    } else {
      terms.align = accumulate_pairs(z_struct, z_attr, &d_struct, &d_attr, hp.theta[2], false);
      if (hp.symmetrize_loose_align)
        terms.align += accumulate_pairs(z_struct, z_attr, &d_struct, &d_attr, hp.theta[2], true);
    }
  }

  terms.total = hp.theta[0] * terms.rank_struct + hp.theta[1] * terms.rank_attr +
                hp.theta[2] * terms.align;

  if (!want_grads) return terms;

  // ----- backward: structure encoder (weight normalization) -----
  // attr layer grads are assigned below; only the structure tensors (which
  // accumulate across batch nodes) need zeroing. resize is a no-op when the
  // buffers are reused across batches.
  grads->attr.layers.resize(params.attr.layers.size());
  grads->attr.elu_alpha = params.attr.elu_alpha;
  grads->structure.directions.resize(params.structure.directions.rows(),
                                     params.structure.directions.cols());
  grads->structure.directions.setZero();
  grads->structure.scales.resize(params.structure.scales.size());
  grads->structure.scales.setZero();

  for (Index i = 0; i < count; ++i) {
    const NodeId id = fs.nodes[static_cast<std::size_t>(i)];
    const double norm = fs.norms(i);
    const Vector unit = params.structure.directions.row(id).transpose() / norm;
    const Vector dz = d_struct.row(i).transpose();
    grads->structure.scales(id) += dz.dot(unit);
    // gradient through the unit direction is tangential to the row
    const Vector d_unit = dz * params.structure.scales(id);
    grads->structure.directions.row(id) +=
        ((d_unit - unit * d_unit.dot(unit)) / norm).transpose();
  }

  // ----- backward: attribute encoder -----
  const auto& layers = params.attr.layers;
  const double alpha = params.attr.elu_alpha;
  Matrix delta = d_attr;  // d loss / d post[k]
  for (std::size_t k = layers.size(); k-- > 0;) {
    Matrix dpre = delta.cwiseProduct(
        fs.pre[k].unaryExpr([&](double v) { return elu_grad(v, alpha); }));
    if (k == 0)
      grads->attr.layers[k].weight = dpre.transpose() * fs.x;
    else
      grads->attr.layers[k].weight = dpre.transpose() * fs.post[k - 1];
    grads->attr.layers[k].bias = dpre.colwise().sum().transpose();
    if (k > 0) delta = dpre * layers[k].weight;
  }

  return terms;
}

TotalLossObjective::TotalLossObjective(ModelParams prototype, SparseRowMatrix features,
                                       MiniBatch batch, HyperParams hp, LossOptions options)
    : prototype_(std::move(prototype)),
      features_(std::move(features)),
      batch_(std::move(batch)),
      hp_(hp),
      options_(options) {}

double TotalLossObjective::value(const ParamVector& at) const {
  const ModelParams params = unflatten_params(at, prototype_);
  return total_loss_with_gradient(params, features_, batch_, hp_, nullptr, options_).total;
}

Vector TotalLossObjective::gradient(const ParamVector& at) const {
  const ModelParams params = unflatten_params(at, prototype_);
  ModelParams grads;
  total_loss_with_gradient(params, features_, batch_, hp_, &grads, options_);
  return flatten_params(grads, at.layout).values;
}

double finite_difference_check(const Objective& objective, const ParamVector& at, double eps,
                               Rng* rng) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw ArgumentError("finite_difference_check: eps must lie in [1e-7, 1e-3]");
  const Vector analytic = objective.gradient(at);
  if (analytic.size() != at.size())
    throw ShapeError("finite_difference_check: gradient length mismatch");

  std::vector<Index> coords;
  const Index n = at.size();
  if (n > 2000) {
    Rng fallback(0);
    Rng& r = rng ? *rng : fallback;
    coords.reserve(500);
    for (int i = 0; i < 500; ++i) coords.push_back(static_cast<Index>(r.below(static_cast<std::uint64_t>(n))));
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  } else {
    coords.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
  }

  ParamVector probe = at;
  double max_rel = 0.0;
  for (Index c : coords) {
    const double saved = probe.values(c);
    probe.values(c) = saved + eps;
    const double above = objective.value(probe);
    probe.values(c) = saved - eps;
    const double below = objective.value(probe);
    probe.values(c) = saved;
    double diff = above - below;
    // a spread of a few ulps of f is rounding noise, not derivative signal
    // (inert coordinates, e.g. scales under cosine losses, hit this)
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(above), std::abs(below));
    if (std::abs(diff) <= noise) diff = 0.0;
    const double numeric = diff / (2.0 * eps);
    const double denom = std::max({std::abs(analytic(c)), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(analytic(c) - numeric) / denom);
  }
  return max_rel;
}

OptimizerState OptimizerState::make(Index size, double learning_rate) {
  OptimizerState state;
  state.first_moment = Vector::Zero(size);
  state.second_moment = Vector::Zero(size);
  state.learning_rate = learning_rate;
  return state;
}

void adam_step(Vector& params, const Vector& grads, OptimizerState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size())
    throw ShapeError("adam_step: dimension mismatch");
  ++state.step;
  state.first_moment = state.decay1 * state.first_moment + (1.0 - state.decay1) * grads;
  state.second_moment =
      state.decay2 * state.second_moment + (1.0 - state.decay2) * grads.cwiseProduct(grads);
  const double correction1 = 1.0 - std::pow(state.decay1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.decay2, static_cast<double>(state.step));
  params -= (state.learning_rate / correction1) *
            (state.first_moment.array() /
             ((state.second_moment.array() / correction2).sqrt() + state.epsilon))
                .matrix();
}

void sgd_step(Vector& params, const Vector& grads, OptimizerState& state) {
  if (params.size() != grads.size()) throw ShapeError("sgd_step: dimension mismatch");
  ++state.step;
  params -= state.learning_rate * grads;
}

}  // namespace deal
