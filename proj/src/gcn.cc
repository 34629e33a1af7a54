// Copyright 2026 The kgrag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgrag/gcn.h"

#include <algorithm>
#include <cmath>

#include "kgrag/error.h"
#include "kgrag/kernels.h"
#include "kgrag/random.h"
#include "kgrag/vector_file.h"

namespace kgrag {
namespace {

constexpr std::uint64_t kLayerInitStream = 3;
constexpr std::uint64_t kFineTuneStream = 2;

void ApplyActivation(Matrix& m, Activation activation) {
  if (activation == Activation::kIdentity) return;
  for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
}

void CheckLayerChain(std::span<const GcnLayerWeights> layers,
                     std::size_t input_dim) {
  if (layers.empty()) {
    throw Error(ErrorCode::kContract, "GCN needs at least one layer");
  }
  std::size_t dim = input_dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].in_dim() != dim) {
      throw Error(ErrorCode::kContract,
                  "layer " + std::to_string(l) + " expects input dim " +
                      std::to_string(layers[l].in_dim()) + ", got " +
                      std::to_string(dim));
    }
    dim = layers[l].out_dim();
  }
}

}  // namespace

double NormalizedAdjacency::Weight(std::size_t i, std::size_t j) const {
  auto cols = neighbors(i);
  auto it = std::lower_bound(cols.begin(), cols.end(),
                             static_cast<std::uint32_t>(j));
  if (it == cols.end() || *it != j) return 0.0;
  return weights[row_offsets[i] + static_cast<std::size_t>(it - cols.begin())];
}

NormalizedAdjacency BuildNormalizedAdjacency(
    std::size_t node_count,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  if (node_count == 0) {
    throw Error(ErrorCode::kContract,
                "cannot build an adjacency for an empty graph");
  }
  std::vector<std::vector<std::uint32_t>> lists(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    lists[i].push_back(static_cast<std::uint32_t>(i));
  }
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw Error(ErrorCode::kContract, "edge endpoint out of range");
    }
    if (a == b) continue;
    lists[a].push_back(b);
    lists[b].push_back(a);
  }
  NormalizedAdjacency adj;
  adj.node_count = node_count;
  adj.row_offsets.reserve(node_count + 1);
  adj.row_offsets.push_back(0);
  adj.degrees.resize(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    auto& list = lists[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    adj.degrees[i] = list.size();
    adj.columns.insert(adj.columns.end(), list.begin(), list.end());
    adj.row_offsets.push_back(adj.columns.size());
  }
  adj.weights.resize(adj.columns.size());
  for (std::size_t i = 0; i < node_count; ++i) {
    for (std::size_t k = adj.row_offsets[i]; k < adj.row_offsets[i + 1]; ++k) {
      double deg_product = static_cast<double>(adj.degrees[i]) *
                           static_cast<double>(adj.degrees[adj.columns[k]]);
      adj.weights[k] = 1.0 / std::sqrt(deg_product);
    }
  }
  return adj;
}

NormalizedAdjacency BuildNormalizedAdjacency(const KnowledgeGraph& store) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(store.num_triples());
  for (const Triple& t : store.triples()) {
    edges.emplace_back(t.head.value, t.tail.value);
  }
  return BuildNormalizedAdjacency(store.num_entities(), edges);
}

Matrix Aggregate(const NormalizedAdjacency& adjacency, const Matrix& h) {
  if (h.rows() != adjacency.node_count) {
    throw Error(ErrorCode::kContract,
                "representation rows do not match node count");
  }
  Matrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < adjacency.node_count; ++i) {
    auto cols = adjacency.neighbors(i);
    auto w = adjacency.row_weights(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      kernels::Axpy(w[k], h.row(cols[k]), dst);
    }
  }
  return out;
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kContract, "matrix shapes do not compose");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double v = a(i, k);
      if (v != 0.0) kernels::Axpy(v, b.row(k), dst);
    }
  }
  return out;
}

NodeRepresentations GcnLayerForward(const NodeRepresentations& h,
                                    const NormalizedAdjacency& adjacency,
                                    const GcnLayerWeights& layer) {
  if (h.features.cols() != layer.in_dim()) {
    throw Error(ErrorCode::kContract,
                "representation dim " + std::to_string(h.features.cols()) +
                    " does not match layer input dim " +
                    std::to_string(layer.in_dim()));
  }
  NodeRepresentations out;
  out.features = MatMul(Aggregate(adjacency, h.features), layer.weights);
  ApplyActivation(out.features, layer.activation);
  out.layer_index = h.layer_index + 1;
  return out;
}

std::vector<GcnLayerWeights> DefaultGcnLayers(std::size_t dim,
                                              std::size_t num_layers,
                                              std::uint64_t seed) {
  if (num_layers == 0) {
    throw Error(ErrorCode::kContract, "GCN needs at least one layer");
  }
  if (dim == 0) throw Error(ErrorCode::kConfig, "GCN dim must be positive");
  Rng rng(DeriveSeed(seed, kLayerInitStream));
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<GcnLayerWeights> layers(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    layers[l].weights = Matrix(dim, dim);
    for (double& v : layers[l].weights.data()) {
      v = UniformReal(rng, -bound, bound);
    }
    layers[l].activation =
        l + 1 == num_layers ? Activation::kIdentity : Activation::kRelu;
  }
  return layers;
}

NodeRepresentations GcnForward(const EmbeddingTable& table,
                               const NormalizedAdjacency& adjacency,
                               std::span<const GcnLayerWeights> layers) {
  CheckLayerChain(layers, table.dim);
  NodeRepresentations h{table.entity_vectors, 0};
  for (const GcnLayerWeights& layer : layers) {
    h = GcnLayerForward(h, adjacency, layer);
  }
  return h;
}

double GcnMarginLoss(const EmbeddingTable& table,
                     const NormalizedAdjacency& adjacency,
                     std::span<const GcnLayerWeights> layers,
                     std::span<const TrainingPair> pairs, double margin,
                     Norm norm, std::vector<Matrix>* weight_gradients,
                     std::size_t* active_pairs) {
  CheckLayerChain(layers, table.dim);
  const std::size_t depth = layers.size();
  if (layers.back().out_dim() != table.relation_vectors.cols()) {
    throw Error(ErrorCode::kContract,
                "GCN output dim must equal the relation dim");
  }
  // inputs[l] = H^l, aggregated[l] = A H^l, pre[l] = A H^l W^l.
  std::vector<Matrix> inputs{table.entity_vectors};
  std::vector<Matrix> aggregated, pre;
  for (std::size_t l = 0; l < depth; ++l) {
    aggregated.push_back(Aggregate(adjacency, inputs.back()));
    pre.push_back(MatMul(aggregated.back(), layers[l].weights));
    Matrix out = pre.back();
    ApplyActivation(out, layers[l].activation);
    inputs.push_back(std::move(out));
  }
  const Matrix& output = inputs.back();

  double loss = 0.0;
  std::size_t active = 0;
  Matrix grad_out(output.rows(), output.cols());
  for (const TrainingPair& pair : pairs) {
    const Triple& p = pair.positive;
    const Triple& n = pair.negative.triple;
    PairGradient g = LossGradient(
        output.row(p.head.index()), table.relation(p.relation),
        output.row(p.tail.index()), output.row(n.head.index()),
        output.row(n.tail.index()), margin, norm);
    loss += g.loss;
    if (!g.active) continue;
    ++active;
    kernels::Axpy(1.0, g.head, grad_out.row(p.head.index()));
    kernels::Axpy(1.0, g.tail, grad_out.row(p.tail.index()));
    kernels::Axpy(1.0, g.negative_head, grad_out.row(n.head.index()));
    kernels::Axpy(1.0, g.negative_tail, grad_out.row(n.tail.index()));
  }
  if (active_pairs != nullptr) *active_pairs = active;
  if (weight_gradients == nullptr) return loss;

  weight_gradients->assign(depth, Matrix());
  Matrix grad_h = std::move(grad_out);
  for (std::size_t l = depth; l-- > 0;) {
    const GcnLayerWeights& layer = layers[l];
    Matrix grad_pre = std::move(grad_h);
    if (layer.activation == Activation::kRelu) {
      auto z = pre[l].data();
      auto g = grad_pre.data();
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(z[k] > 0.0)) g[k] = 0.0;
      }
    }
    Matrix grad_w(layer.in_dim(), layer.out_dim());
    for (std::size_t i = 0; i < grad_pre.rows(); ++i) {
      auto src = aggregated[l].row(i);
      auto g = grad_pre.row(i);
      for (std::size_t k = 0; k < src.size(); ++k) {
        if (src[k] != 0.0) kernels::Axpy(src[k], g, grad_w.row(k));
      }
    }
    (*weight_gradients)[l] = std::move(grad_w);
    if (l == 0) break;
    // dM = dZ W^T, then dH = A^T dM = A dM (A is symmetric).
    Matrix grad_agg(grad_pre.rows(), layer.in_dim());
    for (std::size_t i = 0; i < grad_pre.rows(); ++i) {
      for (std::size_t k = 0; k < layer.in_dim(); ++k) {
        grad_agg(i, k) = kernels::Dot(grad_pre.row(i), layer.weights.row(k));
      }
    }
    grad_h = Aggregate(adjacency, grad_agg);
  }
  return loss;
}

std::vector<EpochStats> FineTuneGcn(const EmbeddingTable& table,
                                    const KnowledgeGraph& store,
                                    std::vector<GcnLayerWeights>& layers,
                                    const TrainConfig& config) {
  config.Validate();
  CheckLayerChain(layers, table.dim);
  NormalizedAdjacency adjacency = BuildNormalizedAdjacency(store);
  Rng rng(DeriveSeed(config.seed, kFineTuneStream));
  std::vector<EpochStats> history;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<Triple> order(store.triples().begin(), store.triples().end());
    Shuffle(std::span<Triple>(order), rng);
    double loss_sum = 0.0;
    std::size_t pair_count = 0, active_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<TrainingPair> pairs;
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
          pairs.push_back({order[i], SampleNegative(order[i], store, rng)});
        }
      }
      std::vector<Matrix> grads;
      std::size_t active = 0;
      loss_sum += GcnMarginLoss(table, adjacency, layers, pairs, config.margin,
                                config.norm, &grads, &active);
      pair_count += pairs.size();
      active_count += active;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        kernels::Axpy(-config.learning_rate, grads[l].data(),
                      layers[l].weights.data());
        for (double v : layers[l].weights.data()) {
          if (!std::isfinite(v)) {
            throw Error(ErrorCode::kTraining,
                        "non-finite GCN weight in layer " + std::to_string(l) +
                            " during fine-tune epoch " + std::to_string(epoch));
          }
        }
      }
    }
    EpochStats stats;
    stats.epoch_index = epoch;
    if (pair_count > 0) {
      stats.mean_loss = loss_sum / static_cast<double>(pair_count);
      stats.active_margin_fraction = static_cast<double>(active_count) /
                                     static_cast<double>(pair_count);
    }
    history.push_back(stats);
  }
  return history;
}

RefineResult RefineEmbeddings(const EmbeddingTable& table,
                              const KnowledgeGraph& store,
                              std::vector<GcnLayerWeights> layers,
                              const std::optional<TrainConfig>& fine_tune) {
  CheckLayerChain(layers, table.dim);
  if (table.entity_vectors.rows() != store.num_entities()) {
    throw Error(ErrorCode::kContract,
                "embedding table does not match the store vocabulary");
  }
  RefineResult result;
  if (fine_tune) {
    result.fine_tune_epochs = FineTuneGcn(table, store, layers, *fine_tune);
  }
  result.representations =
      GcnForward(table, BuildNormalizedAdjacency(store), layers);
  result.layers = std::move(layers);
  return result;
}

void SaveRepresentations(const std::string& path,
                         const NodeRepresentations& reps) {
  VectorFile file;
  file.entities = reps.features;
  file.relations = Matrix(0, reps.features.cols());
  file.header = {{"kind", "gcn"}, {"layers", std::to_string(reps.layer_index)}};
  file.header_order = {"kind", "layers"};
  WriteVectorFile(path, file);
}

NodeRepresentations LoadRepresentations(const std::string& path) {
  VectorFile file = ReadVectorFile(path);
  auto kind = file.header.find("kind");
  if (kind == file.header.end() || kind->second != "gcn") {
    throw Error(ErrorCode::kIngest, path + " is not a GCN vector file");
  }
  NodeRepresentations reps;
  reps.features = std::move(file.entities);
  if (auto it = file.header.find("layers"); it != file.header.end()) {
    try {
      reps.layer_index = std::stoul(it->second);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kIngest, path + ": bad layers= header value");
    }
  }
  return reps;
}

}  // namespace kgrag
