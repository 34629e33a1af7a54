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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgrag/kg_store.h"
#include "kgrag/matrix.h"
#include "kgrag/transe.h"

namespace kgrag {

// Symmetrized, self-looped adjacency with weights 1/sqrt(deg(i) deg(j)),
// where deg counts distinct neighbours plus the self-loop. Stored as CSR
// with columns ascending in every row.
struct NormalizedAdjacency {
  std::size_t node_count = 0;
  std::vector<std::size_t> row_offsets;  // node_count + 1 entries
  std::vector<std::uint32_t> columns;
  std::vector<double> weights;
  std::vector<std::size_t> degrees;

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {columns.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }
  std::span<const double> row_weights(std::size_t i) const {
    return {weights.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }
  // 0 when (i, j) is not an edge.
  double Weight(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const { return columns.size(); }
};

// Relation types and directions are dropped; parallel edges collapse.
NormalizedAdjacency BuildNormalizedAdjacency(const KnowledgeGraph& store);
NormalizedAdjacency BuildNormalizedAdjacency(
    std::size_t node_count,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

enum class Activation { kRelu, kIdentity };

struct GcnLayerWeights {
  Matrix weights;  // in_dim x out_dim
  Activation activation = Activation::kRelu;

  std::size_t in_dim() const { return weights.rows(); }
  std::size_t out_dim() const { return weights.cols(); }
};

struct NodeRepresentations {
  Matrix features;  // node_count x dim
  std::size_t layer_index = 0;

  std::span<const double> node(EntityId e) const {
    return features.row(e.index());
  }
  std::size_t dim() const { return features.cols(); }
  bool operator==(const NodeRepresentations&) const = default;
};

// sum_j A_ij * H_j, row by row.
Matrix Aggregate(const NormalizedAdjacency& adjacency, const Matrix& h);
// Dense product a * b.
Matrix MatMul(const Matrix& a, const Matrix& b);

// sigma(A H W) for every node.
NodeRepresentations GcnLayerForward(const NodeRepresentations& h,
                                    const NormalizedAdjacency& adjacency,
                                    const GcnLayerWeights& layer);

// `num_layers` square layers, uniform in [-1/sqrt(dim), 1/sqrt(dim)]. All
// layers use relu except the last, which is linear.
std::vector<GcnLayerWeights> DefaultGcnLayers(std::size_t dim,
                                              std::size_t num_layers,
                                              std::uint64_t seed);

// Applies the layers in order starting from the TransE entity vectors.
NodeRepresentations GcnForward(const EmbeddingTable& table,
                               const NormalizedAdjacency& adjacency,
                               std::span<const GcnLayerWeights> layers);

struct TrainingPair {
  Triple positive;
  NegativeTriple negative;
};

// Sum of margin losses over `pairs`, with entity vectors taken from the GCN
// output and relation vectors from the table. When `weight_gradients` is
// non-null it receives d(loss)/dW for every layer.
double GcnMarginLoss(const EmbeddingTable& table,
                     const NormalizedAdjacency& adjacency,
                     std::span<const GcnLayerWeights> layers,
                     std::span<const TrainingPair> pairs, double margin,
                     Norm norm, std::vector<Matrix>* weight_gradients,
                     std::size_t* active_pairs = nullptr);

// SGD on the layer weights with the TransE margin loss; relation vectors
// stay frozen. Deterministic given config.seed.
std::vector<EpochStats> FineTuneGcn(const EmbeddingTable& table,
                                    const KnowledgeGraph& store,
                                    std::vector<GcnLayerWeights>& layers,
                                    const TrainConfig& config);

struct RefineResult {
  NodeRepresentations representations;
  std::vector<GcnLayerWeights> layers;
  std::vector<EpochStats> fine_tune_epochs;
};

RefineResult RefineEmbeddings(const EmbeddingTable& table,
                              const KnowledgeGraph& store,
                              std::vector<GcnLayerWeights> layers,
                              const std::optional<TrainConfig>& fine_tune =
                                  std::nullopt);

// Vector file with header `kind=gcn layers=<L>` and no relation rows.
void SaveRepresentations(const std::string& path,
                         const NodeRepresentations& reps);
NodeRepresentations LoadRepresentations(const std::string& path);

}  // namespace kgrag
