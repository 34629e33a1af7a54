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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgrag/kg_store.h"
#include "kgrag/matrix.h"
#include "kgrag/random.h"

namespace kgrag {

enum class Norm { kL1, kL2 };

const char* NormName(Norm norm);
// Accepts "l1"/"L1"/"l2"/"L2".
Norm ParseNorm(std::string_view text);

// Entity and relation vectors in a shared space, one row per id.
struct EmbeddingTable {
  std::size_t dim = 0;
  Matrix entity_vectors;
  Matrix relation_vectors;
  Norm norm = Norm::kL2;

  std::span<const double> entity(EntityId e) const {
    return entity_vectors.row(e.index());
  }
  std::span<const double> relation(RelationId r) const {
    return relation_vectors.row(r.index());
  }
  bool operator==(const EmbeddingTable&) const = default;
};

struct TrainConfig {
  double margin = 1.0;
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  Norm norm = Norm::kL2;
  std::size_t negatives_per_positive = 1;
  std::uint64_t seed = 7;
  std::size_t batch_size = 32;

  // Throws ErrorCode::kConfig on non-positive margin, rate, batch or
  // negatives.
  void Validate() const;
};

enum class Slot { kHead, kTail };

struct NegativeTriple {
  Triple triple;
  Slot corrupted_slot;
};

struct EpochStats {
  std::size_t epoch_index = 0;
  double mean_loss = 0.0;
  double active_margin_fraction = 0.0;

  bool operator==(const EpochStats&) const = default;
};

// Entries uniform in [-6/sqrt(dim), 6/sqrt(dim)]; relation rows are
// L2-normalized once.
EmbeddingTable InitEmbeddings(std::size_t num_entities,
                              std::size_t num_relations, std::size_t dim,
                              std::uint64_t seed);

// d(h + r, t) under the given norm.
double TranslationDistance(std::span<const double> h,
                           std::span<const double> r,
                           std::span<const double> t, Norm norm);
double ScoreTriple(const Triple& triple, const EmbeddingTable& table,
                   Norm norm);

inline double HingeLoss(double d_pos, double d_neg, double margin) {
  double v = margin + d_pos - d_neg;
  return v > 0.0 ? v : 0.0;
}

// Corrupts head or tail (probability 1/2 each) and rejects corruptions that
// are stored triples. Throws ErrorCode::kSampling when no entity yields a
// valid corruption in either slot.
NegativeTriple SampleNegative(const Triple& positive,
                              const KnowledgeGraph& store, Rng& rng);

// Gradient of [margin + d(h+r,t) - d(h'+r,t')]_+ with respect to each of the
// five vectors. All zero when the hinge is inactive, including exactly at the
// boundary. The relation gradient combines both distance terms.
struct PairGradient {
  double loss = 0.0;
  bool active = false;
  std::vector<double> head;
  std::vector<double> relation;
  std::vector<double> tail;
  std::vector<double> negative_head;
  std::vector<double> negative_tail;
};

inline constexpr double kDistanceEpsilon = 1e-9;

PairGradient LossGradient(std::span<const double> h, std::span<const double> r,
                          std::span<const double> t,
                          std::span<const double> neg_h,
                          std::span<const double> neg_t, double margin,
                          Norm norm);
PairGradient LossGradient(const Triple& positive,
                          const NegativeTriple& negative,
                          const EmbeddingTable& table,
                          const TrainConfig& config);

// table -= learning_rate * gradient, scattered to the five rows.
void ApplyGradient(EmbeddingTable& table, const Triple& positive,
                   const NegativeTriple& negative,
                   const PairGradient& gradient, double learning_rate);

// Scales every entity row with L2 norm above 1 back onto the unit sphere.
void ProjectEntities(EmbeddingTable& table);

// One pass over the store's triples in a shuffled order with per-pair SGD.
// Entity vectors are projected after each batch. Throws ErrorCode::kTraining
// when a non-finite value appears.
EpochStats TrainEpoch(const KnowledgeGraph& store, EmbeddingTable& table,
                      const TrainConfig& config, Rng& rng,
                      std::size_t epoch_index = 0);

// Full run: InitEmbeddings(dim, seed) followed by config.epochs epochs.
struct TrainResult {
  EmbeddingTable table;
  std::vector<EpochStats> epochs;
};
TrainResult Train(const KnowledgeGraph& store, std::size_t dim,
                  const TrainConfig& config);

struct LinkPredictionReport {
  double mrr = 0.0;
  std::map<int, double> hits_at;  // k -> fraction, for k in {1, 3, 10}
  std::size_t num_queries = 0;

  bool operator==(const LinkPredictionReport&) const = default;
};

// Filtered tail rank of every test triple: candidates forming a known triple
// (in the store or in the test set) are removed, and ties with the true tail
// count against it.
std::vector<std::size_t> FilteredTailRanks(const EmbeddingTable& table,
                                           std::span<const Triple> test,
                                           const KnowledgeGraph& store,
                                           Norm norm);
LinkPredictionReport EvaluateLinkPrediction(const EmbeddingTable& table,
                                            std::span<const Triple> test,
                                            const KnowledgeGraph& store,
                                            Norm norm);

void SaveEmbeddings(const std::string& path, const EmbeddingTable& table);
EmbeddingTable LoadEmbeddings(const std::string& path);

}  // namespace kgrag
