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

#include "kgrag/transe.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kgrag/error.h"
#include "kgrag/kernels.h"
#include "kgrag/vector_file.h"

namespace kgrag {
namespace {

constexpr std::uint64_t kTrainStream = 1;

void NormalizeRow(std::span<double> row) {
  double n = std::sqrt(kernels::Dot(row, row));
  if (n > 0.0) {
    for (double& v : row) v /= n;
  }
}

// d(norm(x))/dx for x = h + r - t.
std::vector<double> DistanceGradient(std::span<const double> h,
                                     std::span<const double> r,
                                     std::span<const double> t,
                                     double distance, Norm norm) {
  std::vector<double> g(h.size());
  if (norm == Norm::kL2) {
    double denom = std::max(distance, kDistanceEpsilon);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = (h[i] + r[i] - t[i]) / denom;
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      double x = h[i] + r[i] - t[i];
      g[i] = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    }
  }
  return g;
}

bool AllFinite(const Matrix& m, std::size_t* bad_row) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double v : m.row(i)) {
      if (!std::isfinite(v)) {
        *bad_row = i;
        return false;
      }
    }
  }
  return true;
}

}  // namespace

const char* NormName(Norm norm) { return norm == Norm::kL1 ? "L1" : "L2"; }

Norm ParseNorm(std::string_view text) {
  if (text == "l1" || text == "L1") return Norm::kL1;
  if (text == "l2" || text == "L2") return Norm::kL2;
  throw Error(ErrorCode::kConfig,
              "unknown norm '" + std::string(text) + "' (expected l1 or l2)");
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfig, what);
  };
  require(margin > 0.0 && std::isfinite(margin), "margin must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning rate must be positive");
  require(negatives_per_positive >= 1, "need at least one negative");
  require(batch_size >= 1, "batch size must be positive");
}

EmbeddingTable InitEmbeddings(std::size_t num_entities,
                              std::size_t num_relations, std::size_t dim,
                              std::uint64_t seed) {
  if (dim == 0) {
    throw Error(ErrorCode::kConfig, "embedding dimension must be positive");
  }
  EmbeddingTable table;
  table.dim = dim;
  table.entity_vectors = Matrix(num_entities, dim);
  table.relation_vectors = Matrix(num_relations, dim);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  Rng rng(seed);
  for (double& v : table.entity_vectors.data()) {
    v = UniformReal(rng, -bound, bound);
  }
  for (double& v : table.relation_vectors.data()) {
    v = UniformReal(rng, -bound, bound);
  }
  for (std::size_t i = 0; i < num_relations; ++i) {
    NormalizeRow(table.relation_vectors.row(i));
  }
  return table;
}

double TranslationDistance(std::span<const double> h,
                           std::span<const double> r,
                           std::span<const double> t, Norm norm) {
  if (h.size() != r.size() || r.size() != t.size()) {
    throw Error(ErrorCode::kContract, "vector dimensions differ");
  }
  if (norm == Norm::kL1) return kernels::TranslationL1(h, r, t);
  return std::sqrt(kernels::TranslationL2Squared(h, r, t));
}

double ScoreTriple(const Triple& triple, const EmbeddingTable& table,
                   Norm norm) {
  if (triple.head.index() >= table.entity_vectors.rows() ||
      triple.tail.index() >= table.entity_vectors.rows() ||
      triple.relation.index() >= table.relation_vectors.rows()) {
    throw Error(ErrorCode::kLookup, "triple ids outside the embedding table");
  }
  return TranslationDistance(table.entity(triple.head),
                             table.relation(triple.relation),
                             table.entity(triple.tail), norm);
}

NegativeTriple SampleNegative(const Triple& positive,
                              const KnowledgeGraph& store, Rng& rng) {
  const std::size_t n = store.num_entities();
  if (n < 2) {
    throw Error(ErrorCode::kSampling,
                "negative sampling needs at least two entities");
  }
  auto corrupt = [&](Slot slot, std::size_t e) {
    Triple t = positive;
    (slot == Slot::kHead ? t.head : t.tail) = EntityId{e};
    return t;
  };
  for (std::size_t attempt = 0; attempt < n; ++attempt) {
    Slot slot = CoinFlip(rng) ? Slot::kHead : Slot::kTail;
    Triple candidate = corrupt(slot, UniformIndex(rng, n));
    if (!store.Contains(candidate)) return {candidate, slot};
  }
  // Dense neighbourhood: fall back to enumerating every valid corruption.
  std::vector<NegativeTriple> valid;
  for (Slot slot : {Slot::kHead, Slot::kTail}) {
    for (std::size_t e = 0; e < n; ++e) {
      Triple candidate = corrupt(slot, e);
      if (!store.Contains(candidate)) valid.push_back({candidate, slot});
    }
  }
  if (valid.empty()) {
    throw Error(ErrorCode::kSampling,
                "no valid corruption exists for (" +
                    store.EntityLabel(positive.head) + ", " +
                    store.RelationLabel(positive.relation) + ", " +
                    store.EntityLabel(positive.tail) + ") after " +
                    std::to_string(n) + " rejections");
  }
  return valid[UniformIndex(rng, valid.size())];
}

PairGradient LossGradient(std::span<const double> h, std::span<const double> r,
                          std::span<const double> t,
                          std::span<const double> neg_h,
                          std::span<const double> neg_t, double margin,
                          Norm norm) {
  const std::size_t dim = h.size();
  if (neg_h.size() != dim || neg_t.size() != dim) {
    throw Error(ErrorCode::kContract, "vector dimensions differ");
  }
  double d_pos = TranslationDistance(h, r, t, norm);
  double d_neg = TranslationDistance(neg_h, r, neg_t, norm);
  PairGradient g;
  g.loss = HingeLoss(d_pos, d_neg, margin);
  g.active = g.loss > 0.0;
  if (!g.active) {
    g.head = g.relation = g.tail = g.negative_head = g.negative_tail =
        std::vector<double>(dim, 0.0);
    return g;
  }
  std::vector<double> pos = DistanceGradient(h, r, t, d_pos, norm);
  std::vector<double> neg = DistanceGradient(neg_h, r, neg_t, d_neg, norm);
  g.head = pos;
  g.tail.resize(dim);
  g.relation.resize(dim);
  g.negative_head.resize(dim);
  g.negative_tail = neg;
  for (std::size_t i = 0; i < dim; ++i) {
    g.tail[i] = -pos[i];
    g.relation[i] = pos[i] - neg[i];
    g.negative_head[i] = -neg[i];
  }
  return g;
}

PairGradient LossGradient(const Triple& positive,
                          const NegativeTriple& negative,
                          const EmbeddingTable& table,
                          const TrainConfig& config) {
  const Triple& n = negative.triple;
  return LossGradient(table.entity(positive.head),
                      table.relation(positive.relation),
                      table.entity(positive.tail), table.entity(n.head),
                      table.entity(n.tail), config.margin, config.norm);
}

void ApplyGradient(EmbeddingTable& table, const Triple& positive,
                   const NegativeTriple& negative,
                   const PairGradient& gradient, double learning_rate) {
  if (!gradient.active) return;
  auto step = [&](Matrix& m, std::size_t row, const std::vector<double>& g) {
    kernels::Axpy(-learning_rate, g, m.row(row));
  };
  step(table.entity_vectors, positive.head.index(), gradient.head);
  step(table.entity_vectors, positive.tail.index(), gradient.tail);
  step(table.relation_vectors, positive.relation.index(), gradient.relation);
  step(table.entity_vectors, negative.triple.head.index(),
       gradient.negative_head);
  step(table.entity_vectors, negative.triple.tail.index(),
       gradient.negative_tail);
}

void ProjectEntities(EmbeddingTable& table) {
  for (std::size_t i = 0; i < table.entity_vectors.rows(); ++i) {
    auto row = table.entity_vectors.row(i);
    double sq = kernels::Dot(row, row);
    if (sq > 1.0) {
      double scale = 1.0 / std::sqrt(sq);
      for (double& v : row) v *= scale;
    }
  }
}

EpochStats TrainEpoch(const KnowledgeGraph& store, EmbeddingTable& table,
                      const TrainConfig& config, Rng& rng,
                      std::size_t epoch_index) {
  config.Validate();
  if (table.entity_vectors.rows() != store.num_entities() ||
      table.relation_vectors.rows() != store.num_relations()) {
    throw Error(ErrorCode::kContract,
                "embedding table does not match the store vocabularies");
  }
  std::vector<Triple> order(store.triples().begin(), store.triples().end());
  Shuffle(std::span<Triple>(order), rng);

  double loss_sum = 0.0;
  std::size_t pairs = 0, active = 0;
  for (std::size_t start = 0; start < order.size();
       start += config.batch_size) {
    std::size_t end = std::min(order.size(), start + config.batch_size);
    for (std::size_t i = start; i < end; ++i) {
      for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
        NegativeTriple negative = SampleNegative(order[i], store, rng);
        PairGradient g = LossGradient(order[i], negative, table, config);
        loss_sum += g.loss;
        ++pairs;
        if (g.active) {
          ++active;
          ApplyGradient(table, order[i], negative, g, config.learning_rate);
        }
      }
    }
    ProjectEntities(table);
    std::size_t bad = 0;
    const char* which = nullptr;
    if (!AllFinite(table.entity_vectors, &bad)) {
      which = "entity";
    } else if (!AllFinite(table.relation_vectors, &bad)) {
      which = "relation";
    }
    if (which != nullptr) {
      throw Error(ErrorCode::kTraining,
                  std::string("non-finite value in ") + which + " vector " +
                      std::to_string(bad) + " during epoch " +
                      std::to_string(epoch_index) + " (batch starting at " +
                      std::to_string(start) + "); lower the learning rate");
    }
  }
  EpochStats stats;
  stats.epoch_index = epoch_index;
  if (pairs > 0) {
    stats.mean_loss = loss_sum / static_cast<double>(pairs);
    stats.active_margin_fraction =
        static_cast<double>(active) / static_cast<double>(pairs);
  }
  return stats;
}

TrainResult Train(const KnowledgeGraph& store, std::size_t dim,
                  const TrainConfig& config) {
  config.Validate();
  TrainResult result;
  result.table = InitEmbeddings(store.num_entities(), store.num_relations(),
                                dim, config.seed);
  result.table.norm = config.norm;
  Rng rng(DeriveSeed(config.seed, kTrainStream));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    result.epochs.push_back(
        TrainEpoch(store, result.table, config, rng, epoch));
  }
  return result;
}

std::vector<std::size_t> FilteredTailRanks(const EmbeddingTable& table,
                                           std::span<const Triple> test,
                                           const KnowledgeGraph& store,
                                           Norm norm) {
  std::unordered_set<Triple, TripleHash> known(test.begin(), test.end());
  const std::size_t n = table.entity_vectors.rows();
  std::vector<std::size_t> ranks;
  ranks.reserve(test.size());
  for (const Triple& q : test) {
    store.CheckEntity(q.head);
    store.CheckEntity(q.tail);
    store.CheckRelation(q.relation);
    auto h = table.entity(q.head);
    auto r = table.relation(q.relation);
    double target = TranslationDistance(h, r, table.entity(q.tail), norm);
    std::size_t rank = 1;
    for (std::size_t e = 0; e < n; ++e) {
      EntityId candidate{e};
      if (candidate == q.tail) continue;
      Triple alt{q.head, q.relation, candidate};
      if (store.Contains(alt) || known.contains(alt)) continue;
      if (TranslationDistance(h, r, table.entity_vectors.row(e), norm) <=
          target) {
        ++rank;
      }
    }
    ranks.push_back(rank);
  }
  return ranks;
}

LinkPredictionReport EvaluateLinkPrediction(const EmbeddingTable& table,
                                            std::span<const Triple> test,
                                            const KnowledgeGraph& store,
                                            Norm norm) {
  if (test.empty()) {
    throw Error(ErrorCode::kEvaluation, "link prediction needs test triples");
  }
  std::vector<std::size_t> ranks = FilteredTailRanks(table, test, store, norm);
  LinkPredictionReport report;
  report.num_queries = ranks.size();
  const int ks[] = {1, 3, 10};
  for (int k : ks) report.hits_at[k] = 0.0;
  for (std::size_t rank : ranks) {
    report.mrr += 1.0 / static_cast<double>(rank);
    for (int k : ks) {
      if (rank <= static_cast<std::size_t>(k)) report.hits_at[k] += 1.0;
    }
  }
  const double count = static_cast<double>(ranks.size());
  report.mrr /= count;
  for (int k : ks) report.hits_at[k] /= count;
  return report;
}

void SaveEmbeddings(const std::string& path, const EmbeddingTable& table) {
  VectorFile file;
  file.entities = table.entity_vectors;
  file.relations = table.relation_vectors;
  if (file.entities.rows() == 0) file.entities = Matrix(0, table.dim);
  file.header["norm"] = NormName(table.norm);
  file.header_order = {"norm"};
  WriteVectorFile(path, file);
}

EmbeddingTable LoadEmbeddings(const std::string& path) {
  VectorFile file = ReadVectorFile(path);
  if (auto it = file.header.find("kind");
      it != file.header.end() && it->second != "transe") {
    throw Error(ErrorCode::kIngest,
                path + " holds '" + it->second + "' vectors, not TransE");
  }
  EmbeddingTable table;
  table.dim = file.entities.cols();
  table.entity_vectors = std::move(file.entities);
  table.relation_vectors = std::move(file.relations);
  if (auto it = file.header.find("norm"); it != file.header.end()) {
    table.norm = ParseNorm(it->second);
  }
  return table;
}

}  // namespace kgrag
