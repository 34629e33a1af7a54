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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgrag/gcn.h"
#include "kgrag/kg_store.h"
#include "kgrag/transe.h"

namespace kgrag {

// A question substring linked to an entity. Offsets are byte positions in
// the question, [start, end).
struct EntityMention {
  EntityId entity;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string matched_surface;

  bool operator==(const EntityMention&) const = default;
};

// Matching key for linking: whitespace-separated words with leading and
// trailing ASCII punctuation stripped, lowercased, joined by single spaces.
// "Tobacco  Mosaic disease?" -> "tobacco mosaic disease".
std::string LinkKey(std::string_view text);

// Exact-key dictionary over entity labels and aliases. Scans left to right
// and takes the longest match at each word; matched words are consumed, so
// shorter overlapping matches never surface. Labels win over aliases, and
// lower entity ids win between labels sharing a key.
class EntityLinker {
 public:
  explicit EntityLinker(const KnowledgeGraph& store);

  std::vector<EntityMention> Link(std::string_view question) const;

 private:
  std::unordered_map<std::string, EntityId> dictionary_;
  std::size_t max_words_ = 0;
};

std::vector<EntityMention> LinkEntities(std::string_view question,
                                        const KnowledgeGraph& store);

struct HopTriple {
  Triple triple;
  std::size_t hop = 1;

  bool operator==(const HopTriple&) const = default;
};

struct Subgraph {
  std::vector<EntityId> seeds;
  // Ordered by hop, then by (head, relation, tail) id within a hop.
  std::vector<HopTriple> triples;
  std::size_t hop_limit = 2;
  std::size_t budget = 64;
};

// Breadth-first expansion over both edge directions. A triple's hop is one
// more than the BFS distance of its nearer endpoint; triples with hop above
// hop_limit are excluded and the list is cut at `budget`.
Subgraph ExtractSubgraph(std::span<const EntityId> seeds,
                         const KnowledgeGraph& store, std::size_t hop_limit,
                         std::size_t budget);

struct RankingWeights {
  double hop_penalty = 1.0;           // alpha
  double plausibility_weight = 0.1;   // beta, scales the TransE distance
  double similarity_weight = 1.0;     // scales cos(query, refined tail)
};

struct ScoredTriple {
  Triple triple;
  double score = 0.0;

  bool operator==(const ScoredTriple&) const = default;
};

// score = -alpha * hop - beta * d(h + r, t) + w * cos(q, g_tail), where q is
// the mean refined vector of the seeds. Sorted by score descending, ties by
// (head, relation, tail) label.
std::vector<ScoredTriple> RankEvidence(const Subgraph& subgraph,
                                       const KnowledgeGraph& store,
                                       const EmbeddingTable& table,
                                       const NodeRepresentations& refined,
                                       Norm norm,
                                       const RankingWeights& weights = {});

// [e_d; g_d]
std::vector<double> FuseRepresentations(std::span<const double> e_d,
                                        std::span<const double> g_d);

struct EvidenceBundle {
  std::vector<ScoredTriple> ranked_triples;
  std::vector<double> fused_vector;
  std::string context_text;

  bool operator==(const EvidenceBundle&) const = default;
};

inline constexpr std::string_view kEvidenceHeader = "EVIDENCE:";

// `- <head> | <relation> | <tail>`
std::string FormatEvidenceLine(const KnowledgeGraph& store,
                               const Triple& triple);

// Keeps the first top_k ranked triples and serializes them under the
// EVIDENCE: header, one per line without a trailing newline. The fused
// vector concatenates the mean TransE and mean refined vectors of the
// distinct mentioned entities. Throws ErrorCode::kNoEntity without mentions.
EvidenceBundle BuildEvidenceContext(std::span<const ScoredTriple> ranked,
                                    std::span<const EntityMention> mentions,
                                    const KnowledgeGraph& store,
                                    const EmbeddingTable& table,
                                    const NodeRepresentations& refined,
                                    std::size_t top_k);

}  // namespace kgrag
