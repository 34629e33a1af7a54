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

#include "kgrag/retrieval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "kgrag/error.h"
#include "kgrag/kernels.h"

namespace kgrag {
namespace {

struct Word {
  std::size_t start;
  std::size_t end;
  std::string key;
};

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsAsciiPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

std::vector<Word> SplitWords(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsAsciiSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsAsciiSpace(text[i])) ++i;
    std::size_t end = i;
    while (start < end && IsAsciiPunct(text[start])) ++start;
    while (end > start && IsAsciiPunct(text[end - 1])) --end;
    if (start == end) continue;
    std::string key(text.substr(start, end - start));
    for (char& c : key) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    words.push_back({start, end, std::move(key)});
  }
  return words;
}

std::string JoinKeys(std::span<const Word> words) {
  std::string key;
  for (const Word& w : words) {
    if (!key.empty()) key.push_back(' ');
    key += w.key;
  }
  return key;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  double na = kernels::Dot(a, a);
  double nb = kernels::Dot(b, b);
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return kernels::Dot(a, b) / std::sqrt(na * nb);
}

std::vector<double> MeanRows(const Matrix& m, std::span<const EntityId> ids) {
  std::vector<double> mean(m.cols(), 0.0);
  for (EntityId e : ids) kernels::Axpy(1.0, m.row(e.index()), mean);
  if (!ids.empty()) {
    for (double& v : mean) v /= static_cast<double>(ids.size());
  }
  return mean;
}

}  // namespace

std::string LinkKey(std::string_view text) {
  return JoinKeys(SplitWords(text));
}

EntityLinker::EntityLinker(const KnowledgeGraph& store) {
  auto add = [this](std::string_view surface, EntityId e) {
    std::vector<Word> words = SplitWords(surface);
    if (words.empty()) return;
    if (dictionary_.try_emplace(JoinKeys(words), e).second) {
      max_words_ = std::max(max_words_, words.size());
    }
  };
  for (std::size_t i = 0; i < store.num_entities(); ++i) {
    EntityId e{i};
    add(store.EntityLabel(e), e);
  }
  for (const auto& [surface, e] : store.aliases()) add(surface, e);
}

std::vector<EntityMention> EntityLinker::Link(std::string_view question) const {
  std::vector<Word> words = SplitWords(question);
  std::vector<EntityMention> mentions;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t longest = std::min(max_words_, words.size() - i);
    bool matched = false;
    for (std::size_t n = longest; n >= 1; --n) {
      std::span<const Word> window(words.data() + i, n);
      auto it = dictionary_.find(JoinKeys(window));
      if (it == dictionary_.end()) continue;
      std::size_t start = window.front().start;
      std::size_t end = window.back().end;
      mentions.push_back({it->second, start, end,
                          std::string(question.substr(start, end - start))});
      i += n;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return mentions;
}

std::vector<EntityMention> LinkEntities(std::string_view question,
                                        const KnowledgeGraph& store) {
  return EntityLinker(store).Link(question);
}

Subgraph ExtractSubgraph(std::span<const EntityId> seeds,
                         const KnowledgeGraph& store, std::size_t hop_limit,
                         std::size_t budget) {
  if (seeds.empty()) {
    throw Error(ErrorCode::kContract, "subgraph extraction needs seeds");
  }
  if (hop_limit == 0) {
    throw Error(ErrorCode::kContract, "hop limit must be at least 1");
  }
  Subgraph sub;
  sub.hop_limit = hop_limit;
  sub.budget = budget;
  std::vector<bool> visited(store.num_entities(), false);
  std::vector<EntityId> frontier;
  for (EntityId s : seeds) {
    store.CheckEntity(s);
    if (visited[s.index()]) continue;
    visited[s.index()] = true;
    sub.seeds.push_back(s);
    frontier.push_back(s);
  }

  std::unordered_set<Triple, TripleHash> collected;
  for (std::size_t hop = 1; hop <= hop_limit && !frontier.empty(); ++hop) {
    if (sub.triples.size() >= budget) break;
    std::vector<Triple> layer;
    std::vector<EntityId> next;
    for (EntityId node : frontier) {
      for (const Neighbor& nb : store.Neighbors(node, Direction::kBoth)) {
        Triple t = nb.direction == Direction::kOutgoing
                       ? Triple{node, nb.relation, nb.entity}
                       : Triple{nb.entity, nb.relation, node};
        if (collected.insert(t).second) layer.push_back(t);
        if (!visited[nb.entity.index()]) {
          visited[nb.entity.index()] = true;
          next.push_back(nb.entity);
        }
      }
    }
    std::sort(layer.begin(), layer.end());
    for (const Triple& t : layer) {
      if (sub.triples.size() >= budget) break;
      sub.triples.push_back({t, hop});
    }
    frontier = std::move(next);
  }
  return sub;
}

std::vector<ScoredTriple> RankEvidence(const Subgraph& subgraph,
                                       const KnowledgeGraph& store,
                                       const EmbeddingTable& table,
                                       const NodeRepresentations& refined,
                                       Norm norm,
                                       const RankingWeights& weights) {
  std::vector<ScoredTriple> ranked;
  if (subgraph.triples.empty()) return ranked;
  if (refined.features.rows() != store.num_entities() ||
      table.entity_vectors.rows() != store.num_entities()) {
    throw Error(ErrorCode::kContract,
                "representations do not cover the store's entities");
  }
  std::vector<double> query = MeanRows(refined.features, subgraph.seeds);
  ranked.reserve(subgraph.triples.size());
  for (const HopTriple& ht : subgraph.triples) {
    double score = -weights.hop_penalty * static_cast<double>(ht.hop);
    if (weights.plausibility_weight != 0.0) {
      score -= weights.plausibility_weight * ScoreTriple(ht.triple, table, norm);
    }
    if (weights.similarity_weight != 0.0) {
      score += weights.similarity_weight *
               Cosine(query, refined.node(ht.triple.tail));
    }
    ranked.push_back({ht.triple, score});
  }
  auto labels = [&store](const Triple& t) {
    return std::tie(store.EntityLabel(t.head), store.RelationLabel(t.relation),
                    store.EntityLabel(t.tail));
  };
  std::sort(ranked.begin(), ranked.end(),
            [&](const ScoredTriple& a, const ScoredTriple& b) {
              if (a.score != b.score) return a.score > b.score;
              return labels(a.triple) < labels(b.triple);
            });
  return ranked;
}

std::vector<double> FuseRepresentations(std::span<const double> e_d,
                                        std::span<const double> g_d) {
  if (e_d.empty() && g_d.empty()) {
    throw Error(ErrorCode::kContract, "nothing to fuse: both inputs empty");
  }
  std::vector<double> fused;
  fused.reserve(e_d.size() + g_d.size());
  fused.insert(fused.end(), e_d.begin(), e_d.end());
  fused.insert(fused.end(), g_d.begin(), g_d.end());
  for (double v : fused) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kContract, "cannot fuse non-finite vectors");
    }
  }
  return fused;
}

std::string FormatEvidenceLine(const KnowledgeGraph& store,
                               const Triple& triple) {
  return "- " + store.EntityLabel(triple.head) + " | " +
         store.RelationLabel(triple.relation) + " | " +
         store.EntityLabel(triple.tail);
}

EvidenceBundle BuildEvidenceContext(std::span<const ScoredTriple> ranked,
                                    std::span<const EntityMention> mentions,
                                    const KnowledgeGraph& store,
                                    const EmbeddingTable& table,
                                    const NodeRepresentations& refined,
                                    std::size_t top_k) {
  if (mentions.empty()) {
    throw Error(ErrorCode::kNoEntity,
                "no entity linked; refusing to build unguided evidence");
  }
  std::vector<EntityId> entities;
  for (const EntityMention& m : mentions) {
    store.CheckEntity(m.entity);
    if (std::find(entities.begin(), entities.end(), m.entity) ==
        entities.end()) {
      entities.push_back(m.entity);
    }
  }
  EvidenceBundle bundle;
  std::size_t keep = std::min(top_k, ranked.size());
  bundle.ranked_triples.assign(ranked.begin(), ranked.begin() + keep);
  bundle.context_text = std::string(kEvidenceHeader);
  for (const ScoredTriple& st : bundle.ranked_triples) {
    bundle.context_text += '\n';
    bundle.context_text += FormatEvidenceLine(store, st.triple);
  }
  std::vector<double> e_d = MeanRows(table.entity_vectors, entities);
  std::vector<double> g_d = MeanRows(refined.features, entities);
  bundle.fused_vector = FuseRepresentations(e_d, g_d);
  return bundle;
}

}  // namespace kgrag
