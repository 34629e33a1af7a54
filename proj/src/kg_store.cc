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

#include "kgrag/kg_store.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kgrag/error.h"

namespace kgrag {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Invokes fn(line_number, fields) for every content line.
template <typename Fn>
void ForEachTsvLine(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (NormalizeLabel(line).empty()) continue;
    fn(line_number, SplitTabs(line));
  }
}

void InsertSorted(std::vector<std::pair<RelationId, EntityId>>& list,
                  std::pair<RelationId, EntityId> item) {
  list.insert(std::upper_bound(list.begin(), list.end(), item), item);
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void ReadVocabulary(const std::string& path, Vocabulary& vocab) {
  std::ifstream in = OpenInput(path);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t before = vocab.size();
    if (NormalizeLabel(line).empty() || vocab.Intern(line) != before) {
      throw IngestError(line_number, path + ": empty or duplicate label");
    }
  }
}

}  // namespace

std::string NormalizeLabel(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_space = false;
  for (char c : label) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::uint32_t Vocabulary::Intern(std::string_view label) {
  std::string key = NormalizeLabel(label);
  auto [it, inserted] =
      index_.try_emplace(key, static_cast<std::uint32_t>(labels_.size()));
  if (inserted) labels_.push_back(std::move(key));
  return it->second;
}

std::optional<std::uint32_t> Vocabulary::Find(std::string_view label) const {
  auto it = index_.find(NormalizeLabel(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GraphStats KnowledgeGraph::Ingest(std::istream& triples,
                                  std::istream* aliases) {
  KnowledgeGraph staged = *this;
  ForEachTsvLine(triples, [&](std::size_t line_number, const auto& fields) {
    if (fields.size() != 3) {
      throw IngestError(line_number, "expected 3 tab-separated fields, got " +
                                         std::to_string(fields.size()));
    }
    for (std::string_view field : fields) {
      if (NormalizeLabel(field).empty()) {
        throw IngestError(line_number, "empty field");
      }
    }
    staged.AddTriple(fields[0], fields[1], fields[2]);
  });
  if (aliases != nullptr) {
    ForEachTsvLine(*aliases, [&](std::size_t line_number, const auto& fields) {
      if (fields.size() != 2 || NormalizeLabel(fields[0]).empty()) {
        throw IngestError(line_number,
                          "expected surface<TAB>canonical alias line");
      }
      try {
        staged.AddAlias(fields[0], fields[1]);
      } catch (const Error& e) {
        throw IngestError(line_number, e.what());
      }
    });
  }
  *this = std::move(staged);
  return Stats();
}

EntityId KnowledgeGraph::AddEntity(std::string_view label) {
  EntityId id{entities_.Intern(label)};
  if (outgoing_.size() < entities_.size()) {
    outgoing_.resize(entities_.size());
    incoming_.resize(entities_.size());
  }
  return id;
}

RelationId KnowledgeGraph::AddRelation(std::string_view label) {
  return RelationId{relations_.Intern(label)};
}

bool KnowledgeGraph::AddTriple(std::string_view head,
                               std::string_view relation,
                               std::string_view tail) {
  EntityId h = AddEntity(head);
  RelationId r = AddRelation(relation);
  EntityId t = AddEntity(tail);
  return AddTriple(Triple{h, r, t});
}

bool KnowledgeGraph::AddTriple(const Triple& triple) {
  CheckEntity(triple.head);
  CheckEntity(triple.tail);
  CheckRelation(triple.relation);
  if (!triple_set_.insert(triple).second) return false;
  triples_.push_back(triple);
  InsertSorted(outgoing_[triple.head.index()], {triple.relation, triple.tail});
  InsertSorted(incoming_[triple.tail.index()], {triple.relation, triple.head});
  return true;
}

void KnowledgeGraph::AddAlias(std::string_view surface,
                              std::string_view canonical) {
  std::optional<EntityId> target = FindEntity(canonical);
  if (!target) {
    throw Error(ErrorCode::kLookup,
                "alias target '" + std::string(canonical) +
                    "' is not a known entity");
  }
  std::string key = NormalizeLabel(surface);
  auto [it, inserted] = aliases_.try_emplace(key, *target);
  if (!inserted && it->second != *target) {
    throw Error(ErrorCode::kLookup,
                "alias '" + key + "' already points to '" +
                    EntityLabel(it->second) + "'");
  }
}

bool KnowledgeGraph::Contains(const Triple& triple) const {
  CheckEntity(triple.head);
  CheckEntity(triple.tail);
  CheckRelation(triple.relation);
  return triple_set_.contains(triple);
}

std::vector<Neighbor> KnowledgeGraph::Neighbors(EntityId e,
                                                Direction direction) const {
  CheckEntity(e);
  std::vector<Neighbor> result;
  if (direction != Direction::kIncoming) {
    for (auto [r, other] : outgoing_[e.index()]) {
      result.push_back({r, other, Direction::kOutgoing});
    }
  }
  if (direction != Direction::kOutgoing) {
    for (auto [r, other] : incoming_[e.index()]) {
      result.push_back({r, other, Direction::kIncoming});
    }
  }
  if (direction == Direction::kBoth) std::sort(result.begin(), result.end());
  return result;
}

std::size_t KnowledgeGraph::Degree(EntityId e) const {
  CheckEntity(e);
  auto count = [e](const auto& list) {
    return std::count_if(list.begin(), list.end(),
                         [e](const auto& item) { return item.second != e; });
  };
  return static_cast<std::size_t>(count(outgoing_[e.index()]) +
                                  count(incoming_[e.index()]));
}

GraphStats KnowledgeGraph::Stats() const {
  GraphStats stats;
  stats.num_entities = entities_.size();
  stats.num_relations = relations_.size();
  stats.num_triples = triples_.size();
  for (const Triple& t : triples_) ++stats.degree_histogram[t.relation.value];
  return stats;
}

const std::string& KnowledgeGraph::EntityLabel(EntityId id) const {
  CheckEntity(id);
  return entities_.Label(id.value);
}

const std::string& KnowledgeGraph::RelationLabel(RelationId id) const {
  CheckRelation(id);
  return relations_.Label(id.value);
}

std::optional<EntityId> KnowledgeGraph::FindEntity(
    std::string_view label) const {
  if (auto id = entities_.Find(label)) return EntityId{*id};
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::FindRelation(
    std::string_view label) const {
  if (auto id = relations_.Find(label)) return RelationId{*id};
  return std::nullopt;
}

void KnowledgeGraph::CheckEntity(EntityId e) const {
  if (e.index() >= entities_.size()) {
    throw Error(ErrorCode::kLookup,
                "entity id " + std::to_string(e.value) + " out of range (" +
                    std::to_string(entities_.size()) + " entities)");
  }
}

void KnowledgeGraph::CheckRelation(RelationId r) const {
  if (r.index() >= relations_.size()) {
    throw Error(ErrorCode::kLookup,
                "relation id " + std::to_string(r.value) + " out of range (" +
                    std::to_string(relations_.size()) + " relations)");
  }
}

void KnowledgeGraph::Save(const std::string& path) const {
  std::ofstream triples = OpenOutput(path);
  for (const Triple& t : triples_) {
    triples << EntityLabel(t.head) << '\t' << RelationLabel(t.relation) << '\t'
            << EntityLabel(t.tail) << '\n';
  }
  std::ofstream vocab = OpenOutput(path + ".vocab");
  for (const std::string& label : entities_.labels()) vocab << label << '\n';
  std::ofstream relations = OpenOutput(path + ".relations");
  for (const std::string& label : relations_.labels()) {
    relations << label << '\n';
  }
  std::ofstream aliases = OpenOutput(path + ".aliases");
  for (const auto& [surface, entity] : aliases_) {
    aliases << surface << '\t' << EntityLabel(entity) << '\n';
  }
  if (!triples || !vocab || !relations || !aliases) {
    throw Error(ErrorCode::kIo, "failed writing store " + path);
  }
}

KnowledgeGraph KnowledgeGraph::Load(const std::string& path) {
  KnowledgeGraph graph;
  ReadVocabulary(path + ".vocab", graph.entities_);
  graph.outgoing_.resize(graph.entities_.size());
  graph.incoming_.resize(graph.entities_.size());
  ReadVocabulary(path + ".relations", graph.relations_);
  const std::size_t num_entities = graph.num_entities();
  const std::size_t num_relations = graph.num_relations();

  std::ifstream triples = OpenInput(path);
  std::ifstream aliases_in;
  std::istream* aliases = nullptr;
  if (std::ifstream probe(path + ".aliases"); probe) {
    aliases_in = std::move(probe);
    aliases = &aliases_in;
  }
  graph.Ingest(triples, aliases);
  if (graph.num_entities() != num_entities ||
      graph.num_relations() != num_relations) {
    throw Error(ErrorCode::kIngest,
                path + ": triples reference labels missing from the "
                       "vocabulary sidecar");
  }
  return graph;
}

}  // namespace kgrag
