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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kgrag {

// Dense index into one of the store vocabularies. Tag keeps entity and
// relation ids from being mixed up.
template <typename Tag>
struct DenseId {
  std::uint32_t value = 0;

  constexpr DenseId() = default;
  constexpr explicit DenseId(std::uint32_t v) : value(v) {}
  constexpr explicit DenseId(std::size_t v)
      : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit DenseId(int v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }
  constexpr auto operator<=>(const DenseId&) const = default;
};

using EntityId = DenseId<struct EntityTag>;
using RelationId = DenseId<struct RelationTag>;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  constexpr auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t x = (std::uint64_t{t.head.value} << 32) ^ t.tail.value;
    x ^= std::uint64_t{t.relation.value} * 0x9e3779b97f4a7c15ULL;
    x ^= x >> 29;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 32;
    return static_cast<std::size_t>(x);
  }
};

enum class Direction { kOutgoing, kIncoming, kBoth };

struct Neighbor {
  RelationId relation;
  EntityId entity;
  Direction direction;  // kOutgoing or kIncoming, never kBoth

  auto operator<=>(const Neighbor&) const = default;
};

struct GraphStats {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::size_t num_triples = 0;
  // Triples per relation, keyed by relation id.
  std::map<std::uint32_t, std::size_t> degree_histogram;

  bool operator==(const GraphStats&) const = default;
};

// Lowercases ASCII letters, trims, and collapses internal whitespace runs to
// a single space. Bytes outside ASCII pass through unchanged.
std::string NormalizeLabel(std::string_view label);

// Interns normalized labels into contiguous ids in first-appearance order.
class Vocabulary {
 public:
  // Returns the id of the normalized label, assigning the next id if new.
  std::uint32_t Intern(std::string_view label);
  std::optional<std::uint32_t> Find(std::string_view label) const;
  const std::string& Label(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }
  std::span<const std::string> labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Directed triple store with adjacency in both directions.
//
// Writes (AddTriple, AddAlias, Ingest) are single-writer. Once populated the
// store is only read and may be shared across threads.
class KnowledgeGraph {
 public:
  // Reads `head<TAB>relation<TAB>tail` lines and, optionally,
  // `surface<TAB>canonical` alias lines. Blank lines and lines starting with
  // '#' are skipped. All-or-nothing: on IngestError the store is unchanged.
  GraphStats Ingest(std::istream& triples, std::istream* aliases = nullptr);

  // Returns false when the triple was already present.
  bool AddTriple(std::string_view head, std::string_view relation,
                 std::string_view tail);
  bool AddTriple(const Triple& triple);
  EntityId AddEntity(std::string_view label);
  RelationId AddRelation(std::string_view label);
  // Registers an alternative surface form for an existing entity.
  void AddAlias(std::string_view surface, std::string_view canonical);

  bool Contains(const Triple& triple) const;
  bool Contains(EntityId h, RelationId r, EntityId t) const {
    return Contains(Triple{h, r, t});
  }

  // Sorted by (relation, entity, direction). kBoth merges both lists.
  std::vector<Neighbor> Neighbors(EntityId e, Direction direction) const;
  // Incident edges excluding self-loops; equals the size of
  // Neighbors(e, kBoth) without entries pointing back at e.
  std::size_t Degree(EntityId e) const;

  GraphStats Stats() const;

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_triples() const { return triples_.size(); }
  // Insertion order.
  std::span<const Triple> triples() const { return triples_; }

  const std::string& EntityLabel(EntityId id) const;
  const std::string& RelationLabel(RelationId id) const;
  std::optional<EntityId> FindEntity(std::string_view label) const;
  std::optional<RelationId> FindRelation(std::string_view label) const;
  // Normalized surface form -> entity, sorted by surface.
  const std::map<std::string, EntityId>& aliases() const { return aliases_; }

  // Writes `path` (triples as labels), `path.vocab` (entity labels, line
  // number = id), `path.relations` and `path.aliases`.
  void Save(const std::string& path) const;
  static KnowledgeGraph Load(const std::string& path);

  void CheckEntity(EntityId e) const;
  void CheckRelation(RelationId r) const;

 private:
  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> triple_set_;
  // Per entity: (relation, other endpoint), kept sorted.
  std::vector<std::vector<std::pair<RelationId, EntityId>>> outgoing_;
  std::vector<std::vector<std::pair<RelationId, EntityId>>> incoming_;
  std::map<std::string, EntityId> aliases_;
};

}  // namespace kgrag
