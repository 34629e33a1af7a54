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

#include "support/synthetic.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "kgrag/random.h"

namespace kgrag::testing {

std::string DataPath(const std::string& name) {
  return std::string(KGRAG_DATA_DIR) + "/" + name;
}

KnowledgeGraph LoadDeskKg() {
  std::ifstream triples(DataPath("desk_kg.tsv"));
  std::ifstream aliases(DataPath("desk_aliases.tsv"));
  if (!triples || !aliases) throw std::runtime_error("desk fixture missing");
  KnowledgeGraph store;
  store.Ingest(triples, &aliases);
  return store;
}

LinkPredictionFixture MakeCompositionalGraph(std::uint64_t seed,
                                             double holdout) {
  constexpr std::size_t kGroups = 10, kMembers = 5, kShifts = 5;
  constexpr std::size_t entities = kGroups * kMembers;
  std::vector<Triple> candidates;
  for (std::size_t k = 1; k <= kShifts; ++k) {
    for (std::size_t c = 0; c + k < kGroups; ++c) {
      for (std::size_t i = 0; i < kMembers; ++i) {
        candidates.push_back({EntityId{c * kMembers + i}, RelationId{k - 1},
                              EntityId{(c + k) * kMembers + i}});
      }
    }
  }
  Rng rng(seed);
  Shuffle(std::span<Triple>(candidates), rng);

  std::vector<std::size_t> degree(entities, 0);
  for (const Triple& t : candidates) {
    ++degree[t.head.index()];
    ++degree[t.tail.index()];
  }
  const std::size_t want =
      static_cast<std::size_t>(holdout * static_cast<double>(candidates.size()) + 0.5);
  LinkPredictionFixture fixture;
  std::vector<Triple> train;
  for (const Triple& t : candidates) {
    if (fixture.test.size() < want && degree[t.head.index()] > 1 &&
        degree[t.tail.index()] > 1) {
      --degree[t.head.index()];
      --degree[t.tail.index()];
      fixture.test.push_back(t);
    } else {
      train.push_back(t);
    }
  }
  for (std::size_t e = 0; e < entities; ++e) {
    fixture.train.AddEntity("e" + std::to_string(e));
  }
  for (std::size_t k = 1; k <= kShifts; ++k) {
    fixture.train.AddRelation("shift " + std::to_string(k));
  }
  for (const Triple& t : train) fixture.train.AddTriple(t);
  return fixture;
}

KnowledgeGraph MakeChainGraph(std::size_t n) {
  KnowledgeGraph g;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    g.AddTriple("e" + std::to_string(i), "next", "e" + std::to_string(i + 1));
  }
  return g;
}

KnowledgeGraph MakeRandomGraph(std::uint64_t seed, std::size_t nodes,
                               std::size_t triples, std::size_t relations) {
  KnowledgeGraph g;
  for (std::size_t i = 0; i < nodes; ++i) g.AddEntity("n" + std::to_string(i));
  for (std::size_t r = 0; r < relations; ++r) {
    g.AddRelation("r" + std::to_string(r));
  }
  Rng rng(seed);
  std::size_t attempts = 0;
  while (g.num_triples() < triples && attempts++ < triples * 50) {
    g.AddTriple(Triple{EntityId{UniformIndex(rng, nodes)},
                       RelationId{UniformIndex(rng, relations)},
                       EntityId{UniformIndex(rng, nodes)}});
  }
  return g;
}

QaBenchmark MakePestQaBenchmark(std::uint64_t seed, std::size_t questions) {
  constexpr std::size_t kDiseases = 30, kLesions = 45, kAgents = 55,
                        kFields = 20, kUniqueLesions = 30;
  auto disease = [](std::size_t i) { return "disease " + std::to_string(i); };
  auto lesion = [](std::size_t i) { return "lesion " + std::to_string(i); };
  auto agent = [](std::size_t i) { return "agent " + std::to_string(i); };
  auto field = [](std::size_t i) { return "field " + std::to_string(i); };

  Rng rng(seed);
  QaBenchmark bench;
  KnowledgeGraph& g = bench.store;
  // (disease, relation) -> tails, for building gold answers.
  std::map<std::pair<std::size_t, std::string>, std::set<std::string>> facts;
  auto add = [&](std::size_t d, const std::string& rel,
                 const std::string& tail) {
    g.AddTriple(disease(d), rel, tail);
    facts[{d, rel}].insert(tail);
  };
  auto pick_other = [&](std::size_t n, const std::set<std::string>& taken,
                        auto name) {
    while (true) {
      std::string candidate = name(UniformIndex(rng, n));
      if (!taken.contains(candidate)) return candidate;
    }
  };

  for (std::size_t d = 0; d < kDiseases; ++d) {
    add(d, "has symptom", lesion(d));
    add(d, "has symptom",
        lesion(kUniqueLesions + d % (kLesions - kUniqueLesions)));
    add(d, "has symptom",
        lesion(kUniqueLesions +
               UniformIndex(rng, kLesions - kUniqueLesions)));
    add(d, "treated by", agent((2 * d) % kAgents));
    add(d, "treated by", agent((2 * d + 1) % kAgents));
    const auto& treated = facts[{d, "treated by"}];
    std::set<std::string> taken = treated;
    add(d, "prevented by", pick_other(kAgents, taken, agent));
    taken.insert(facts[{d, "prevented by"}].begin(),
                 facts[{d, "prevented by"}].end());
    add(d, "prevented by", pick_other(kAgents, taken, agent));
    add(d, "occurs in", field(d % kFields));
    if (CoinFlip(rng)) add(d, "occurs in", field(UniformIndex(rng, kFields)));
  }
  // Agents never drawn above still belong to the vocabulary.
  for (std::size_t a = 0; a < kAgents; ++a) g.AddEntity(agent(a));

  auto gold = [&](std::size_t d, const std::string& rel) {
    return facts.at({d, rel});
  };
  struct Ask {
    const char* relation;
    const char* direct;
    const char* multihop;
  };
  const Ask asks[] = {
      {"prevented by", "How to prevent {d}?",
       "How to prevent the disease showing {s}?"},
      {"treated by", "How to treat {d}?",
       "How to treat the disease that shows {s}?"},
      {"has symptom", "What are the symptoms of {d}?", nullptr},
  };
  auto fill = [](std::string text, const std::string& key,
                 const std::string& value) {
    auto pos = text.find(key);
    return text.replace(pos, key.size(), value);
  };

  for (std::size_t q = 0; q < questions; ++q) {
    QaExample ex;
    ex.id = "q" + std::to_string(q);
    std::size_t kind = q % 10;  // 4 direct, 3 multihop, 3 comparative
    if (kind < 4) {
      const Ask& ask = asks[UniformIndex(rng, 3)];
      std::size_t d = UniformIndex(rng, kDiseases);
      ex.qtype = QuestionType::kDirect;
      ex.question = fill(ask.direct, "{d}", disease(d));
      ex.gold_entities = gold(d, ask.relation);
    } else if (kind < 7) {
      const Ask& ask = asks[UniformIndex(rng, 2)];
      std::size_t d = UniformIndex(rng, kUniqueLesions);
      ex.qtype = QuestionType::kMultihop;
      ex.question = fill(ask.multihop, "{s}", lesion(d));
      ex.gold_entities = gold(d, ask.relation);
    } else {
      const Ask& ask = asks[UniformIndex(rng, 2)];
      std::size_t a = UniformIndex(rng, kDiseases);
      std::size_t b = (a + 1 + UniformIndex(rng, kDiseases - 1)) % kDiseases;
      ex.qtype = QuestionType::kComparative;
      std::string verb = ask.relation == std::string("prevented by")
                             ? "prevent"
                             : "treat";
      ex.question = "Compare how to " + verb + " " + disease(a) + " and " +
                    disease(b) + ".";
      ex.gold_entities = gold(a, ask.relation);
      auto more = gold(b, ask.relation);
      ex.gold_entities.insert(more.begin(), more.end());
    }
    bench.examples.push_back(std::move(ex));
  }
  return bench;
}

}  // namespace kgrag::testing
