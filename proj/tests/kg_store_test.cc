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

#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "kgrag/error.h"
#include "kgrag/kg_store.h"
#include "kgrag/random.h"
#include "support/synthetic.h"

namespace kgrag {
namespace {

using testing::LoadDeskKg;

KnowledgeGraph FromText(const std::string& triples,
                        const std::string& aliases = "") {
  std::istringstream t(triples), a(aliases);
  KnowledgeGraph g;
  g.Ingest(t, aliases.empty() ? nullptr : &a);
  return g;
}

TEST_CASE("labels are normalized before interning") {
  CHECK(NormalizeLabel("  Tobacco   Mosaic\tDisease ") ==
        "tobacco mosaic disease");
  CHECK(NormalizeLabel("") == "");
  KnowledgeGraph g;
  EntityId a = g.AddEntity("Black Shank");
  CHECK(g.AddEntity("black  shank") == a);
  CHECK(g.EntityLabel(a) == "black shank");
}

TEST_CASE("ids are contiguous in first-appearance order") {
  KnowledgeGraph g = FromText("a\tr\tb\nb\ts\tc\nc\tr\ta\n");
  CHECK(g.num_entities() == 3);
  CHECK(g.num_relations() == 2);
  CHECK(g.FindEntity("a")->value == 0);
  CHECK(g.FindEntity("b")->value == 1);
  CHECK(g.FindEntity("c")->value == 2);
  CHECK(g.FindRelation("s")->value == 1);
  CHECK_FALSE(g.FindEntity("d").has_value());
}

TEST_CASE("duplicate triples are stored once") {
  KnowledgeGraph g;
  CHECK(g.AddTriple("a", "r", "b"));
  CHECK_FALSE(g.AddTriple("A", "r", "b"));
  CHECK(g.num_triples() == 1);
}

TEST_CASE("neighbors of a hub with three outgoing and two incoming edges") {
  KnowledgeGraph g = FromText(
      "hub\tr1\tx\nhub\tr1\ty\nhub\tr2\tz\nu\tr1\thub\nv\tr3\thub\n");
  EntityId hub = *g.FindEntity("hub");
  auto out = g.Neighbors(hub, Direction::kOutgoing);
  auto in = g.Neighbors(hub, Direction::kIncoming);
  auto both = g.Neighbors(hub, Direction::kBoth);
  CHECK(out.size() == 3);
  CHECK(in.size() == 2);
  CHECK(both.size() == 5);
  CHECK(g.Degree(hub) == 5);
  for (const Neighbor& n : out) CHECK(n.direction == Direction::kOutgoing);
  for (const Neighbor& n : in) CHECK(n.direction == Direction::kIncoming);
  CHECK(std::is_sorted(both.begin(), both.end()));
  CHECK(in[0].entity == *g.FindEntity("u"));
  CHECK(in[1].entity == *g.FindEntity("v"));
}

TEST_CASE("self-loops are stored but not counted in the degree") {
  KnowledgeGraph g = FromText("a\tr\ta\na\tr\tb\n");
  EntityId a = *g.FindEntity("a");
  CHECK(g.Contains(a, *g.FindRelation("r"), a));
  CHECK(g.Degree(a) == 1);
}

TEST_CASE("desk fixture statistics") {
  KnowledgeGraph g = LoadDeskKg();
  GraphStats s = g.Stats();
  CHECK(s.num_entities == 21);
  CHECK(s.num_relations == 8);
  CHECK(s.num_triples == 20);
  std::size_t total = 0;
  for (const auto& [rel, count] : s.degree_histogram) total += count;
  CHECK(total == 20);
  CHECK(s.degree_histogram.at(g.FindRelation("has symptom")->value) == 6);
  CHECK(s.degree_histogram.at(g.FindRelation("prevented by")->value) == 5);
  CHECK(g.aliases().size() == 4);
  CHECK(g.aliases().at("tmd") == *g.FindEntity("tobacco mosaic disease"));
}

TEST_CASE("the source triple is present in the desk fixture") {
  KnowledgeGraph g = LoadDeskKg();
  auto h = g.FindEntity("tobacco mosaic disease");
  auto r = g.FindRelation("treated by");
  auto t = g.FindEntity("spraying antiviral agents");
  REQUIRE(h);
  REQUIRE(r);
  REQUIRE(t);
  CHECK(g.Contains(*h, *r, *t));
  CHECK_FALSE(g.Contains(*t, *r, *h));
}

TEST_CASE("contains agrees with a brute-force scan over every id triple") {
  KnowledgeGraph g = testing::MakeRandomGraph(5, 10, 30, 3);
  std::set<Triple> listed(g.triples().begin(), g.triples().end());
  CHECK(listed.size() == g.num_triples());
  for (std::size_t h = 0; h < 10; ++h) {
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t t = 0; t < 10; ++t) {
        Triple q{EntityId{h}, RelationId{r}, EntityId{t}};
        CHECK(g.Contains(q) == listed.contains(q));
      }
    }
  }
}

TEST_CASE("neighbor lists mirror the triple list") {
  KnowledgeGraph g = testing::MakeRandomGraph(8, 15, 40, 4);
  std::size_t out_total = 0, in_total = 0;
  for (std::size_t e = 0; e < g.num_entities(); ++e) {
    for (const Neighbor& n : g.Neighbors(EntityId{e}, Direction::kOutgoing)) {
      CHECK(g.Contains(EntityId{e}, n.relation, n.entity));
      ++out_total;
    }
    for (const Neighbor& n : g.Neighbors(EntityId{e}, Direction::kIncoming)) {
      CHECK(g.Contains(n.entity, n.relation, EntityId{e}));
      ++in_total;
    }
  }
  CHECK(out_total == g.num_triples());
  CHECK(in_total == g.num_triples());
}

TEST_CASE("ingest is deterministic") {
  KnowledgeGraph a = LoadDeskKg(), b = LoadDeskKg();
  CHECK(a.Stats() == b.Stats());
  CHECK(std::equal(a.triples().begin(), a.triples().end(),
                   b.triples().begin(), b.triples().end()));
}

TEST_CASE("comments, blank lines and CRLF endings are accepted") {
  KnowledgeGraph g = FromText("# header\r\n\r\na\tr\tb\r\n   \n");
  CHECK(g.num_triples() == 1);
  CHECK(g.FindEntity("b").has_value());
}

TEST_CASE("malformed lines raise an ingest error with the line number") {
  auto expect_line = [](const std::string& text, std::size_t line) {
    std::istringstream in(text);
    KnowledgeGraph g;
    g.AddTriple("x", "r", "y");
    try {
      g.Ingest(in);
      FAIL("expected an ingest error");
    } catch (const IngestError& e) {
      CHECK(e.line() == line);
      CHECK(e.code() == ErrorCode::kIngest);
    }
    // All-or-nothing: the store kept its previous contents.
    CHECK(g.num_triples() == 1);
    CHECK(g.num_entities() == 2);
  };
  expect_line("a\tr\tb\na\tr\n", 2);
  expect_line("a\tr\tb\n# c\na\tr\tb\tc\n", 3);
  expect_line("a\t\tb\n", 1);
}

TEST_CASE("aliases must point at known entities and cannot be redefined") {
  KnowledgeGraph g = FromText("a\tr\tb\n");
  g.AddAlias("Alpha", "a");
  CHECK(g.aliases().at("alpha") == *g.FindEntity("a"));
  g.AddAlias("alpha", "a");  // same target is fine
  CHECK_THROWS_AS(g.AddAlias("alpha", "b"), Error);
  CHECK_THROWS_AS(g.AddAlias("zeta", "missing"), Error);
  std::istringstream triples("c\tr\td\n"), aliases("gamma\tnowhere\n");
  CHECK_THROWS_AS(g.Ingest(triples, &aliases), IngestError);
  CHECK_FALSE(g.FindEntity("c").has_value());
}

TEST_CASE("unknown ids are rejected") {
  KnowledgeGraph g = FromText("a\tr\tb\n");
  CHECK_THROWS_AS(g.EntityLabel(EntityId{7}), Error);
  CHECK_THROWS_AS(g.RelationLabel(RelationId{3}), Error);
  CHECK_THROWS_AS(g.Neighbors(EntityId{9}, Direction::kBoth), Error);
}

TEST_CASE("save and load round-trip ids, triples and aliases") {
  KnowledgeGraph g = LoadDeskKg();
  g.AddEntity("isolated entity");
  auto dir = std::filesystem::temp_directory_path() / "kgrag_store_test";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "desk.kg").string();
  g.Save(path);
  KnowledgeGraph back = KnowledgeGraph::Load(path);
  CHECK(back.Stats() == g.Stats());
  REQUIRE(back.num_entities() == g.num_entities());
  for (std::size_t e = 0; e < g.num_entities(); ++e) {
    CHECK(back.EntityLabel(EntityId{e}) == g.EntityLabel(EntityId{e}));
  }
  CHECK(std::equal(g.triples().begin(), g.triples().end(),
                   back.triples().begin(), back.triples().end()));
  CHECK(back.aliases() == g.aliases());
  std::filesystem::remove_all(dir);
}

TEST_CASE("loading a missing store fails cleanly") {
  CHECK_THROWS_AS(KnowledgeGraph::Load("/nonexistent/path/store.kg"), Error);
}

}  // namespace
}  // namespace kgrag
