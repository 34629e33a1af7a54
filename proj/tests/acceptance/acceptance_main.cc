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

// Acceptance suite: one check per criterion, each printed as a single
// PASS/FAIL line with its measured values and wall time. Exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgrag/gcn.h"
#include "kgrag/generation.h"
#include "kgrag/pipeline.h"
#include "kgrag/random.h"
#include "kgrag/retrieval.h"
#include "kgrag/transe.h"
#include "support/oracles.h"
#include "support/synthetic.h"

namespace kgrag::testing {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::vector<double> RandomVector(Rng& rng, std::size_t dim, double lo,
                                 double hi) {
  std::vector<double> v(dim);
  for (double& x : v) x = UniformReal(rng, lo, hi);
  return v;
}

// ---------------------------------------------------------------------------
// 1. Margin-loss gradient against central finite differences.

Outcome GradientCheck() {
  constexpr double kStep = 1e-5;
  constexpr double kTolerance = 1e-4;
  constexpr std::size_t kDim = 8;
  Rng rng(20240101);
  double worst = 0.0;
  std::size_t configs = 0;
  for (bool l1 : {false, true}) {
    std::size_t done = 0;
    while (done < 20) {
      auto h = RandomVector(rng, kDim, -1, 1);
      auto r = RandomVector(rng, kDim, -1, 1);
      auto t = RandomVector(rng, kDim, -1, 1);
      auto nh = RandomVector(rng, kDim, -1, 1);
      auto nt = RandomVector(rng, kDim, -1, 1);
      // Stay clear of the non-differentiable points: |x_i| kinks for L1 and
      // d = 0 for L2.
      bool near_kink = false;
      for (std::size_t i = 0; i < kDim; ++i) {
        double p = h[i] + r[i] - t[i], n = nh[i] + r[i] - nt[i];
        if (l1 && (std::fabs(p) < 1e-2 || std::fabs(n) < 1e-2)) near_kink = true;
      }
      double dp = OracleDistance(h, r, t, l1), dn = OracleDistance(nh, r, nt, l1);
      if (near_kink || dp < 0.1 || dn < 0.1) continue;
      // Margin puts the hinge well inside its active region.
      double margin = dn - dp + UniformReal(rng, 0.5, 1.5);
      Norm norm = l1 ? Norm::kL1 : Norm::kL2;
      PairGradient g = LossGradient(h, r, t, nh, nt, margin, norm);

      std::vector<std::vector<double>*> params = {&h, &r, &t, &nh, &nt};
      const std::vector<double>* analytic[] = {&g.head, &g.relation, &g.tail,
                                               &g.negative_head,
                                               &g.negative_tail};
      for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t i = 0; i < kDim; ++i) {
          double keep = (*params[p])[i];
          (*params[p])[i] = keep + kStep;
          double up = OracleMarginLoss(h, r, t, nh, nt, margin, l1);
          (*params[p])[i] = keep - kStep;
          double down = OracleMarginLoss(h, r, t, nh, nt, margin, l1);
          (*params[p])[i] = keep;
          double numeric = (up - down) / (2 * kStep);
          double a = (*analytic[p])[i];
          double scale = std::max(std::fabs(a), std::fabs(numeric));
          // Components that vanish analytically (e.g. opposite-sign L1
          // relation terms) are compared absolutely.
          double err = scale < 1e-7 ? std::fabs(a - numeric)
                                    : std::fabs(a - numeric) / scale;
          worst = std::max(worst, err);
        }
      }
      ++done;
      ++configs;
    }
  }
  return {worst <= kTolerance,
          Fmt("%.0f configurations, max relative error %.2e (tol 1e-4)",
              static_cast<double>(configs), worst)};
}

// ---------------------------------------------------------------------------
// 2. TransE learns a compositional graph.

struct LinkPredictionRun {
  LinkPredictionReport trained;
  LinkPredictionReport untrained;
  EmbeddingTable table;
};

LinkPredictionRun RunLinkPrediction() {
  LinkPredictionFixture fx = MakeCompositionalGraph(42);
  TrainConfig config;
  config.margin = 1.0;
  config.learning_rate = 0.01;
  config.epochs = 100;
  config.seed = 42;
  LinkPredictionRun run;
  run.table = Train(fx.train, 16, config).table;
  run.trained = EvaluateLinkPrediction(run.table, fx.test, fx.train, config.norm);
  TrainConfig untrained = config;
  untrained.epochs = 0;
  run.untrained = EvaluateLinkPrediction(Train(fx.train, 16, untrained).table,
                                         fx.test, fx.train, config.norm);
  return run;
}

Outcome TranseLearning(LinkPredictionRun* keep) {
  LinkPredictionRun run = RunLinkPrediction();
  double hits10 = run.trained.hits_at.at(10);
  bool pass = hits10 >= 0.8 && run.trained.mrr > run.untrained.mrr;
  Outcome out{pass, Fmt("Hits@10 %.3f (need >= 0.8), MRR %.3f vs untrained "
                        "%.3f, %.0f test triples",
                        hits10, run.trained.mrr, run.untrained.mrr,
                        static_cast<double>(run.trained.num_queries))};
  *keep = std::move(run);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Sparse GCN propagation against the dense normalized-adjacency oracle.

Outcome GcnOracle() {
  Rng rng(3003);
  double worst = 0.0;
  for (std::size_t g = 0; g < 20; ++g) {
    std::size_t nodes = 1 + UniformIndex(rng, 50);
    std::size_t triples = UniformIndex(rng, 3 * nodes + 1);
    KnowledgeGraph store = MakeRandomGraph(rng(), nodes, triples, 3);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const Triple& t : store.triples()) {
      if (t.head != t.tail) edges.emplace_back(t.head.index(), t.tail.index());
    }
    NormalizedAdjacency adj = BuildNormalizedAdjacency(store);
    std::size_t d_in = 1 + UniformIndex(rng, 8), d_mid = 1 + UniformIndex(rng, 8),
                d_out = 1 + UniformIndex(rng, 8);
    auto random_matrix = [&](std::size_t r, std::size_t c) {
      Matrix m(r, c);
      for (double& v : m.data()) v = UniformReal(rng, -1, 1);
      return m;
    };
    NodeRepresentations h{random_matrix(nodes, d_in), 0};
    GcnLayerWeights l1{random_matrix(d_in, d_mid), Activation::kRelu};
    GcnLayerWeights l2{random_matrix(d_mid, d_out), Activation::kIdentity};

    NodeRepresentations one = GcnLayerForward(h, adj, l1);
    NodeRepresentations two = GcnLayerForward(one, adj, l2);
    Matrix want_one = OracleGcnLayer(nodes, edges, h.features, l1.weights, true);
    Matrix want_two =
        OracleGcnLayer(nodes, edges, want_one, l2.weights, false);
    for (std::size_t i = 0; i < want_one.data().size(); ++i) {
      worst = std::max(worst,
                       std::fabs(one.features.data()[i] - want_one.data()[i]));
    }
    for (std::size_t i = 0; i < want_two.data().size(); ++i) {
      worst = std::max(worst,
                       std::fabs(two.features.data()[i] - want_two.data()[i]));
    }
  }
  return {worst <= 1e-6,
          Fmt("20 graphs, one and two layers, max abs error %.2e (tol 1e-6)",
              worst)};
}

// ---------------------------------------------------------------------------
// 4. Attention invariants.

Outcome AttentionInvariants() {
  Rng rng(4004);
  double row_sum_err = 0.0, perm_err = 0.0, bound_violation = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t nq = 1 + UniformIndex(rng, 6), nk = 1 + UniformIndex(rng, 8),
                dk = 1 + UniformIndex(rng, 8), dv = 1 + UniformIndex(rng, 6);
    double spread = UniformReal(rng, 0.1, 10.0);
    auto random_matrix = [&](std::size_t r, std::size_t c) {
      Matrix m(r, c);
      for (double& v : m.data()) v = UniformReal(rng, -spread, spread);
      return m;
    };
    Matrix q = random_matrix(nq, dk), k = random_matrix(nk, dk),
           v = random_matrix(nk, dv);
    Matrix w = AttentionWeights(q, k);
    for (std::size_t i = 0; i < nq; ++i) {
      double s = 0.0;
      for (double x : w.row(i)) s += x;
      row_sum_err = std::max(row_sum_err, std::fabs(s - 1.0));
    }
    Matrix out = ScaledDotProductAttention(q, k, v);

    std::vector<std::size_t> perm(nk);
    std::iota(perm.begin(), perm.end(), 0);
    Shuffle(std::span<std::size_t>(perm), rng);
    Matrix pk(nk, dk), pv(nk, dv);
    for (std::size_t j = 0; j < nk; ++j) {
      std::copy_n(k.row(perm[j]).begin(), dk, pk.row(j).begin());
      std::copy_n(v.row(perm[j]).begin(), dv, pv.row(j).begin());
    }
    Matrix pout = ScaledDotProductAttention(q, pk, pv);
    for (std::size_t i = 0; i < out.data().size(); ++i) {
      perm_err = std::max(perm_err, std::fabs(out.data()[i] - pout.data()[i]));
    }
    for (std::size_t c = 0; c < dv; ++c) {
      double lo = v(0, c), hi = v(0, c);
      for (std::size_t j = 1; j < nk; ++j) {
        lo = std::min(lo, v(j, c));
        hi = std::max(hi, v(j, c));
      }
      for (std::size_t i = 0; i < nq; ++i) {
        double x = out(i, c);
        bound_violation = std::max({bound_violation, lo - x - 1e-12,
                                    x - hi - 1e-12});
      }
    }
  }
  bool pass = row_sum_err <= 1e-6 && perm_err <= 1e-9 && bound_violation <= 0;
  return {pass, Fmt("100 instances, row-sum err %.1e, permutation err %.1e, "
                    "bound violation %.1e",
                    row_sum_err, perm_err, std::max(0.0, bound_violation))};
}

// ---------------------------------------------------------------------------
// 5. Retrieval soundness.

Outcome RetrievalSoundness() {
  Rng rng(5005);
  std::size_t graphs = 0, mismatches = 0;
  for (std::size_t nodes = 1; nodes <= 30; ++nodes) {
    for (int variant = 0; variant < 4; ++variant) {
      std::size_t triples = UniformIndex(rng, 2 * nodes + 1);
      KnowledgeGraph store = MakeRandomGraph(rng(), nodes, triples, 2);
      std::vector<EntityId> seeds;
      std::size_t num_seeds = 1 + UniformIndex(rng, std::min<std::size_t>(3, nodes));
      for (std::size_t s = 0; s < num_seeds; ++s) {
        seeds.push_back(EntityId{UniformIndex(rng, nodes)});
      }
      for (std::size_t hops = 1; hops <= 4; ++hops) {
        Subgraph sub = ExtractSubgraph(seeds, store, hops, 1u << 20);
        std::vector<OracleHopTriple> got;
        for (const HopTriple& ht : sub.triples) got.push_back({ht.hop, ht.triple});
        if (got != OracleSubgraph(store, seeds, hops)) ++mismatches;
        ++graphs;
      }
    }
  }

  // Randomized end-to-end queries: evidence must be drawn from the store.
  KnowledgeGraph store = MakeRandomGraph(77, 30, 80, 4);
  PipelineConfig config;
  config.embed.epochs = 5;
  KnowledgeResources res = BuildResources(store, config);
  std::size_t queries = 0, foreign = 0, triples_seen = 0;
  for (int q = 0; q < 1000; ++q) {
    RetrievalConfig rc;
    rc.hop_limit = 1 + UniformIndex(rng, 3);
    rc.budget = UniformIndex(rng, 40);
    rc.top_k = UniformIndex(rng, 15);
    Pipeline pipeline(res, rc, Backend::kTemplate);
    std::string question = "what about";
    std::size_t mentions = 1 + UniformIndex(rng, 3);
    for (std::size_t m = 0; m < mentions; ++m) {
      question += " n" + std::to_string(UniformIndex(rng, 30)) + " and";
    }
    question += " things?";
    PipelineResult result = pipeline.Run(question);
    ++queries;
    for (const ScoredTriple& st : result.evidence.ranked_triples) {
      ++triples_seen;
      if (!res.store.Contains(st.triple)) ++foreign;
    }
    for (const Triple& t : result.answer.supporting_triples) {
      if (!res.store.Contains(t)) ++foreign;
    }
  }
  bool pass = mismatches == 0 && foreign == 0;
  return {pass, Fmt("%.0f subgraph/oracle comparisons, %.0f mismatches; ",
                    static_cast<double>(graphs),
                    static_cast<double>(mismatches)) +
                    Fmt("%.0f queries, %.0f evidence triples, %.0f not in store",
                        static_cast<double>(queries),
                        static_cast<double>(triples_seen),
                        static_cast<double>(foreign))};
}

// ---------------------------------------------------------------------------
// 6. Worked example on the desk graph.

Outcome WorkedExample() {
  PipelineConfig config;
  KnowledgeResources res = BuildResources(LoadDeskKg(), config);
  Pipeline pipeline(res, config.retrieval, Backend::kTemplate);
  PipelineResult result = pipeline.Run("How to prevent tobacco mosaic disease?");

  const std::string source_line =
      "- tobacco mosaic disease | treated by | spraying antiviral agents";
  const std::string& ctx = result.evidence.context_text;
  bool header = ctx.rfind("EVIDENCE:\n", 0) == 0;
  bool has_source = false, lines_ok = true;
  std::istringstream lines(ctx);
  std::string line;
  std::getline(lines, line);
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    ++count;
    if (line == source_line) has_source = true;
    // `- h | r | t`, exactly two separators.
    std::size_t bars = 0;
    for (std::size_t p = line.find(" | "); p != std::string::npos;
         p = line.find(" | ", p + 3)) {
      ++bars;
    }
    if (line.rfind("- ", 0) != 0 || bars != 2) lines_ok = false;
  }
  bool no_trailing_newline = !ctx.empty() && ctx.back() != '\n';
  bool answered =
      result.answer.text.find("spraying antiviral agents") != std::string::npos;
  bool pass = header && has_source && lines_ok && no_trailing_newline &&
              count == result.evidence.ranked_triples.size() && answered;
  return {pass, "context " + std::to_string(count) + " lines, source triple " +
                    (has_source ? "present" : "MISSING") + ", answer \"" +
                    result.answer.text + "\""};
}

// ---------------------------------------------------------------------------
// 7. Baseline ordering on the synthetic QA benchmark.

struct OrderingRun {
  MetricsReport none, flat, full;
};

OrderingRun RunOrdering() {
  QaBenchmark bench = MakePestQaBenchmark(7);
  PipelineConfig config;
  config.seed = 7;
  KnowledgeResources res = BuildResources(bench.store, config);

  RetrievalConfig no_evidence;
  no_evidence.use_evidence = false;
  RetrievalConfig flat;
  flat.hop_limit = 1;
  flat.weights = {1.0, 0.0, 0.0};
  RetrievalConfig full;  // 2 hops, TransE plausibility and GCN similarity

  OrderingRun run;
  auto evaluate = [&](const RetrievalConfig& rc) {
    Pipeline pipeline(res, rc, Backend::kTemplate);
    return EvaluateDataset(pipeline, res.store, bench.examples).report;
  };
  run.none = evaluate(no_evidence);
  run.flat = evaluate(flat);
  run.full = evaluate(full);
  return run;
}

Outcome BaselineOrdering(OrderingRun* keep) {
  OrderingRun run = RunOrdering();
  double a = run.none.overall.accuracy, b = run.flat.overall.accuracy,
         c = run.full.overall.accuracy;
  std::map<QuestionType, double> gap;
  for (const auto& [type, m] : run.full.per_type) {
    gap[type] = m.accuracy - run.flat.per_type.at(type).accuracy;
  }
  double multihop_gap = gap.at(QuestionType::kMultihop);
  bool multihop_largest = std::all_of(gap.begin(), gap.end(), [&](auto& kv) {
    return kv.first == QuestionType::kMultihop || kv.second < multihop_gap;
  });
  bool pass = a < b && b < c && c - a >= 0.20 && multihop_largest;
  std::string detail =
      Fmt("accuracy none %.3f < flat %.3f < full %.3f; ", a, b, c) +
      Fmt("full-flat gap direct %.3f, multihop %.3f, comparative %.3f",
          gap[QuestionType::kDirect], gap[QuestionType::kMultihop],
          gap[QuestionType::kComparative]);
  *keep = std::move(run);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 8. Determinism of criteria 2 and 7.

Outcome Determinism(const LinkPredictionRun& first_lp,
                    const OrderingRun& first_qa) {
  LinkPredictionRun lp = RunLinkPrediction();
  OrderingRun qa = RunOrdering();
  bool lp_same = lp.trained == first_lp.trained &&
                 lp.untrained == first_lp.untrained &&
                 lp.table == first_lp.table;
  bool qa_same = qa.none == first_qa.none && qa.flat == first_qa.flat &&
                 qa.full == first_qa.full &&
                 MetricsReportToJson(qa.full) == MetricsReportToJson(first_qa.full);
  return {lp_same && qa_same,
          std::string("link prediction ") + (lp_same ? "identical" : "DIFFERS") +
              ", QA reports " + (qa_same ? "identical" : "DIFFER")};
}

int RunAll() {
  struct Criterion {
    int id;
    const char* name;
    double limit_secs;
    std::function<Outcome()> run;
  };
  LinkPredictionRun lp;
  OrderingRun qa;
  std::vector<Criterion> criteria = {
      {1, "gradient matches finite differences", 1.0, GradientCheck},
      {2, "TransE link prediction", 30.0, [&] { return TranseLearning(&lp); }},
      {3, "GCN equals dense oracle", 5.0, GcnOracle},
      {4, "attention invariants", 1.0, AttentionInvariants},
      {5, "retrieval soundness", 10.0, RetrievalSoundness},
      {6, "worked example", 0.0, WorkedExample},
      {7, "baseline ordering", 120.0, [&] { return BaselineOrdering(&qa); }},
      {8, "determinism", 0.0, [&] { return Determinism(lp, qa); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    bool in_time = c.limit_secs <= 0.0 || secs < c.limit_secs;
    bool pass = out.pass && in_time;
    std::string timing = Fmt("%.2fs", secs);
    if (c.limit_secs > 0.0) timing += Fmt(" of %.0fs", c.limit_secs);
    std::printf("%s criterion %d: %s -- %s [%s]\n", pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace kgrag::testing

int main() { return kgrag::testing::RunAll(); }
