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

// Command-line front end: offline artifacts (kg, embed, gcn) and online
// querying/evaluation (query, eval).

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "kgrag/error.h"
#include "kgrag/evaluation.h"
#include "kgrag/gcn.h"
#include "kgrag/kernels.h"
#include "kgrag/kg_store.h"
#include "kgrag/pipeline.h"
#include "kgrag/transe.h"

namespace {

using nlohmann::json;
using namespace kgrag;

json StatsToJson(const KnowledgeGraph& store) {
  GraphStats stats = store.Stats();
  json histogram = json::object();
  for (const auto& [rel, count] : stats.degree_histogram) {
    histogram[store.RelationLabel(RelationId{rel})] = count;
  }
  return {{"entities", stats.num_entities},
          {"relations", stats.num_relations},
          {"triples", stats.num_triples},
          {"relation_counts", histogram}};
}

json TripleToJson(const KnowledgeGraph& store, const Triple& t) {
  return json::array({store.EntityLabel(t.head), store.RelationLabel(t.relation),
                      store.EntityLabel(t.tail)});
}

std::vector<Triple> ReadTestTriples(const std::string& path,
                                    const KnowledgeGraph& store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  KnowledgeGraph scratch;
  scratch.Ingest(in);
  std::vector<Triple> triples;
  for (const Triple& t : scratch.triples()) {
    auto h = store.FindEntity(scratch.EntityLabel(t.head));
    auto r = store.FindRelation(scratch.RelationLabel(t.relation));
    auto tail = store.FindEntity(scratch.EntityLabel(t.tail));
    if (!h || !r || !tail) {
      throw Error(ErrorCode::kLookup, "test triple (" +
                                          scratch.EntityLabel(t.head) + ", " +
                                          scratch.RelationLabel(t.relation) +
                                          ", " + scratch.EntityLabel(t.tail) +
                                          ") uses labels unknown to the store");
    }
    triples.push_back({*h, *r, *tail});
  }
  return triples;
}

KnowledgeResources LoadResources(const std::string& store_path,
                                 const std::string& vectors_path,
                                 const std::string& gcn_path) {
  KnowledgeResources res;
  res.store = KnowledgeGraph::Load(store_path);
  res.table = LoadEmbeddings(vectors_path);
  res.refined = LoadRepresentations(gcn_path);
  if (res.table.entity_vectors.rows() != res.store.num_entities() ||
      res.table.relation_vectors.rows() != res.store.num_relations() ||
      res.refined.features.rows() != res.store.num_entities()) {
    throw Error(ErrorCode::kContract,
                "vector files do not match the store vocabulary");
  }
  return res;
}

struct RetrievalOptions {
  RetrievalConfig config;
  std::string backend = "template";
  double timeout_secs = 30.0;
  int max_tokens = 256;

  void Register(CLI::App* cmd) {
    cmd->add_option("--hops", config.hop_limit, "Subgraph hop limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--budget", config.budget, "Maximum subgraph triples");
    cmd->add_option("--top-k", config.top_k, "Evidence lines kept");
    cmd->add_option("--alpha", config.weights.hop_penalty, "Hop penalty");
    cmd->add_option("--beta", config.weights.plausibility_weight,
                    "TransE distance weight");
    cmd->add_option("--backend", backend, "template or http")
        ->check(CLI::IsMember({"template", "http"}));
    cmd->add_option("--gen-timeout-secs", timeout_secs,
                    "HTTP generator timeout")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-tokens", max_tokens, "Generator max_tokens");
  }

  GeneratorConfig Generator() const {
    GeneratorConfig g;
    if (const char* url = std::getenv("GENERATOR_URL")) g.url = url;
    g.timeout_secs = timeout_secs;
    g.max_tokens = max_tokens;
    return g;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph augmented question answering"};
  app.require_subcommand(1);
  std::string kernel_isa;
  app.add_option("--kernels", kernel_isa,
                 "Force a kernel variant (scalar, avx2, neon)");

  // kg
  CLI::App* kg = app.add_subcommand("kg", "Triple store")->require_subcommand(1);
  std::string triples_path, aliases_path, store_out;
  CLI::App* kg_ingest = kg->add_subcommand("ingest", "Ingest a triple TSV");
  kg_ingest->add_option("--triples", triples_path)->required();
  kg_ingest->add_option("--aliases", aliases_path);
  kg_ingest->add_option("--out", store_out)->required();
  std::string store_path;
  CLI::App* kg_stats = kg->add_subcommand("stats", "Print store statistics");
  kg_stats->add_option("--store", store_path)->required();

  // embed
  CLI::App* embed =
      app.add_subcommand("embed", "TransE embeddings")->require_subcommand(1);
  TrainConfig train;
  std::size_t dim = 16;
  std::string norm = "l2", vectors_out;
  CLI::App* embed_train = embed->add_subcommand("train", "Train TransE");
  embed_train->add_option("--store", store_path)->required();
  embed_train->add_option("--dim", dim)->check(CLI::PositiveNumber);
  embed_train->add_option("--epochs", train.epochs);
  embed_train->add_option("--lr", train.learning_rate);
  embed_train->add_option("--margin", train.margin);
  embed_train->add_option("--norm", norm)
      ->check(CLI::IsMember({"l1", "l2", "L1", "L2"}));
  embed_train->add_option("--negatives", train.negatives_per_positive);
  embed_train->add_option("--batch-size", train.batch_size);
  embed_train->add_option("--seed", train.seed);
  embed_train->add_option("--out", vectors_out)->required();

  std::string vectors_path, test_path;
  CLI::App* embed_eval =
      embed->add_subcommand("eval", "Filtered link prediction");
  embed_eval->add_option("--store", store_path)->required();
  embed_eval->add_option("--vectors", vectors_path)->required();
  embed_eval->add_option("--test", test_path)->required();

  // gcn
  CLI::App* gcn =
      app.add_subcommand("gcn", "GCN refinement")->require_subcommand(1);
  std::size_t layers = 2, fine_tune_epochs = 20;
  bool fine_tune = false;
  std::uint64_t seed = 7;
  std::string gcn_out;
  CLI::App* gcn_refine = gcn->add_subcommand("refine", "Refine embeddings");
  gcn_refine->add_option("--store", store_path)->required();
  gcn_refine->add_option("--vectors", vectors_path)->required();
  gcn_refine->add_option("--layers", layers)->check(CLI::PositiveNumber);
  gcn_refine->add_flag("--fine-tune", fine_tune);
  gcn_refine->add_option("--epochs", fine_tune_epochs, "Fine-tune epochs");
  gcn_refine->add_option("--seed", seed);
  gcn_refine->add_option("--out", gcn_out)->required();

  // query
  CLI::App* query =
      app.add_subcommand("query", "Answer questions")->require_subcommand(1);
  std::string gcn_path, question;
  RetrievalOptions query_opts;
  CLI::App* query_ask = query->add_subcommand("ask", "Answer one question");
  query_ask->add_option("--store", store_path)->required();
  query_ask->add_option("--vectors", vectors_path)->required();
  query_ask->add_option("--gcn", gcn_path)->required();
  query_ask->add_option("--question", question)->required();
  query_opts.Register(query_ask);

  // eval
  CLI::App* eval =
      app.add_subcommand("eval", "Evaluate on a QA set")->require_subcommand(1);
  std::string dataset_path, csv_path, method;
  RetrievalOptions eval_opts;
  CLI::App* eval_run = eval->add_subcommand("run", "Score a JSONL dataset");
  eval_run->add_option("--store", store_path)->required();
  eval_run->add_option("--vectors", vectors_path)->required();
  eval_run->add_option("--gcn", gcn_path)->required();
  eval_run->add_option("--dataset", dataset_path)->required();
  eval_run->add_option("--report-csv", csv_path);
  eval_run->add_option("--method", method, "Label for the report");
  eval_opts.Register(eval_run);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernel_isa.empty()) {
      kernels::Select(kernels::ParseIsa(kernel_isa.c_str()));
    }

    if (*kg_ingest) {
      std::ifstream triples(triples_path);
      if (!triples) throw Error(ErrorCode::kIo, "cannot open " + triples_path);
      std::ifstream aliases;
      if (!aliases_path.empty()) {
        aliases.open(aliases_path);
        if (!aliases) throw Error(ErrorCode::kIo, "cannot open " + aliases_path);
      }
      KnowledgeGraph store;
      store.Ingest(triples, aliases_path.empty() ? nullptr : &aliases);
      store.Save(store_out);
      std::cout << StatsToJson(store).dump(2) << '\n';
    } else if (*kg_stats) {
      std::cout << StatsToJson(KnowledgeGraph::Load(store_path)).dump(2)
                << '\n';
    } else if (*embed_train) {
      train.norm = ParseNorm(norm);
      KnowledgeGraph store = KnowledgeGraph::Load(store_path);
      TrainResult result = Train(store, dim, train);
      SaveEmbeddings(vectors_out, result.table);
      json epochs = json::array();
      for (const EpochStats& e : result.epochs) {
        epochs.push_back({{"epoch", e.epoch_index},
                          {"mean_loss", e.mean_loss},
                          {"active_margin_fraction", e.active_margin_fraction}});
      }
      json summary = {{"kernels", kernels::Active().name},
                      {"first_epoch", epochs.empty() ? json() : epochs.front()},
                      {"last_epoch", epochs.empty() ? json() : epochs.back()}};
      std::cout << summary.dump(2) << '\n';
    } else if (*embed_eval) {
      KnowledgeGraph store = KnowledgeGraph::Load(store_path);
      EmbeddingTable table = LoadEmbeddings(vectors_path);
      std::vector<Triple> test = ReadTestTriples(test_path, store);
      LinkPredictionReport report =
          EvaluateLinkPrediction(table, test, store, table.norm);
      json hits = json::object();
      for (const auto& [k, v] : report.hits_at) hits[std::to_string(k)] = v;
      std::cout << json{{"mrr", report.mrr},
                        {"hits_at", hits},
                        {"queries", report.num_queries}}
                       .dump(2)
                << '\n';
    } else if (*gcn_refine) {
      KnowledgeGraph store = KnowledgeGraph::Load(store_path);
      EmbeddingTable table = LoadEmbeddings(vectors_path);
      std::optional<TrainConfig> tune;
      if (fine_tune) {
        tune = TrainConfig{};
        tune->norm = table.norm;
        tune->epochs = fine_tune_epochs;
        tune->seed = seed;
      }
      RefineResult result = RefineEmbeddings(
          table, store, DefaultGcnLayers(table.dim, layers, seed), tune);
      SaveRepresentations(gcn_out, result.representations);
      json summary = {{"layers", result.representations.layer_index},
                      {"nodes", result.representations.features.rows()},
                      {"dim", result.representations.dim()}};
      if (!result.fine_tune_epochs.empty()) {
        summary["fine_tune_first_loss"] = result.fine_tune_epochs.front().mean_loss;
        summary["fine_tune_last_loss"] = result.fine_tune_epochs.back().mean_loss;
      }
      std::cout << summary.dump(2) << '\n';
    } else if (*query_ask) {
      KnowledgeResources res = LoadResources(store_path, vectors_path, gcn_path);
      Pipeline pipeline(res, query_opts.config, ParseBackend(query_opts.backend),
                        query_opts.Generator());
      PipelineResult result = pipeline.Run(question);
      json entities = json::array(), support = json::array(),
           ranked = json::array(), timings = json::object();
      for (EntityId e : result.answer.answer_entities) {
        entities.push_back(res.store.EntityLabel(e));
      }
      for (const Triple& t : result.answer.supporting_triples) {
        support.push_back(TripleToJson(res.store, t));
      }
      for (const ScoredTriple& st : result.evidence.ranked_triples) {
        ranked.push_back({{"triple", TripleToJson(res.store, st.triple)},
                          {"score", st.score}});
      }
      for (const StageTiming& t : result.timings) timings[t.stage] = t.seconds;
      json out = {{"question", question},
                  {"answer", result.answer.text},
                  {"answer_entities", entities},
                  {"supporting_triples", support},
                  {"abstained", result.answer.abstained},
                  {"evidence", result.evidence.context_text},
                  {"ranked_triples", ranked},
                  {"fused_vector", result.evidence.fused_vector},
                  {"timings_secs", timings}};
      if (!result.abstention_reason.empty()) {
        out["abstention_reason"] = result.abstention_reason;
      }
      std::cout << out.dump(2) << '\n';
    } else if (*eval_run) {
      KnowledgeResources res = LoadResources(store_path, vectors_path, gcn_path);
      std::vector<QaExample> examples = ReadQaDataset(dataset_path, &res.store);
      Pipeline pipeline(res, eval_opts.config, ParseBackend(eval_opts.backend),
                        eval_opts.Generator());
      DatasetEvaluation result = EvaluateDataset(pipeline, res.store, examples);
      if (method.empty()) method = "graphrag-" + eval_opts.backend;
      std::cout << MetricsReportToJson(result.report, method) << '\n';
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw Error(ErrorCode::kIo, "cannot write " + csv_path);
        WriteMetricsCsv(csv, method, result.report);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what()
              << '\n';
    return 1;
  }
  return 0;
}
