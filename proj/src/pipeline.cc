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

#include "kgrag/pipeline.h"

#include <chrono>
#include <fstream>
#include <utility>

#include "kgrag/error.h"

namespace kgrag {
namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& timings) : timings_(timings) {
    for (std::string_view name : kStageNames) {
      timings_.push_back({std::string(name), 0.0});
    }
  }

  // Runs fn as stage `index`, recording its wall time and tagging errors.
  template <typename Fn>
  auto Run(std::size_t index, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    struct Record {
      StageTiming& timing;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        timing.seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      }
    } record{timings_[index], start};
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(timings_[index].stage, e.code(), e.what());
    }
  }

 private:
  std::vector<StageTiming>& timings_;
};

}  // namespace

KnowledgeResources BuildResources(KnowledgeGraph store,
                                  const PipelineConfig& config) {
  KnowledgeResources res;
  res.store = std::move(store);
  TrainConfig embed = config.embed;
  embed.seed = config.seed;
  res.table = Train(res.store, config.dim, embed).table;
  std::optional<TrainConfig> fine_tune;
  if (config.gcn_fine_tune) {
    fine_tune = embed;
    fine_tune->epochs = config.gcn_fine_tune_epochs;
  }
  res.refined =
      RefineEmbeddings(res.table, res.store,
                       DefaultGcnLayers(config.dim, config.gcn_layers,
                                        config.seed),
                       fine_tune)
          .representations;
  return res;
}

KnowledgeResources BuildResources(const PipelineConfig& config) {
  std::ifstream triples(config.kg_path);
  if (!triples) throw Error(ErrorCode::kIo, "cannot open " + config.kg_path);
  std::ifstream aliases;
  if (config.alias_path) {
    aliases.open(*config.alias_path);
    if (!aliases) throw Error(ErrorCode::kIo, "cannot open " + *config.alias_path);
  }
  KnowledgeGraph store;
  store.Ingest(triples, config.alias_path ? &aliases : nullptr);
  return BuildResources(std::move(store), config);
}

Pipeline::Pipeline(const KnowledgeResources& resources,
                   RetrievalConfig retrieval, Backend backend,
                   GeneratorConfig generator, std::size_t max_answer_entities)
    : resources_(resources),
      linker_(resources.store),
      retrieval_(retrieval),
      backend_(backend),
      generator_(std::move(generator)),
      max_answer_entities_(max_answer_entities) {}

PipelineResult Pipeline::Run(std::string_view question) const {
  const KnowledgeResources& res = resources_;
  PipelineResult result;
  StageClock clock(result.timings);

  result.mentions = clock.Run(0, [&] { return linker_.Link(question); });
  if (result.mentions.empty()) {
    result.answer.text = std::string(kAbstentionText);
    result.answer.abstained = true;
    result.abstention_reason = "no-entity";
    return result;
  }

  if (retrieval_.use_evidence) {
    Subgraph sub = clock.Run(1, [&] {
      std::vector<EntityId> seeds;
      for (const EntityMention& m : result.mentions) seeds.push_back(m.entity);
      return ExtractSubgraph(seeds, res.store, retrieval_.hop_limit,
                             retrieval_.budget);
    });
    std::vector<ScoredTriple> ranked = clock.Run(2, [&] {
      return RankEvidence(sub, res.store, res.table, res.refined,
                          res.table.norm, retrieval_.weights);
    });
    result.evidence = clock.Run(3, [&] {
      return BuildEvidenceContext(ranked, result.mentions, res.store,
                                  res.table, res.refined, retrieval_.top_k);
    });
  }

  result.answer = clock.Run(4, [&] {
    GenerationRequest request;
    request.question = std::string(question);
    request.evidence = result.evidence;
    request.backend = backend_;
    request.max_answer_entities = max_answer_entities_;
    return GenerateAnswer(request, res.store, &generator_);
  });
  if (result.answer.abstained) result.abstention_reason = "no-evidence";
  return result;
}

PipelineResult RunPipeline(std::string_view question,
                           const PipelineConfig& config) {
  KnowledgeResources res = BuildResources(config);
  Pipeline pipeline(res, config.retrieval, config.backend, config.generator,
                    config.max_answer_entities);
  return pipeline.Run(question);
}

DatasetEvaluation EvaluateDataset(const Pipeline& pipeline,
                                  const KnowledgeGraph& store,
                                  std::span<const QaExample> examples) {
  DatasetEvaluation eval;
  std::vector<ScoredQuestion> scored;
  for (const QaExample& ex : examples) {
    PipelineResult run = pipeline.Run(ex.question);
    QuestionOutcome outcome;
    outcome.id = ex.id;
    outcome.qtype = ex.qtype;
    outcome.abstention_reason = run.abstention_reason;
    for (EntityId e : run.answer.answer_entities) {
      outcome.predicted.insert(store.EntityLabel(e));
    }
    outcome.score = ScorePrediction(outcome.predicted, ex.gold_entities);
    scored.push_back({ex.qtype, outcome.score});
    eval.outcomes.push_back(std::move(outcome));
  }
  eval.report = ComputeMetrics(scored);
  return eval;
}

}  // namespace kgrag
