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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/evaluation.h"
#include "kgrag/gcn.h"
#include "kgrag/generation.h"
#include "kgrag/kg_store.h"
#include "kgrag/retrieval.h"
#include "kgrag/transe.h"

namespace kgrag {

struct RetrievalConfig {
  std::size_t hop_limit = 2;
  std::size_t budget = 64;
  std::size_t top_k = 12;
  RankingWeights weights;
  // When false the generator sees an empty evidence bundle.
  bool use_evidence = true;
};

struct PipelineConfig {
  std::string kg_path;
  std::optional<std::string> alias_path;
  std::size_t dim = 16;
  TrainConfig embed;
  std::size_t gcn_layers = 2;
  bool gcn_fine_tune = false;
  std::size_t gcn_fine_tune_epochs = 20;
  RetrievalConfig retrieval;
  Backend backend = Backend::kTemplate;
  GeneratorConfig generator;
  std::size_t max_answer_entities = 8;
  std::uint64_t seed = 7;
};

// Store plus trained representations, everything a query needs.
struct KnowledgeResources {
  KnowledgeGraph store;
  EmbeddingTable table;
  NodeRepresentations refined;
};

// Ingests config.kg_path, trains TransE and refines with the GCN. The seed
// in `config.seed` overrides the one in config.embed.
KnowledgeResources BuildResources(const PipelineConfig& config);
KnowledgeResources BuildResources(KnowledgeGraph store,
                                  const PipelineConfig& config);

inline constexpr std::string_view kStageNames[] = {"link", "extract", "rank",
                                                   "context", "generate"};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  Answer answer;
  EvidenceBundle evidence;
  std::vector<EntityMention> mentions;
  // One entry per stage in kStageNames order; skipped stages report 0.
  std::vector<StageTiming> timings;
  // "no-entity" when nothing linked, "no-evidence" when the generator
  // abstained; empty otherwise.
  std::string abstention_reason;
};

// link -> extract -> rank -> context -> generate over shared, read-only
// resources. Safe to call concurrently for the template backend.
class Pipeline {
 public:
  Pipeline(const KnowledgeResources& resources, RetrievalConfig retrieval,
           Backend backend, GeneratorConfig generator = {},
           std::size_t max_answer_entities = 8);

  // Stage failures are rethrown as StageError carrying the stage name.
  PipelineResult Run(std::string_view question) const;

 private:
  const KnowledgeResources& resources_;
  EntityLinker linker_;
  RetrievalConfig retrieval_;
  Backend backend_;
  GeneratorConfig generator_;
  std::size_t max_answer_entities_;
};

PipelineResult RunPipeline(std::string_view question,
                           const PipelineConfig& config);

struct QuestionOutcome {
  std::string id;
  QuestionType qtype;
  std::set<std::string> predicted;
  PredictionScore score;
  std::string abstention_reason;
};

struct DatasetEvaluation {
  MetricsReport report;
  std::vector<QuestionOutcome> outcomes;
};

// Runs every question through the pipeline and scores the answer entity
// labels against the gold sets. Unlinked questions count as abstentions.
DatasetEvaluation EvaluateDataset(const Pipeline& pipeline,
                                  const KnowledgeGraph& store,
                                  std::span<const QaExample> examples);

}  // namespace kgrag
