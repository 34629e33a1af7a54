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
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/kg_store.h"

namespace kgrag {

enum class QuestionType { kDirect, kMultihop, kComparative };

const char* QuestionTypeName(QuestionType type);
QuestionType ParseQuestionType(std::string_view text);

struct QaExample {
  std::string id;
  std::string question;
  QuestionType qtype = QuestionType::kDirect;
  std::set<std::string> gold_entities;  // normalized labels
};

struct PredictionScore {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  bool exact_match = false;

  bool operator==(const PredictionScore&) const = default;
};

// Set overlap of normalized labels.
PredictionScore ScorePrediction(const std::set<std::string>& predicted,
                                const std::set<std::string>& gold);

struct MetricValues {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t questions = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  bool operator==(const MetricValues&) const = default;
};

struct MetricsReport {
  MetricValues overall;
  // Only types present in the input appear.
  std::map<QuestionType, MetricValues> per_type;

  bool operator==(const MetricsReport&) const = default;
};

struct ScoredQuestion {
  QuestionType qtype;
  PredictionScore score;
};

// Micro-averaged precision/recall/F1 over pooled counts; accuracy is the
// exact-match rate. Throws ErrorCode::kEvaluation on empty input.
MetricsReport ComputeMetrics(std::span<const ScoredQuestion> questions);

// JSON lines: {"id","question","type","gold":[...]}. When `store` is given,
// every gold label must name one of its entities.
std::vector<QaExample> ReadQaDataset(std::istream& in,
                                     const KnowledgeGraph* store = nullptr);
std::vector<QaExample> ReadQaDataset(const std::string& path,
                                     const KnowledgeGraph* store = nullptr);
void WriteQaDataset(std::ostream& out, std::span<const QaExample> examples);

std::string MetricsReportToJson(const MetricsReport& report,
                                std::string_view method = {});
// Columns: method,qtype,questions,accuracy,precision,recall,f1. One row for
// "all" plus one per present question type.
void WriteMetricsCsv(std::ostream& out, std::string_view method,
                     const MetricsReport& report, bool header = true);

}  // namespace kgrag
