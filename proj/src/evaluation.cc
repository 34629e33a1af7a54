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

#include "kgrag/evaluation.h"

#include <fstream>
#include <json.hpp>

#include "kgrag/error.h"

namespace kgrag {
namespace {

using nlohmann::json;

struct Counts {
  std::size_t questions = 0, exact = 0, tp = 0, fp = 0, fn = 0;

  void Add(const PredictionScore& s) {
    ++questions;
    exact += s.exact_match ? 1 : 0;
    tp += s.true_positives;
    fp += s.false_positives;
    fn += s.false_negatives;
  }

  MetricValues Finish() const {
    MetricValues m;
    m.questions = questions;
    m.true_positives = tp;
    m.false_positives = fp;
    m.false_negatives = fn;
    auto ratio = [](std::size_t num, std::size_t den) {
      return den == 0 ? 0.0
                      : static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = ratio(exact, questions);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
  }
};

json ValuesToJson(const MetricValues& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"counts",
           {{"questions", m.questions},
            {"tp", m.true_positives},
            {"fp", m.false_positives},
            {"fn", m.false_negatives}}}};
}

void CsvRow(std::ostream& out, std::string_view method, std::string_view qtype,
            const MetricValues& m) {
  out << method << ',' << qtype << ',' << m.questions << ',' << m.accuracy
      << ',' << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
}

}  // namespace

const char* QuestionTypeName(QuestionType type) {
  switch (type) {
    case QuestionType::kDirect:
      return "direct";
    case QuestionType::kMultihop:
      return "multihop";
    case QuestionType::kComparative:
      return "comparative";
  }
  return "unknown";
}

QuestionType ParseQuestionType(std::string_view text) {
  if (text == "direct") return QuestionType::kDirect;
  if (text == "multihop") return QuestionType::kMultihop;
  if (text == "comparative") return QuestionType::kComparative;
  throw Error(ErrorCode::kConfig, "unknown question type '" +
                                      std::string(text) + "'");
}

PredictionScore ScorePrediction(const std::set<std::string>& predicted,
                                const std::set<std::string>& gold) {
  PredictionScore s;
  for (const std::string& p : predicted) {
    if (gold.contains(p)) {
      ++s.true_positives;
    } else {
      ++s.false_positives;
    }
  }
  s.false_negatives = gold.size() - s.true_positives;
  s.exact_match = predicted == gold;
  return s;
}

MetricsReport ComputeMetrics(std::span<const ScoredQuestion> questions) {
  if (questions.empty()) {
    throw Error(ErrorCode::kEvaluation, "no questions to score");
  }
  Counts overall;
  std::map<QuestionType, Counts> by_type;
  for (const ScoredQuestion& q : questions) {
    overall.Add(q.score);
    by_type[q.qtype].Add(q.score);
  }
  MetricsReport report;
  report.overall = overall.Finish();
  for (const auto& [type, counts] : by_type) {
    report.per_type[type] = counts.Finish();
  }
  return report;
}

std::vector<QaExample> ReadQaDataset(std::istream& in,
                                     const KnowledgeGraph* store) {
  std::vector<QaExample> examples;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (NormalizeLabel(line).empty()) continue;
    QaExample ex;
    try {
      json obj = json::parse(line);
      ex.id = obj.at("id").get<std::string>();
      ex.question = obj.at("question").get<std::string>();
      ex.qtype = ParseQuestionType(obj.at("type").get<std::string>());
      for (const json& g : obj.at("gold")) {
        ex.gold_entities.insert(NormalizeLabel(g.get<std::string>()));
      }
    } catch (const json::exception& e) {
      throw IngestError(line_number, std::string("bad QA record: ") + e.what());
    } catch (const Error& e) {
      throw IngestError(line_number, e.what());
    }
    if (ex.question.empty() || ex.gold_entities.empty()) {
      throw IngestError(line_number, "question and gold must be non-empty");
    }
    if (store != nullptr) {
      for (const std::string& g : ex.gold_entities) {
        if (!store->FindEntity(g)) {
          throw IngestError(line_number,
                            "gold label '" + g + "' is not a known entity");
        }
      }
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<QaExample> ReadQaDataset(const std::string& path,
                                     const KnowledgeGraph* store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadQaDataset(in, store);
}

void WriteQaDataset(std::ostream& out, std::span<const QaExample> examples) {
  for (const QaExample& ex : examples) {
    json obj = {{"id", ex.id},
                {"question", ex.question},
                {"type", QuestionTypeName(ex.qtype)},
                {"gold", ex.gold_entities}};
    out << obj.dump() << '\n';
  }
}

std::string MetricsReportToJson(const MetricsReport& report,
                                std::string_view method) {
  json doc = ValuesToJson(report.overall);
  if (!method.empty()) doc["method"] = std::string(method);
  json per_type = json::object();
  for (const auto& [type, values] : report.per_type) {
    per_type[QuestionTypeName(type)] = ValuesToJson(values);
  }
  doc["per_type"] = per_type;
  return doc.dump(2);
}

void WriteMetricsCsv(std::ostream& out, std::string_view method,
                     const MetricsReport& report, bool header) {
  if (header) out << "method,qtype,questions,accuracy,precision,recall,f1\n";
  CsvRow(out, method, "all", report.overall);
  for (const auto& [type, values] : report.per_type) {
    CsvRow(out, method, QuestionTypeName(type), values);
  }
}

}  // namespace kgrag
