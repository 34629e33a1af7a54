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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/kg_store.h"
#include "kgrag/matrix.h"
#include "kgrag/retrieval.h"

namespace kgrag {

// softmax(Q K^T / sqrt(d_k)), row-wise, computed with max subtraction.
Matrix AttentionWeights(const Matrix& q, const Matrix& k);
// AttentionWeights(q, k) * v
Matrix ScaledDotProductAttention(const Matrix& q, const Matrix& k,
                                 const Matrix& v);

// Returns the next-token distribution given a prefix of token ids.
using NextTokenModel =
    std::function<std::vector<double>(std::span<const std::size_t> prefix)>;

// sum_i log p(x_i | x_<i). Every distribution must be non-negative and sum to
// 1 within 1e-6, else ErrorCode::kContract.
double SequenceLogProb(std::span<const std::size_t> tokens,
                       const NextTokenModel& model);

enum class Backend { kTemplate, kHttp };

const char* BackendName(Backend backend);
Backend ParseBackend(std::string_view text);

// Which relation family a question asks about.
enum class Intent { kAny, kPrevent, kTreat, kSymptom };

// Keyword families in priority order: prevent/prevention, treat/cure/control,
// symptom/sign, matched as whole words or with a plain inflection suffix.
Intent DetectIntent(std::string_view question);
// Substring a relation label must contain to serve the intent; empty for kAny.
std::string_view IntentRelationKeyword(Intent intent);

struct GenerationRequest {
  std::string question;
  EvidenceBundle evidence;
  std::size_t max_answer_entities = 8;
  Backend backend = Backend::kTemplate;
};

struct Answer {
  std::string text;
  std::vector<EntityId> answer_entities;
  std::vector<Triple> supporting_triples;
  bool abstained = false;

  bool operator==(const Answer&) const = default;
};

inline constexpr std::string_view kAbstentionText = "no supported answer";

struct GeneratorConfig {
  // Base URL, e.g. http://127.0.0.1:8080 or http://host:port/prefix. The
  // request goes to <url>/generate.
  std::string url;
  double timeout_secs = 30.0;
  int max_tokens = 256;
};

// Body fields of one generator request.
struct GeneratorCall {
  std::string prompt;
  std::string evidence;
  std::vector<double> fused_vector;
};

// POSTs {"prompt","evidence","fused_vector","max_tokens"} and returns the
// "text" field. Errors: kTransport (connect/timeout), StatusError (non-2xx),
// kDecode (bad JSON or missing text), kConfig (bad URL).
std::string CallGeneratorEndpoint(const GeneratorCall& call,
                                  const GeneratorConfig& config);
std::string CallGeneratorEndpoint(const std::string& prompt,
                                  const GeneratorConfig& config);

// Instruction, evidence block, then the question.
std::string BuildPrompt(std::string_view question,
                        const EvidenceBundle& evidence);

// Template backend: picks evidence triples whose relation matches the
// question intent (all triples when none match or no intent is detected),
// keeps those nearest to the entities named in the question within the
// evidence graph, and answers with their tails, skipping the named entities.
// Abstains when nothing is left. Http backend: calls the endpoint and links
// entities in the returned text.
Answer GenerateAnswer(const GenerationRequest& request,
                      const KnowledgeGraph& store,
                      const GeneratorConfig* http = nullptr);

}  // namespace kgrag
