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

#include "kgrag/generation.h"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <map>
#include <span>

#include "kgrag/error.h"
#include "kgrag/kernels.h"

namespace kgrag {
namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl ParseUrl(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::kConfig,
                "generator URL must start with http:// (got '" + url + "')");
  }
  std::size_t slash = url.find('/', scheme.size());
  ParsedUrl parsed;
  parsed.scheme_host_port = url.substr(0, slash);
  if (parsed.scheme_host_port.size() == scheme.size()) {
    throw Error(ErrorCode::kConfig, "generator URL has no host: " + url);
  }
  if (slash != std::string::npos) {
    parsed.path_prefix = url.substr(slash);
    while (!parsed.path_prefix.empty() && parsed.path_prefix.back() == '/') {
      parsed.path_prefix.pop_back();
    }
  }
  return parsed;
}

bool MatchesKeyword(std::string_view word, std::string_view keyword) {
  static constexpr std::array<std::string_view, 12> kSuffixes = {
      "",    "s",    "es",  "d",    "ed",  "ing",
      "ion", "ions", "ive", "ment", "ments", "led"};
  if (word.substr(0, keyword.size()) != keyword) return false;
  std::string_view rest = word.substr(keyword.size());
  return std::find(kSuffixes.begin(), kSuffixes.end(), rest) != kSuffixes.end();
}

std::vector<std::string_view> Words(std::string_view key) {
  std::vector<std::string_view> words;
  std::size_t start = 0;
  while (start < key.size()) {
    std::size_t space = key.find(' ', start);
    if (space == std::string_view::npos) space = key.size();
    words.push_back(key.substr(start, space - start));
    start = space + 1;
  }
  return words;
}

Answer Abstain() {
  Answer a;
  a.text = std::string(kAbstentionText);
  a.abstained = true;
  return a;
}

constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

// For every evidence triple, the number of evidence edges separating its
// nearer endpoint from the entities named in the question (breadth-first over
// the evidence graph, both directions). kUnreachable when not connected.
std::vector<std::size_t> AnchorDistances(std::span<const ScoredTriple> evidence,
                                         std::span<const EntityId> named) {
  std::map<EntityId, std::size_t> distance;
  for (EntityId e : named) distance.emplace(e, 0);
  bool grew = !distance.empty();
  for (std::size_t layer = 0; grew; ++layer) {
    grew = false;
    for (const ScoredTriple& st : evidence) {
      auto h = distance.find(st.triple.head);
      auto t = distance.find(st.triple.tail);
      if (h != distance.end() && h->second == layer && t == distance.end()) {
        distance.emplace(st.triple.tail, layer + 1);
        grew = true;
      } else if (t != distance.end() && t->second == layer &&
                 h == distance.end()) {
        distance.emplace(st.triple.head, layer + 1);
        grew = true;
      }
    }
  }
  std::vector<std::size_t> out;
  out.reserve(evidence.size());
  for (const ScoredTriple& st : evidence) {
    auto h = distance.find(st.triple.head);
    auto t = distance.find(st.triple.tail);
    std::size_t d = kUnreachable;
    if (h != distance.end()) d = h->second;
    if (t != distance.end()) d = std::min(d, t->second);
    out.push_back(d);
  }
  return out;
}

Answer TemplateAnswer(const GenerationRequest& request,
                      const KnowledgeGraph& store) {
  const auto& evidence = request.evidence.ranked_triples;
  if (evidence.empty()) return Abstain();

  std::string_view keyword = IntentRelationKeyword(DetectIntent(request.question));
  auto eligible = [&](const Triple& t) {
    return keyword.empty() ||
           store.RelationLabel(t.relation).find(keyword) != std::string::npos;
  };
  bool any_match = std::any_of(evidence.begin(), evidence.end(),
                               [&](const ScoredTriple& st) {
                                 return eligible(st.triple);
                               });
  if (!any_match) keyword = {};

  std::vector<EntityId> named;
  for (const EntityMention& m : LinkEntities(request.question, store)) {
    named.push_back(m.entity);
  }
  auto contains = [](const std::vector<EntityId>& v, EntityId e) {
    return std::find(v.begin(), v.end(), e) != v.end();
  };

  // Keep only the eligible triples closest to the question's entities.
  std::vector<std::size_t> anchor = AnchorDistances(evidence, named);
  std::size_t nearest = kUnreachable;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (eligible(evidence[i].triple)) nearest = std::min(nearest, anchor[i]);
  }

  Answer answer;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const ScoredTriple& st = evidence[i];
    if (!eligible(st.triple) || anchor[i] != nearest) continue;
    EntityId tail = st.triple.tail;
    if (contains(named, tail)) continue;
    if (!contains(answer.answer_entities, tail)) {
      if (answer.answer_entities.size() >= request.max_answer_entities) {
        continue;
      }
      answer.answer_entities.push_back(tail);
    }
    answer.supporting_triples.push_back(st.triple);
  }
  if (answer.answer_entities.empty()) return Abstain();

  answer.text = "Based on the retrieved evidence: ";
  for (std::size_t i = 0; i < answer.answer_entities.size(); ++i) {
    if (i > 0) answer.text += "; ";
    answer.text += store.EntityLabel(answer.answer_entities[i]);
  }
  answer.text += ".";
  return answer;
}

Answer HttpAnswer(const GenerationRequest& request,
                  const KnowledgeGraph& store, const GeneratorConfig& config) {
  GeneratorCall call;
  call.prompt = BuildPrompt(request.question, request.evidence);
  call.evidence = request.evidence.context_text;
  call.fused_vector = request.evidence.fused_vector;
  Answer answer;
  answer.text = CallGeneratorEndpoint(call, config);
  for (const EntityMention& m : LinkEntities(answer.text, store)) {
    if (answer.answer_entities.size() >= request.max_answer_entities) break;
    if (std::find(answer.answer_entities.begin(), answer.answer_entities.end(),
                  m.entity) == answer.answer_entities.end()) {
      answer.answer_entities.push_back(m.entity);
    }
  }
  for (const ScoredTriple& st : request.evidence.ranked_triples) {
    for (EntityId e : answer.answer_entities) {
      if (st.triple.head == e || st.triple.tail == e) {
        answer.supporting_triples.push_back(st.triple);
        break;
      }
    }
  }
  answer.abstained = answer.answer_entities.empty();
  return answer;
}

}  // namespace

Matrix AttentionWeights(const Matrix& q, const Matrix& k) {
  if (q.cols() != k.cols() || q.cols() == 0) {
    throw Error(ErrorCode::kContract,
                "query and key widths must match and be positive");
  }
  if (k.rows() == 0) throw Error(ErrorCode::kContract, "no keys to attend to");
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Matrix w(q.rows(), k.rows());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    auto row = w.row(i);
    for (std::size_t j = 0; j < k.rows(); ++j) {
      row[j] = kernels::Dot(q.row(i), k.row(j)) * scale;
    }
    double max = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - max);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return w;
}

Matrix ScaledDotProductAttention(const Matrix& q, const Matrix& k,
                                 const Matrix& v) {
  if (k.rows() != v.rows()) {
    throw Error(ErrorCode::kContract, "keys and values differ in count");
  }
  Matrix weights = AttentionWeights(q, k);
  Matrix out(q.rows(), v.cols());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t j = 0; j < v.rows(); ++j) {
      kernels::Axpy(weights(i, j), v.row(j), out.row(i));
    }
  }
  return out;
}

double SequenceLogProb(std::span<const std::size_t> tokens,
                       const NextTokenModel& model) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kContract, "sequence must be non-empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::vector<double> dist = model(tokens.first(i));
    double sum = 0.0;
    for (double p : dist) {
      if (!(p >= 0.0)) {
        throw Error(ErrorCode::kContract,
                    "model returned a negative or NaN probability");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::kContract,
                  "model distribution at position " + std::to_string(i) +
                      " sums to " + std::to_string(sum));
    }
    if (tokens[i] >= dist.size()) {
      throw Error(ErrorCode::kContract, "token id outside the vocabulary");
    }
    total += std::log(dist[tokens[i]]);
  }
  return total;
}

const char* BackendName(Backend backend) {
  return backend == Backend::kHttp ? "http" : "template";
}

Backend ParseBackend(std::string_view text) {
  if (text == "template") return Backend::kTemplate;
  if (text == "http") return Backend::kHttp;
  throw Error(ErrorCode::kConfig, "unknown backend '" + std::string(text) +
                                      "' (expected template or http)");
}

Intent DetectIntent(std::string_view question) {
  struct Family {
    Intent intent;
    std::vector<std::string_view> keywords;
  };
  static const std::vector<Family> kFamilies = {
      {Intent::kPrevent, {"prevent"}},
      {Intent::kTreat, {"treat", "cure", "control"}},
      {Intent::kSymptom, {"symptom", "sign"}},
  };
  std::string key = LinkKey(question);
  std::vector<std::string_view> words = Words(key);
  for (const Family& family : kFamilies) {
    for (std::string_view word : words) {
      for (std::string_view kw : family.keywords) {
        if (MatchesKeyword(word, kw)) return family.intent;
      }
    }
  }
  return Intent::kAny;
}

std::string_view IntentRelationKeyword(Intent intent) {
  switch (intent) {
    case Intent::kPrevent:
      return "prevent";
    case Intent::kTreat:
      return "treat";
    case Intent::kSymptom:
      return "symptom";
    case Intent::kAny:
      break;
  }
  return {};
}

std::string BuildPrompt(std::string_view question,
                        const EvidenceBundle& evidence) {
  std::string prompt =
      "Answer the question using only the knowledge-graph evidence below. "
      "If the evidence does not support an answer, say so.\n\n";
  prompt += evidence.context_text.empty() ? std::string(kEvidenceHeader)
                                          : evidence.context_text;
  prompt += "\n\nQUESTION: ";
  prompt += question;
  prompt += "\nANSWER:";
  return prompt;
}

std::string CallGeneratorEndpoint(const GeneratorCall& call,
                                  const GeneratorConfig& config) {
  if (config.url.empty()) {
    throw Error(ErrorCode::kConfig, "generator URL is not configured");
  }
  ParsedUrl url = ParseUrl(config.url);
  httplib::Client client(url.scheme_host_port);
  if (!client.is_valid()) {
    throw Error(ErrorCode::kConfig, "invalid generator URL " + config.url);
  }
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_secs));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  json body = {{"prompt", call.prompt},
               {"evidence", call.evidence},
               {"fused_vector", call.fused_vector},
               {"max_tokens", config.max_tokens}};
  httplib::Result res = client.Post(url.path_prefix + "/generate", body.dump(),
                                    "application/json");
  if (!res) {
    throw Error(ErrorCode::kTransport, "generator request to " + config.url +
                                           " failed: " +
                                           httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw StatusError(res->status, res->body);
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kDecode,
                std::string("generator reply is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("text") ||
      !reply["text"].is_string()) {
    throw Error(ErrorCode::kDecode,
                "generator reply lacks a string \"text\" field");
  }
  return reply["text"].get<std::string>();
}

std::string CallGeneratorEndpoint(const std::string& prompt,
                                  const GeneratorConfig& config) {
  return CallGeneratorEndpoint(GeneratorCall{prompt, "", {}}, config);
}

Answer GenerateAnswer(const GenerationRequest& request,
                      const KnowledgeGraph& store,
                      const GeneratorConfig* http) {
  if (request.question.empty()) {
    throw Error(ErrorCode::kContract, "question must be non-empty");
  }
  if (request.backend == Backend::kTemplate) {
    return TemplateAnswer(request, store);
  }
  if (http == nullptr) {
    throw Error(ErrorCode::kConfig, "http backend selected without config");
  }
  return HttpAnswer(request, store, *http);
}

}  // namespace kgrag
