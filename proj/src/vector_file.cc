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

#include "kgrag/vector_file.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kgrag/error.h"

namespace kgrag {
namespace {

std::string FormatValue(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void WriteRows(std::ostream& out, char tag, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << tag << '\t' << i << '\t';
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ' ';
      out << FormatValue(row[j]);
    }
    out << '\n';
  }
}

std::size_t ParseCount(const std::string& key, const std::string& value,
                       std::size_t line) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty() || value[0] == '-') {
    throw IngestError(line, "bad header value " + key + "=" + value);
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

void WriteVectorFile(std::ostream& out, const VectorFile& file) {
  std::size_t dim = file.entities.cols();
  if (file.relations.rows() > 0 && file.relations.cols() != dim) {
    throw Error(ErrorCode::kContract,
                "entity and relation vectors differ in dimension");
  }
  out << "dim=" << dim << " entities=" << file.entities.rows()
      << " relations=" << file.relations.rows();
  for (const std::string& key : file.header_order) {
    out << ' ' << key << '=' << file.header.at(key);
  }
  out << '\n';
  WriteRows(out, 'E', file.entities);
  WriteRows(out, 'R', file.relations);
}

VectorFile ReadVectorFile(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError(1, "missing header line");
  VectorFile file;
  std::size_t dim = 0, entities = 0, relations = 0;
  bool have_dim = false, have_entities = false, have_relations = false;
  {
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
      auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw IngestError(1, "malformed header token '" + token + "'");
      }
      std::string key = token.substr(0, eq);
      std::string value = token.substr(eq + 1);
      if (key == "dim") {
        dim = ParseCount(key, value, 1);
        have_dim = true;
      } else if (key == "entities") {
        entities = ParseCount(key, value, 1);
        have_entities = true;
      } else if (key == "relations") {
        relations = ParseCount(key, value, 1);
        have_relations = true;
      } else {
        if (!file.header.contains(key)) file.header_order.push_back(key);
        file.header[key] = value;
      }
    }
  }
  if (!have_dim || !have_entities || !have_relations) {
    throw IngestError(1, "header must carry dim, entities and relations");
  }
  file.entities = Matrix(entities, dim);
  file.relations = Matrix(relations, dim);

  std::size_t line_number = 1;
  std::size_t next_entity = 0, next_relation = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tag, id_text;
    if (!std::getline(row, tag, '\t') || !std::getline(row, id_text, '\t')) {
      throw IngestError(line_number, "expected <tag>\\t<id>\\t<values>");
    }
    Matrix* target = nullptr;
    std::size_t* next = nullptr;
    if (tag == "E") {
      target = &file.entities;
      next = &next_entity;
    } else if (tag == "R") {
      target = &file.relations;
      next = &next_relation;
    } else {
      throw IngestError(line_number, "unknown row tag '" + tag + "'");
    }
    std::size_t id = ParseCount("id", id_text, line_number);
    if (id != *next || id >= target->rows()) {
      throw IngestError(line_number, "row id " + id_text + " out of order");
    }
    auto values = target->row(id);
    for (std::size_t j = 0; j < dim; ++j) {
      std::string text;
      if (!(row >> text)) {
        throw IngestError(line_number, "expected " + std::to_string(dim) +
                                           " values");
      }
      try {
        std::size_t pos = 0;
        values[j] = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw IngestError(line_number, "bad number '" + text + "'");
      }
    }
    std::string extra;
    if (row >> extra) {
      throw IngestError(line_number, "more than " + std::to_string(dim) +
                                         " values");
    }
    ++*next;
  }
  if (next_entity != entities || next_relation != relations) {
    throw IngestError(0, "vector file truncated: expected " +
                             std::to_string(entities) + " entity and " +
                             std::to_string(relations) + " relation rows");
  }
  return file;
}

void WriteVectorFile(const std::string& path, const VectorFile& file) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  WriteVectorFile(out, file);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

VectorFile ReadVectorFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadVectorFile(in);
}

}  // namespace kgrag
