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

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "kgrag/matrix.h"

namespace kgrag {

// Text vector file shared by TransE tables and GCN outputs:
//
//   dim=<d> entities=<n> relations=<m> [key=value ...]
//   E<TAB><id><TAB><v1> ... <vd>
//   R<TAB><id><TAB><v1> ... <vd>
//
// Values use 9 significant digits. Ids must be contiguous and in order.
struct VectorFile {
  // Header fields other than dim/entities/relations, in write order given
  // by `header_order`.
  std::map<std::string, std::string> header;
  std::vector<std::string> header_order;
  Matrix entities;
  Matrix relations;
};

void WriteVectorFile(std::ostream& out, const VectorFile& file);
VectorFile ReadVectorFile(std::istream& in);

void WriteVectorFile(const std::string& path, const VectorFile& file);
VectorFile ReadVectorFile(const std::string& path);

}  // namespace kgrag
