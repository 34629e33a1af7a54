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

#include "kgrag/error.h"

namespace kgrag {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIngest:
      return "ingest";
    case ErrorCode::kLookup:
      return "lookup";
    case ErrorCode::kConfig:
      return "config";
    case ErrorCode::kContract:
      return "contract";
    case ErrorCode::kSampling:
      return "sampling";
    case ErrorCode::kTraining:
      return "training";
    case ErrorCode::kEvaluation:
      return "evaluation";
    case ErrorCode::kNoEntity:
      return "no-entity";
    case ErrorCode::kTransport:
      return "transport";
    case ErrorCode::kStatus:
      return "status";
    case ErrorCode::kDecode:
      return "decode";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kStage:
      return "stage";
  }
  return "unknown";
}

}  // namespace kgrag
