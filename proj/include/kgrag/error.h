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
#include <stdexcept>
#include <string>

namespace kgrag {

enum class ErrorCode {
  kIngest,
  kLookup,
  kConfig,
  kContract,
  kSampling,
  kTraining,
  kEvaluation,
  kNoEntity,
  kTransport,
  kStatus,
  kDecode,
  kIo,
  kStage,
};

const char* ErrorCodeName(ErrorCode code);

// Base class for every error raised by the library. The code identifies the
// failure category; the message carries the human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Malformed input file. line() is 1-based; 0 when not tied to a line.
class IngestError : public Error {
 public:
  IngestError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kIngest,
              line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Non-success HTTP status from the generator endpoint.
class StatusError : public Error {
 public:
  StatusError(int status, const std::string& body)
      : Error(ErrorCode::kStatus,
              "generator returned status " + std::to_string(status) +
                  (body.empty() ? "" : ": " + body)),
        status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

// Wraps an error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorCode inner, const std::string& message)
      : Error(ErrorCode::kStage, stage + ": " + message),
        stage_(std::move(stage)),
        inner_(inner) {}

  const std::string& stage() const { return stage_; }
  ErrorCode inner_code() const { return inner_; }

 private:
  std::string stage_;
  ErrorCode inner_;
};

}  // namespace kgrag
