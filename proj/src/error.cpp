// Copyright 2026 The kg2ft Authors
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

#include "kg2ft/error.hpp"

namespace kg2ft {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidId: return "InvalidId";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kUnknownRelation: return "UnknownRelation";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kInvalidBudget: return "InvalidBudget";
    case ErrorCode::kMissingTemplate: return "MissingTemplate";
    case ErrorCode::kInvalidTemplate: return "InvalidTemplate";
    case ErrorCode::kNoDescribableContent: return "NoDescribableContent";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kInvalidRatio: return "InvalidRatio";
    case ErrorCode::kInsufficientDistractorPool:
      return "InsufficientDistractorPool";
    case ErrorCode::kMissingResponse: return "MissingResponse";
    case ErrorCode::kFormatMismatch: return "FormatMismatch";
    case ErrorCode::kMalformedSample: return "MalformedSample";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(std::string(to_string(code)) + ": " + message +
                         (line ? " (line " + std::to_string(*line) + ")"
                               : std::string())),
      code_(code),
      line_(line) {}

}  // namespace kg2ft
