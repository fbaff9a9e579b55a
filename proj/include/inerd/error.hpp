// Copyright 2026 The inerd Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace inerd {

// Numeric values are part of the C ABI (see c_api.h) and must stay stable.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kDuplicateToken = 2,
  kMarkerCollision = 3,
  kUnknownToken = 4,
  kMarkerInSentence = 5,
  kUnknownTypeLabel = 6,
  kInvalidSpan = 7,
  kMalformedChunk = 8,
  kContentNotInSentence = 9,
  kOverlappingSpans = 10,
  kEmptyLabel = 11,
  kDuplicateLabel = 12,
  kEmptySentence = 13,
  kDisallowedToken = 14,
  kEmptyAllowedSet = 15,
  kLengthMismatch = 16,
  kScorerError = 17,
  kBudgetExceeded = 18,
  kIoFailure = 19,
  kColumnMissing = 20,
  kUnmappedLabel = 21,
  kInvalidTag = 22,
  kParseError = 23,
  kSentenceCountMismatch = 24,
  kClosedHandle = 25,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateToken: return "DuplicateToken";
    case ErrorCode::kMarkerCollision: return "MarkerCollision";
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kMarkerInSentence: return "MarkerInSentence";
    case ErrorCode::kUnknownTypeLabel: return "UnknownTypeLabel";
    case ErrorCode::kInvalidSpan: return "InvalidSpan";
    case ErrorCode::kMalformedChunk: return "MalformedChunk";
    case ErrorCode::kContentNotInSentence: return "ContentNotInSentence";
    case ErrorCode::kOverlappingSpans: return "OverlappingSpans";
    case ErrorCode::kEmptyLabel: return "EmptyLabel";
    case ErrorCode::kDuplicateLabel: return "DuplicateLabel";
    case ErrorCode::kEmptySentence: return "EmptySentence";
    case ErrorCode::kDisallowedToken: return "DisallowedToken";
    case ErrorCode::kEmptyAllowedSet: return "EmptyAllowedSet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kScorerError: return "ScorerError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kColumnMissing: return "ColumnMissing";
    case ErrorCode::kUnmappedLabel: return "UnmappedLabel";
    case ErrorCode::kInvalidTag: return "InvalidTag";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSentenceCountMismatch: return "SentenceCountMismatch";
    case ErrorCode::kClosedHandle: return "ClosedHandle";
  }
  return "Unknown";
}

// Every engine failure is reported as an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class WarningKind {
  kPrefixAmbiguity,   // one type label's tokens are a prefix of another's
  kTruncatedEntity,   // trailing chunk without a closing separator
  kDuplicateSurplus,  // more generated duplicates than sentence occurrences
  kRepairedTag,       // orphan I- tag opened a new span
  kMalformedChunk,    // lenient parse dropped a chunk without one separator
  kUnknownType,       // lenient parse dropped a chunk with an unknown type
  kContentNotInSentence,  // lenient parse dropped out-of-sentence content
};

constexpr std::string_view WarningKindName(WarningKind kind) {
  switch (kind) {
    case WarningKind::kPrefixAmbiguity: return "PrefixAmbiguity";
    case WarningKind::kTruncatedEntity: return "TruncatedEntity";
    case WarningKind::kDuplicateSurplus: return "DuplicateSurplus";
    case WarningKind::kRepairedTag: return "RepairedTag";
    case WarningKind::kMalformedChunk: return "MalformedChunk";
    case WarningKind::kUnknownType: return "UnknownType";
    case WarningKind::kContentNotInSentence: return "ContentNotInSentence";
  }
  return "Unknown";
}

struct Warning {
  WarningKind kind;
  std::string detail;

  friend bool operator==(const Warning&, const Warning&) = default;
};

}  // namespace inerd
