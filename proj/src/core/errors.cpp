//
// Copyright 2026 The ActAudit Authors
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
//

#include "actaudit/core/errors.hpp"

namespace actaudit {

const char* error_class(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "USAGE";
    case ErrorKind::kIo:
      return "IO";
    case ErrorKind::kSchemaMismatch:
      return "SCHEMA";
    case ErrorKind::kMissingMetadata:
      return "MISSING_METADATA";
    case ErrorKind::kDuplicateRecord:
      return "DUPLICATE_RECORD";
    case ErrorKind::kDimensionMismatch:
      return "DIMENSION_MISMATCH";
    case ErrorKind::kEmptyTrajectory:
      return "EMPTY_TRAJECTORY";
    case ErrorKind::kTrajectoryTooShort:
      return "TRAJECTORY_TOO_SHORT";
    case ErrorKind::kNonFiniteScore:
      return "NON_FINITE_SCORE";
    case ErrorKind::kNumericFailure:
      return "NUMERIC";
    case ErrorKind::kAccessRegimeViolation:
      return "ACCESS_REGIME";
    case ErrorKind::kPromptModeMismatch:
      return "PROMPT_MODE_MISMATCH";
    case ErrorKind::kDegenerateEvaluation:
      return "DEGENERATE_EVALUATION";
    case ErrorKind::kInsufficientPopulation:
      return "INSUFFICIENT_POPULATION";
    case ErrorKind::kMissingRecord:
      return "MISSING_RECORD";
    case ErrorKind::kUnknownUnit:
      return "UNKNOWN_UNIT";
  }
  return "UNKNOWN";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kIo:
    case ErrorKind::kInsufficientPopulation:
      return 2;
    case ErrorKind::kSchemaMismatch:
    case ErrorKind::kMissingMetadata:
    case ErrorKind::kDuplicateRecord:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kEmptyTrajectory:
    case ErrorKind::kTrajectoryTooShort:
    case ErrorKind::kDegenerateEvaluation:
    case ErrorKind::kMissingRecord:
    case ErrorKind::kUnknownUnit:
      return 3;
    case ErrorKind::kAccessRegimeViolation:
    case ErrorKind::kPromptModeMismatch:
      return 4;
    case ErrorKind::kNonFiniteScore:
    case ErrorKind::kNumericFailure:
      return 5;
  }
  return 1;
}

}  // namespace actaudit
