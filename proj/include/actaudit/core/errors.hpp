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

#ifndef ACTAUDIT_CORE_ERRORS_HPP
#define ACTAUDIT_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace actaudit {

// Every failure the toolkit can raise, keyed so the CLI can print a
// machine-parsable class and map to a stable exit code.
enum class ErrorKind {
  kUsage,
  kIo,
  kSchemaMismatch,
  kMissingMetadata,
  kDuplicateRecord,
  kDimensionMismatch,
  kEmptyTrajectory,
  kTrajectoryTooShort,
  kNonFiniteScore,
  kNumericFailure,
  kAccessRegimeViolation,
  kPromptModeMismatch,
  kDegenerateEvaluation,
  kInsufficientPopulation,
  kMissingRecord,
  kUnknownUnit,
};

// Stable uppercase identifier, e.g. ErrorKind::kAccessRegimeViolation ->
// "ACCESS_REGIME".
const char* error_class(ErrorKind kind);

// CLI exit code: 2 usage, 3 schema/data, 4 access regime, 5 numeric.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* error_class() const { return actaudit::error_class(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace actaudit

#endif  // ACTAUDIT_CORE_ERRORS_HPP
