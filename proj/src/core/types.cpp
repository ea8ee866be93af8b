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

#include "actaudit/core/types.hpp"

#include <charconv>

#include "actaudit/core/errors.hpp"

namespace actaudit {

const char* to_string(PromptMode mode) {
  return mode == PromptMode::kOriginal ? "original" : "fixed";
}

PromptMode prompt_mode_from_string(const std::string& s) {
  if (s == "original") return PromptMode::kOriginal;
  if (s == "fixed") return PromptMode::kFixed;
  raise(ErrorKind::kSchemaMismatch, "unknown prompt_mode '" + s + "'");
}

std::string sample_unit_id(const std::string& trajectory_id, int step_index) {
  return trajectory_id + "#" + std::to_string(step_index);
}

std::pair<std::string, int> parse_sample_unit_id(const std::string& unit_id) {
  const size_t pos = unit_id.rfind('#');
  if (pos == std::string::npos || pos + 1 == unit_id.size()) {
    raise(ErrorKind::kUnknownUnit,
          "sample unit id '" + unit_id + "' is not of the form <traj>#<step>");
  }
  int step = 0;
  const char* first = unit_id.data() + pos + 1;
  const char* last = unit_id.data() + unit_id.size();
  auto [ptr, ec] = std::from_chars(first, last, step);
  if (ec != std::errc() || ptr != last || step < 0) {
    raise(ErrorKind::kUnknownUnit,
          "sample unit id '" + unit_id + "' has a malformed step index");
  }
  return {unit_id.substr(0, pos), step};
}

}  // namespace actaudit
