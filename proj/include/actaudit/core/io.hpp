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

#ifndef ACTAUDIT_CORE_IO_HPP
#define ACTAUDIT_CORE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "actaudit/core/types.hpp"

namespace actaudit {

// All on-disk artifacts are newline-delimited JSON with a single metadata
// header line (scores files are headerless). Doubles are emitted in
// shortest-round-trip form, so write-then-read reproduces every field
// exactly.

struct Corpus {
  CorpusMetadata meta;
  std::vector<Trajectory> trajectories;

  const Trajectory* find_trajectory(const std::string& trajectory_id) const;
};

struct ReadOptions {
  // Strict mode rejects records whose vector lengths disagree with the
  // corpus metadata and any unknown field; lenient mode skips such records
  // and counts them.
  bool strict = true;
};

struct ReadStats {
  size_t skipped = 0;
};

void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& path, ReadOptions options = {},
                   ReadStats* stats = nullptr);

struct InferenceLogHeader {
  std::string schema = "inferlog/1";
  std::string model_tag;
  PromptMode prompt_mode = PromptMode::kOriginal;
  std::string defense;  // canonical defense tag, empty when undefended
};

struct InferenceLog {
  InferenceLogHeader header;
  std::vector<InferenceRecord> records;
};

// Map from sample unit id ("<traj>#<step>") to index into log.records.
std::unordered_map<std::string, size_t> build_record_index(
    const InferenceLog& log);

void write_inference_log(const std::filesystem::path& path,
                         const InferenceLog& log);
InferenceLog read_inference_log(const std::filesystem::path& path,
                                ReadOptions options = {},
                                ReadStats* stats = nullptr);

void write_scores(const std::filesystem::path& path,
                  const std::vector<ScoredExample>& scores);
std::vector<ScoredExample> read_scores(const std::filesystem::path& path);

// FNV-1a over raw file bytes, as a 16-hex-digit string. Used by run
// manifests to pin artifact content.
std::string file_content_hash(const std::filesystem::path& path);

}  // namespace actaudit

#endif  // ACTAUDIT_CORE_IO_HPP
