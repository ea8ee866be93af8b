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

#ifndef ACTAUDIT_CORE_TYPES_HPP
#define ACTAUDIT_CORE_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace actaudit {

// A continuous control vector, one entry per action dimension. The last
// dimension is the gripper channel by corpus convention. All entries finite.
struct Action {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  double& operator[](size_t i) { return values[i]; }
  double operator[](size_t i) const { return values[i]; }
  bool operator==(const Action&) const = default;
};

struct VectorObs {
  std::vector<double> values;
  bool operator==(const VectorObs&) const = default;
};

// Raw pixel grid in [0,1], row-major (y, x, c). No image codec: pixel
// observations exist to exercise inference-time image perturbations.
struct PixelObs {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> pixels;

  double at(int y, int x, int c) const {
    return pixels[static_cast<size_t>((y * width + x) * channels + c)];
  }
  double& at(int y, int x, int c) {
    return pixels[static_cast<size_t>((y * width + x) * channels + c)];
  }
  bool operator==(const PixelObs&) const = default;
};

using Observation = std::variant<VectorObs, PixelObs>;

// One (observation, instruction, ground-truth action) tuple at a timestep.
struct TransitionSample {
  Observation observation;
  std::string instruction_id;
  Action action;
  int step_index = 0;
};

// An ordered demonstration. All samples share the instruction; step indices
// are 0,1,...,T-1. `member` is the ground-truth membership label.
struct Trajectory {
  std::string trajectory_id;
  std::string instruction_id;
  bool member = false;
  std::vector<TransitionSample> samples;

  size_t length() const { return samples.size(); }
};

enum class PromptMode { kOriginal, kFixed };

const char* to_string(PromptMode mode);
PromptMode prompt_mode_from_string(const std::string& s);

// Model outputs for one queried transition. Probability fields are optional:
// a black-box log carries only generated actions.
//   token_logprob_rows: one full log-probability row over the vocabulary per
//     decoding position, conditioned on the *generated* prefix.
//   gt_token_logprobs: teacher-forced log-probability of each ground-truth
//     token, conditioned on the ground-truth prefix.
struct InferenceRecord {
  std::string trajectory_id;
  int step_index = 0;
  Action generated_action;
  std::optional<std::vector<std::vector<double>>> token_logprob_rows;
  std::optional<std::vector<double>> gt_token_logprobs;
  PromptMode prompt_mode = PromptMode::kOriginal;
};

// Corpus-wide constants every consumer validates against.
struct CorpusMetadata {
  int action_dim = 0;                              // d
  int bin_count = 0;                               // B
  std::vector<std::pair<double, double>> bounds;   // per-dimension [lo, hi]
  int vocab_size = 0;                              // V >= B
  uint64_t seed = 0;
  std::string schema_version = "corpus/1";
};

// One scored unit: a transition sample or a trajectory.
struct ScoredExample {
  std::string unit_id;
  std::string attack_name;
  double score = 0.0;
  bool member = false;
};

// Sample units are addressed as "<trajectory_id>#<step_index>".
std::string sample_unit_id(const std::string& trajectory_id, int step_index);
std::pair<std::string, int> parse_sample_unit_id(const std::string& unit_id);

}  // namespace actaudit

#endif  // ACTAUDIT_CORE_TYPES_HPP
