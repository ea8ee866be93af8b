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

#ifndef ACTAUDIT_CORPUS_CORPUS_HPP
#define ACTAUDIT_CORPUS_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actaudit/core/io.hpp"
#include "actaudit/core/types.hpp"

namespace actaudit::corpus {

// Synthetic embodied-demonstration generator. Each task moves a point from
// a task-specific start to a goal along a cubic-ease reference path; each
// trajectory perturbs the per-step reference deltas with its own jitter
// vector. Observations are (position (+) goal (+) normalized step index)
// with additive noise. The last action dimension is a binary gripper
// channel that flips on in the final quarter of the horizon.

struct TaskSpec {
  std::string task_id;  // doubles as instruction_id
  std::vector<double> start;
  std::vector<double> goal;
  int horizon = 0;
  double sigma_demo = 0.0;
  double sigma_obs = 0.0;
};

struct GenerateConfig {
  int n_tasks = 4;
  int trajs_per_task = 50;
  int horizon = 60;
  int action_dim = 7;  // d-1 motion dimensions + gripper
  double sigma_demo = 0.05;
  double sigma_obs = 0.01;
  int bin_count = 256;
  uint64_t seed = 7;
};

Corpus generate_corpus(const GenerateConfig& config);

// Reference path position at integer step t in [0, horizon]; exposed so
// tests can check the telescoping displacement property directly.
std::vector<double> reference_position(const TaskSpec& task, int t);

struct SplitPlan {
  std::vector<std::string> member_ids;
  std::vector<std::string> nonmember_ids;
  uint64_t seed = 0;
};

// Per-task stratified split; each task contributes round(fraction * n)
// members (ties: the member side gets the extra trajectory).
SplitPlan split_corpus(const std::vector<Trajectory>& trajectories,
                       double fraction, uint64_t seed);

// Stamp the plan's member labels onto the corpus trajectories.
void apply_split(Corpus& corpus, const SplitPlan& plan);

// Which transition samples and whole trajectories an audit evaluates.
struct EvalManifest {
  uint64_t seed = 0;
  bool disjoint = false;  // trajectory draw avoids sampled transitions
  std::vector<std::string> member_samples;     // "<traj>#<step>" unit ids
  std::vector<std::string> nonmember_samples;
  std::vector<std::string> member_trajs;
  std::vector<std::string> nonmember_trajs;
};

// Uniform draws without replacement, separately per class. Raises
// InsufficientPopulation (listing the shortfall) when a request exceeds the
// available units.
EvalManifest sample_eval_sets(const Corpus& corpus, int n_samples_per_class,
                              int n_trajs_per_class, uint64_t seed,
                              bool disjoint = false);

void write_manifest(const std::filesystem::path& path,
                    const EvalManifest& manifest);
EvalManifest read_manifest(const std::filesystem::path& path);

}  // namespace actaudit::corpus

#endif  // ACTAUDIT_CORPUS_CORPUS_HPP
