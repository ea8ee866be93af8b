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

#include "actaudit/mitigations/defended_inference.hpp"

#include <cmath>
#include <unordered_map>

#include "actaudit/core/errors.hpp"

namespace actaudit::mitigations {

InferenceLog run_defended_inference(const surrogate::PolicyBundle& bundle,
                                    const Corpus& corpus,
                                    const corpus::EvalManifest& manifest,
                                    const DefenseSpec& defense, uint64_t seed,
                                    int workers, PromptMode prompt_mode) {
  surrogate::InferenceConfig config;
  config.prompt_mode = prompt_mode;
  config.defense = defense;
  config.seed = seed;
  config.workers = workers;
  return surrogate::run_inference(bundle, corpus, manifest, config);
}

double utility_error(const InferenceLog& log, const Corpus& corpus) {
  std::unordered_map<std::string, const Trajectory*> by_id;
  for (const auto& traj : corpus.trajectories) {
    by_id.emplace(traj.trajectory_id, &traj);
  }
  double total = 0.0;
  size_t count = 0;
  for (const auto& rec : log.records) {
    const auto it = by_id.find(rec.trajectory_id);
    if (it == by_id.end()) {
      raise(ErrorKind::kUnknownUnit,
            "log record references unknown trajectory '" + rec.trajectory_id +
                "'");
    }
    const Trajectory& traj = *it->second;
    if (traj.member) continue;  // utility is judged on held-out data
    const Action& gt =
        traj.samples[static_cast<size_t>(rec.step_index)].action;
    if (gt.dim() != rec.generated_action.dim()) {
      raise(ErrorKind::kDimensionMismatch,
            "generated/ground-truth dimension mismatch for '" +
                rec.trajectory_id + "'");
    }
    for (size_t k = 0; k < gt.dim(); ++k) {
      total += std::abs(rec.generated_action[k] - gt[k]);
    }
    ++count;
  }
  if (count == 0) {
    raise(ErrorKind::kDegenerateEvaluation,
          "no non-member records in the log to judge utility on");
  }
  return total / static_cast<double>(count);
}

}  // namespace actaudit::mitigations
