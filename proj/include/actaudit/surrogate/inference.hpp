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

#ifndef ACTAUDIT_SURROGATE_INFERENCE_HPP
#define ACTAUDIT_SURROGATE_INFERENCE_HPP

#include <cstdint>
#include <string>

#include "actaudit/core/io.hpp"
#include "actaudit/corpus/corpus.hpp"
#include "actaudit/mitigations/defenses.hpp"
#include "actaudit/surrogate/train.hpp"

namespace actaudit::surrogate {

struct InferenceConfig {
  PromptMode prompt_mode = PromptMode::kOriginal;
  mitigations::DefenseSpec defense;  // kNone: plain greedy decode
  uint64_t seed = 0;                 // root of the defense substream
  int workers = 1;
  std::string model_tag;
};

// Queries the policy on every manifest unit (each sampled transition plus
// every step of each sampled trajectory) and emits one record per
// (trajectory, step): the generated action, the full per-position
// log-probability rows conditioned on the generated prefix, and the
// teacher-forced log-probabilities of the ground-truth tokens.
//
// Defense randomness is counter-based per (unit, defense), so the log does
// not depend on worker count or processing order.
InferenceLog run_inference(const PolicyBundle& bundle, const Corpus& corpus,
                           const corpus::EvalManifest& manifest,
                           const InferenceConfig& config);

}  // namespace actaudit::surrogate

#endif  // ACTAUDIT_SURROGATE_INFERENCE_HPP
