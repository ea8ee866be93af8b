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

#ifndef ACTAUDIT_MITIGATIONS_DEFENDED_INFERENCE_HPP
#define ACTAUDIT_MITIGATIONS_DEFENDED_INFERENCE_HPP

#include "actaudit/surrogate/inference.hpp"

namespace actaudit::mitigations {

// Defended inference shares the undefended log schema; probability rows are
// the distributions actually used for decoding (post-temperature under
// stochastic decoding), so downstream attacks audit the deployed interface.
InferenceLog run_defended_inference(const surrogate::PolicyBundle& bundle,
                                    const Corpus& corpus,
                                    const corpus::EvalManifest& manifest,
                                    const DefenseSpec& defense,
                                    uint64_t seed, int workers = 1,
                                    PromptMode prompt_mode =
                                        PromptMode::kOriginal);

// Mean L1 distance between defended generated actions and ground truth over
// the log's non-member records: the utility proxy for trade-off reports.
double utility_error(const InferenceLog& log, const Corpus& corpus);

}  // namespace actaudit::mitigations

#endif  // ACTAUDIT_MITIGATIONS_DEFENDED_INFERENCE_HPP
