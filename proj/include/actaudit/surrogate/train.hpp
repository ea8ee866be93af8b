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

#ifndef ACTAUDIT_SURROGATE_TRAIN_HPP
#define ACTAUDIT_SURROGATE_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "actaudit/core/io.hpp"
#include "actaudit/surrogate/policy.hpp"
#include "actaudit/surrogate/tokenizer.hpp"

namespace actaudit::surrogate {

// Everything needed to run the policy against a corpus: parameters, the
// instruction vocabulary (index = position; the reserved generic
// instruction sits one past the end), and the action tokenizer.
struct PolicyBundle {
  PolicyParams params;
  std::vector<std::string> instructions;
  ActionTokenizer tokenizer;

  int generic_instruction_index() const {
    return static_cast<int>(instructions.size());
  }
  int instruction_index(const std::string& instruction_id) const;
};

struct Checkpoint {
  PolicyBundle bundle;
  int step = 0;
  double train_loss = 0.0;     // mean CE per token over member transitions
  double holdout_error = 0.0;  // mean L1 action error on held-out transitions
};

struct TrainConfig {
  int steps = 3000;
  double lr = 0.05;
  int batch_size = 64;
  double momentum = 0.9;
  int checkpoint_every = 500;
  uint64_t seed = 7;
  int bins_override = 0;       // 0: corpus default
  double dropout_p = 0.0;      // stored in params; inactive during training
  int holdout_subsample = 1000;
};

// One flattened transition for teacher-forced training.
struct EncodedSample {
  std::vector<double> obs;
  int instruction = 0;
  std::vector<int> tokens;
  Action action;
};

std::vector<std::string> instruction_vocabulary(const Corpus& corpus);

std::vector<EncodedSample> encode_transitions(
    const Corpus& corpus, const ActionTokenizer& tokenizer,
    const std::vector<std::string>& instructions, bool members);

// Mean teacher-forced cross-entropy per token over `samples`.
double dataset_loss(const PolicyParams& params,
                    const std::vector<EncodedSample>& samples);

// Batch loss and (optionally) its gradient; exposed for the finite
// difference check. `grad` must be param-sized and zeroed by the caller.
double batch_loss_and_grad(const PolicyParams& params,
                           const std::vector<EncodedSample>& samples,
                           const std::vector<size_t>& batch,
                           std::vector<double>* grad);

// Minimizes member cross-entropy with SGD + momentum. Emits a checkpoint
// at step 0, every `checkpoint_every` steps, and at the final step.
std::vector<Checkpoint> train(const Corpus& corpus, const TrainConfig& config);

}  // namespace actaudit::surrogate

#endif  // ACTAUDIT_SURROGATE_TRAIN_HPP
