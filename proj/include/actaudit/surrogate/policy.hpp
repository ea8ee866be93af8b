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

#ifndef ACTAUDIT_SURROGATE_POLICY_HPP
#define ACTAUDIT_SURROGATE_POLICY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actaudit/core/rng.hpp"
#include "actaudit/surrogate/tokenizer.hpp"

namespace actaudit::surrogate {

// Tokenized-action policy: a shared tanh embedding of (observation features
// (+) instruction one-hot), feeding one linear head per action-token
// position. Head j additionally consumes one-hot encodings of the j
// previously decoded tokens, which makes the factorized likelihood
// genuinely autoregressive.
struct PolicyShape {
  int obs_dim = 0;
  int n_instructions = 0;  // includes the reserved generic instruction
  int action_dim = 0;      // number of token positions (= heads)
  int bins = 0;            // tokens per position
  int hidden = 64;

  int embed_inputs() const { return obs_dim + n_instructions; }
  int head_inputs(int position) const { return hidden + position * bins; }

  // Flat layout: embedding weights (input-major), embedding bias, then per
  // head: weights (input-major rows of length `bins`), bias.
  size_t embed_weight_offset() const { return 0; }
  size_t embed_bias_offset() const {
    return static_cast<size_t>(embed_inputs()) * hidden;
  }
  size_t head_offset(int position) const;
  size_t head_bias_offset(int position) const;
  size_t param_count() const;

  bool operator==(const PolicyShape&) const = default;
};

struct PolicyParams {
  PolicyShape shape;
  double dropout_p = 0.0;
  uint64_t seed = 0;
  std::vector<double> flat;
};

// Random tanh embedding, zero-initialized heads (uniform initial softmax).
PolicyParams init_params(const PolicyShape& shape, uint64_t seed,
                         double dropout_p = 0.0);
PolicyParams zero_params(const PolicyShape& shape);

// Embedding features for (observation, instruction). `dropout_mask` is
// empty for the identity mask, otherwise one multiplicative factor per
// hidden unit (already including the 1/(1-p) rescale).
void embed_features(const PolicyParams& params, std::span<const double> obs,
                    int instruction_index, std::span<const double> dropout_mask,
                    std::span<double> hidden_out);

void head_logits(const PolicyParams& params, int position,
                 std::span<const double> hidden,
                 std::span<const int> prev_tokens,
                 std::span<double> logits_out);

// Full forward for one token position.
std::vector<double> forward_logits(const PolicyParams& params,
                                   std::span<const double> obs,
                                   int instruction_index,
                                   std::span<const int> prev_tokens,
                                   std::span<const double> dropout_mask = {});

// In-place log-softmax, clamped away from -inf so rows stay finite.
void log_softmax_inplace(std::span<double> logits);

inline constexpr double kMinLogProb = -690.0;  // ~log(1e-300)

// Sample a dropout mask: keep with probability 1-p, rescale kept units by
// 1/(1-p). Returns an empty mask for p == 0 (identity).
std::vector<double> sample_dropout_mask(int hidden, double p,
                                        rng::Stream& stream);

}  // namespace actaudit::surrogate

#endif  // ACTAUDIT_SURROGATE_POLICY_HPP
