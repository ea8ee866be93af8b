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

#include "actaudit/surrogate/policy.hpp"

#include <algorithm>
#include <cmath>

#include "actaudit/core/errors.hpp"

namespace actaudit::surrogate {

size_t PolicyShape::head_offset(int position) const {
  size_t offset = embed_bias_offset() + static_cast<size_t>(hidden);
  for (int j = 0; j < position; ++j) {
    offset += static_cast<size_t>(head_inputs(j)) * bins + bins;
  }
  return offset;
}

size_t PolicyShape::head_bias_offset(int position) const {
  return head_offset(position) +
         static_cast<size_t>(head_inputs(position)) * bins;
}

size_t PolicyShape::param_count() const {
  return head_offset(action_dim);
}

PolicyParams zero_params(const PolicyShape& shape) {
  if (shape.obs_dim <= 0 || shape.n_instructions <= 0 ||
      shape.action_dim <= 0 || shape.bins < 2 || shape.hidden <= 0) {
    raise(ErrorKind::kUsage, "invalid policy shape");
  }
  PolicyParams params;
  params.shape = shape;
  params.flat.assign(shape.param_count(), 0.0);
  return params;
}

PolicyParams init_params(const PolicyShape& shape, uint64_t seed,
                         double dropout_p) {
  PolicyParams params = zero_params(shape);
  params.seed = seed;
  params.dropout_p = dropout_p;
  rng::Stream stream(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(shape.embed_inputs()));
  const size_t embed_end = shape.embed_bias_offset();
  for (size_t i = 0; i < embed_end; ++i) {
    params.flat[i] = stream.normal(0.0, scale);
  }
  // Heads stay zero: the untrained policy decodes from a uniform softmax.
  return params;
}

void embed_features(const PolicyParams& params, std::span<const double> obs,
                    int instruction_index,
                    std::span<const double> dropout_mask,
                    std::span<double> hidden_out) {
  const PolicyShape& shape = params.shape;
  if (obs.size() != static_cast<size_t>(shape.obs_dim)) {
    raise(ErrorKind::kDimensionMismatch,
          "observation feature length does not match policy shape");
  }
  if (instruction_index < 0 || instruction_index >= shape.n_instructions) {
    raise(ErrorKind::kDimensionMismatch, "instruction index out of range");
  }
  if (!dropout_mask.empty() &&
      dropout_mask.size() != static_cast<size_t>(shape.hidden)) {
    raise(ErrorKind::kDimensionMismatch, "dropout mask length mismatch");
  }
  const int h = shape.hidden;
  const double* we = params.flat.data() + shape.embed_weight_offset();
  const double* be = params.flat.data() + shape.embed_bias_offset();

  for (int i = 0; i < h; ++i) hidden_out[static_cast<size_t>(i)] = be[i];
  for (size_t c = 0; c < obs.size(); ++c) {
    const double x = obs[c];
    const double* col = we + c * static_cast<size_t>(h);
    for (int i = 0; i < h; ++i) hidden_out[static_cast<size_t>(i)] += x * col[i];
  }
  const double* instr_col =
      we + (static_cast<size_t>(shape.obs_dim) +
            static_cast<size_t>(instruction_index)) *
               static_cast<size_t>(h);
  for (int i = 0; i < h; ++i) {
    hidden_out[static_cast<size_t>(i)] =
        std::tanh(hidden_out[static_cast<size_t>(i)] + instr_col[i]);
  }
  if (!dropout_mask.empty()) {
    for (int i = 0; i < h; ++i) {
      hidden_out[static_cast<size_t>(i)] *= dropout_mask[static_cast<size_t>(i)];
    }
  }
}

void head_logits(const PolicyParams& params, int position,
                 std::span<const double> hidden,
                 std::span<const int> prev_tokens,
                 std::span<double> logits_out) {
  const PolicyShape& shape = params.shape;
  if (position < 0 || position >= shape.action_dim) {
    raise(ErrorKind::kDimensionMismatch, "head position out of range");
  }
  if (prev_tokens.size() != static_cast<size_t>(position)) {
    raise(ErrorKind::kDimensionMismatch,
          "prev_tokens must hold exactly one token per earlier position");
  }
  const int b = shape.bins;
  const double* w = params.flat.data() + shape.head_offset(position);
  const double* bias = params.flat.data() + shape.head_bias_offset(position);

  for (int v = 0; v < b; ++v) logits_out[static_cast<size_t>(v)] = bias[v];
  for (int i = 0; i < shape.hidden; ++i) {
    const double x = hidden[static_cast<size_t>(i)];
    const double* row = w + static_cast<size_t>(i) * b;
    for (int v = 0; v < b; ++v) logits_out[static_cast<size_t>(v)] += x * row[v];
  }
  for (int k = 0; k < position; ++k) {
    const int token = prev_tokens[static_cast<size_t>(k)];
    if (token < 0 || token >= b) {
      raise(ErrorKind::kDimensionMismatch, "prev token id outside bin range");
    }
    const double* row =
        w + (static_cast<size_t>(shape.hidden) +
             static_cast<size_t>(k) * b + static_cast<size_t>(token)) *
                static_cast<size_t>(b);
    for (int v = 0; v < b; ++v) logits_out[static_cast<size_t>(v)] += row[v];
  }
}

std::vector<double> forward_logits(const PolicyParams& params,
                                   std::span<const double> obs,
                                   int instruction_index,
                                   std::span<const int> prev_tokens,
                                   std::span<const double> dropout_mask) {
  std::vector<double> hidden(static_cast<size_t>(params.shape.hidden));
  embed_features(params, obs, instruction_index, dropout_mask, hidden);
  std::vector<double> logits(static_cast<size_t>(params.shape.bins));
  head_logits(params, static_cast<int>(prev_tokens.size()), hidden,
              prev_tokens, logits);
  for (double v : logits) {
    if (!std::isfinite(v)) {
      raise(ErrorKind::kNumericFailure, "non-finite logit");
    }
  }
  return logits;
}

void log_softmax_inplace(std::span<double> logits) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double v : logits) max_logit = std::max(max_logit, v);
  double z = 0.0;
  for (double v : logits) z += std::exp(v - max_logit);
  const double log_z = max_logit + std::log(z);
  for (double& v : logits) v = std::max(v - log_z, kMinLogProb);
}

std::vector<double> sample_dropout_mask(int hidden, double p,
                                        rng::Stream& stream) {
  if (p == 0.0) return {};
  if (!(p >= 0.0 && p < 1.0)) {
    raise(ErrorKind::kUsage, "dropout probability must lie in [0, 1)");
  }
  std::vector<double> mask(static_cast<size_t>(hidden));
  const double scale = 1.0 / (1.0 - p);
  for (double& m : mask) m = stream.uniform() < p ? 0.0 : scale;
  return mask;
}

}  // namespace actaudit::surrogate
