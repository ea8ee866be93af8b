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

#include "actaudit/surrogate/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "actaudit/core/errors.hpp"
#include "actaudit/core/rng.hpp"

namespace actaudit::surrogate {
namespace {

// Backward pass for one sample; returns its summed token CE. `grad` and the
// scratch buffers are caller-owned so the batch loop does not allocate.
struct Scratch {
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> dlogits;
  std::vector<double> dhidden;
};

double sample_loss_and_grad(const PolicyParams& params,
                            const EncodedSample& sample, double grad_scale,
                            std::vector<double>* grad, Scratch& scratch) {
  const PolicyShape& shape = params.shape;
  const int h = shape.hidden;
  const int b = shape.bins;
  const int d = shape.action_dim;

  scratch.hidden.resize(static_cast<size_t>(h));
  scratch.logits.resize(static_cast<size_t>(b));
  scratch.dlogits.resize(static_cast<size_t>(b));
  scratch.dhidden.assign(static_cast<size_t>(h), 0.0);

  embed_features(params, sample.obs, sample.instruction, {}, scratch.hidden);

  double loss = 0.0;
  for (int j = 0; j < d; ++j) {
    const std::span<const int> prev(sample.tokens.data(),
                                    static_cast<size_t>(j));
    head_logits(params, j, scratch.hidden, prev, scratch.logits);

    // Stable softmax; keep probabilities for the gradient.
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double v : scratch.logits) max_logit = std::max(max_logit, v);
    double z = 0.0;
    for (int v = 0; v < b; ++v) {
      scratch.dlogits[static_cast<size_t>(v)] =
          std::exp(scratch.logits[static_cast<size_t>(v)] - max_logit);
      z += scratch.dlogits[static_cast<size_t>(v)];
    }
    const int target = sample.tokens[static_cast<size_t>(j)];
    const double log_prob =
        scratch.logits[static_cast<size_t>(target)] - max_logit - std::log(z);
    loss -= log_prob;

    if (grad != nullptr) {
      double* g = grad->data();
      const double* w = params.flat.data() + shape.head_offset(j);
      double* gw = g + shape.head_offset(j);
      double* gb = g + shape.head_bias_offset(j);
      for (int v = 0; v < b; ++v) {
        scratch.dlogits[static_cast<size_t>(v)] =
            (scratch.dlogits[static_cast<size_t>(v)] / z -
             (v == target ? 1.0 : 0.0)) *
            grad_scale;
        gb[v] += scratch.dlogits[static_cast<size_t>(v)];
      }
      for (int i = 0; i < h; ++i) {
        const double x = scratch.hidden[static_cast<size_t>(i)];
        double* grow = gw + static_cast<size_t>(i) * b;
        const double* wrow = w + static_cast<size_t>(i) * b;
        double dh = 0.0;
        for (int v = 0; v < b; ++v) {
          grow[v] += x * scratch.dlogits[static_cast<size_t>(v)];
          dh += wrow[v] * scratch.dlogits[static_cast<size_t>(v)];
        }
        scratch.dhidden[static_cast<size_t>(i)] += dh;
      }
      for (int k = 0; k < j; ++k) {
        const size_t row = static_cast<size_t>(h) +
                           static_cast<size_t>(k) * b +
                           static_cast<size_t>(sample.tokens[static_cast<size_t>(k)]);
        double* grow = gw + row * static_cast<size_t>(b);
        for (int v = 0; v < b; ++v) {
          grow[v] += scratch.dlogits[static_cast<size_t>(v)];
        }
      }
    }
  }

  if (grad != nullptr) {
    // Through tanh into the shared embedding.
    double* g = grad->data();
    double* gwe = g + params.shape.embed_weight_offset();
    double* gbe = g + params.shape.embed_bias_offset();
    for (int i = 0; i < h; ++i) {
      const double hi = scratch.hidden[static_cast<size_t>(i)];
      const double dpre =
          scratch.dhidden[static_cast<size_t>(i)] * (1.0 - hi * hi);
      scratch.dhidden[static_cast<size_t>(i)] = dpre;
      gbe[i] += dpre;
    }
    for (size_t c = 0; c < sample.obs.size(); ++c) {
      const double x = sample.obs[c];
      if (x == 0.0) continue;
      double* col = gwe + c * static_cast<size_t>(h);
      for (int i = 0; i < h; ++i) {
        col[i] += x * scratch.dhidden[static_cast<size_t>(i)];
      }
    }
    double* instr_col =
        gwe + (sample.obs.size() + static_cast<size_t>(sample.instruction)) *
                  static_cast<size_t>(h);
    for (int i = 0; i < h; ++i) {
      instr_col[i] += scratch.dhidden[static_cast<size_t>(i)];
    }
  }
  return loss;
}

double holdout_l1_error(const PolicyParams& params,
                        const ActionTokenizer& tokenizer,
                        const std::vector<EncodedSample>& holdout) {
  if (holdout.empty()) return 0.0;
  const PolicyShape& shape = params.shape;
  std::vector<double> hidden(static_cast<size_t>(shape.hidden));
  std::vector<double> logits(static_cast<size_t>(shape.bins));
  std::vector<int> tokens;
  double total = 0.0;
  for (const auto& sample : holdout) {
    embed_features(params, sample.obs, sample.instruction, {}, hidden);
    tokens.clear();
    for (int j = 0; j < shape.action_dim; ++j) {
      head_logits(params, j, hidden, tokens, logits);
      tokens.push_back(static_cast<int>(
          std::max_element(logits.begin(), logits.end()) - logits.begin()));
    }
    const Action decoded = tokenizer.detokenize(tokens);
    for (size_t k = 0; k < decoded.dim(); ++k) {
      total += std::abs(decoded[k] - sample.action[k]);
    }
  }
  return total / static_cast<double>(holdout.size());
}

}  // namespace

int PolicyBundle::instruction_index(const std::string& instruction_id) const {
  for (size_t i = 0; i < instructions.size(); ++i) {
    if (instructions[i] == instruction_id) return static_cast<int>(i);
  }
  raise(ErrorKind::kUnknownUnit,
        "instruction '" + instruction_id + "' is not in the policy vocabulary");
}

std::vector<std::string> instruction_vocabulary(const Corpus& corpus) {
  std::vector<std::string> vocab;
  for (const auto& traj : corpus.trajectories) {
    if (std::find(vocab.begin(), vocab.end(), traj.instruction_id) ==
        vocab.end()) {
      vocab.push_back(traj.instruction_id);
    }
  }
  std::sort(vocab.begin(), vocab.end());
  return vocab;
}

std::vector<EncodedSample> encode_transitions(
    const Corpus& corpus, const ActionTokenizer& tokenizer,
    const std::vector<std::string>& instructions, bool members) {
  std::vector<EncodedSample> out;
  for (const auto& traj : corpus.trajectories) {
    if (traj.member != members) continue;
    const auto it =
        std::find(instructions.begin(), instructions.end(), traj.instruction_id);
    if (it == instructions.end()) {
      raise(ErrorKind::kUnknownUnit,
            "instruction '" + traj.instruction_id + "' missing from vocabulary");
    }
    const int instr = static_cast<int>(it - instructions.begin());
    for (const auto& sample : traj.samples) {
      const auto* vec = std::get_if<VectorObs>(&sample.observation);
      if (vec == nullptr) {
        raise(ErrorKind::kDimensionMismatch,
              "the surrogate policy consumes vector observations");
      }
      EncodedSample enc;
      enc.obs = vec->values;
      enc.instruction = instr;
      enc.tokens = tokenizer.tokenize(sample.action);
      enc.action = sample.action;
      out.push_back(std::move(enc));
    }
  }
  return out;
}

double dataset_loss(const PolicyParams& params,
                    const std::vector<EncodedSample>& samples) {
  if (samples.empty()) return 0.0;
  Scratch scratch;
  double total = 0.0;
  for (const auto& sample : samples) {
    total += sample_loss_and_grad(params, sample, 0.0, nullptr, scratch);
  }
  return total /
         (static_cast<double>(samples.size()) * params.shape.action_dim);
}

double batch_loss_and_grad(const PolicyParams& params,
                           const std::vector<EncodedSample>& samples,
                           const std::vector<size_t>& batch,
                           std::vector<double>* grad) {
  if (batch.empty()) {
    raise(ErrorKind::kUsage, "empty batch");
  }
  if (grad != nullptr && grad->size() != params.flat.size()) {
    raise(ErrorKind::kDimensionMismatch, "gradient buffer size mismatch");
  }
  Scratch scratch;
  const double scale =
      1.0 / (static_cast<double>(batch.size()) * params.shape.action_dim);
  double total = 0.0;
  for (size_t idx : batch) {
    total +=
        sample_loss_and_grad(params, samples[idx], scale, grad, scratch);
  }
  return total * scale;
}

std::vector<Checkpoint> train(const Corpus& corpus, const TrainConfig& config) {
  if (config.steps < 0 || config.batch_size < 1 || config.lr <= 0.0) {
    raise(ErrorKind::kUsage, "bad training configuration");
  }
  const ActionTokenizer tokenizer =
      ActionTokenizer::from_metadata(corpus.meta, config.bins_override);
  const auto instructions = instruction_vocabulary(corpus);

  const auto train_set =
      encode_transitions(corpus, tokenizer, instructions, /*members=*/true);
  if (train_set.empty()) {
    raise(ErrorKind::kInsufficientPopulation,
          "the member split has no transitions to train on");
  }
  auto holdout =
      encode_transitions(corpus, tokenizer, instructions, /*members=*/false);
  if (config.holdout_subsample > 0 &&
      holdout.size() > static_cast<size_t>(config.holdout_subsample)) {
    std::vector<size_t> order(holdout.size());
    std::iota(order.begin(), order.end(), size_t{0});
    rng::Stream stream(rng::derive(config.seed, "train/holdout"));
    stream.shuffle(order);
    std::vector<EncodedSample> subset;
    subset.reserve(static_cast<size_t>(config.holdout_subsample));
    for (int i = 0; i < config.holdout_subsample; ++i) {
      subset.push_back(holdout[order[static_cast<size_t>(i)]]);
    }
    holdout = std::move(subset);
  }

  const auto* first_obs = std::get_if<VectorObs>(
      &corpus.trajectories.front().samples.front().observation);
  if (first_obs == nullptr) {
    raise(ErrorKind::kDimensionMismatch,
          "the surrogate policy consumes vector observations");
  }
  PolicyShape shape;
  shape.obs_dim = static_cast<int>(first_obs->values.size());
  shape.n_instructions = static_cast<int>(instructions.size()) + 1;
  shape.action_dim = corpus.meta.action_dim;
  shape.bins = tokenizer.bin_count();

  PolicyParams params = init_params(
      shape, rng::derive(config.seed, "train/init"), config.dropout_p);

  const auto snapshot = [&](int step) {
    Checkpoint ckpt{PolicyBundle{params, instructions, tokenizer}, step, 0.0,
                    0.0};
    ckpt.train_loss = dataset_loss(params, train_set);
    ckpt.holdout_error = holdout_l1_error(params, tokenizer, holdout);
    return ckpt;
  };

  std::vector<Checkpoint> checkpoints;
  checkpoints.push_back(snapshot(0));

  std::vector<double> grad(params.flat.size(), 0.0);
  std::vector<double> velocity(params.flat.size(), 0.0);
  std::vector<size_t> batch(static_cast<size_t>(config.batch_size));
  rng::Stream batch_stream(rng::derive(config.seed, "train/batches"));

  for (int step = 1; step <= config.steps; ++step) {
    for (auto& idx : batch) {
      idx = static_cast<size_t>(batch_stream.uniform_int(train_set.size()));
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = batch_loss_and_grad(params, train_set, batch, &grad);
    if (!std::isfinite(loss)) {
      raise(ErrorKind::kNumericFailure,
            "training diverged at step " + std::to_string(step) +
                " (loss is not finite; try a lower learning rate)");
    }
    for (size_t i = 0; i < params.flat.size(); ++i) {
      velocity[i] = config.momentum * velocity[i] + grad[i];
      params.flat[i] -= config.lr * velocity[i];
    }
    if ((config.checkpoint_every > 0 && step % config.checkpoint_every == 0 &&
         step != config.steps) ||
        step == config.steps) {
      checkpoints.push_back(snapshot(step));
    }
  }
  return checkpoints;
}

}  // namespace actaudit::surrogate
