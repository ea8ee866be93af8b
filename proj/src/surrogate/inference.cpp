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

#include "actaudit/surrogate/inference.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>
#include <unordered_map>

#include "actaudit/core/errors.hpp"
#include "actaudit/core/rng.hpp"

namespace actaudit::surrogate {
namespace {

using mitigations::DefenseKind;

struct Unit {
  const Trajectory* trajectory = nullptr;
  int step = 0;
};

InferenceRecord process_unit(const PolicyBundle& bundle, const Unit& unit,
                             const InferenceConfig& config,
                             const std::string& defense_tag) {
  const TransitionSample& sample =
      unit.trajectory->samples[static_cast<size_t>(unit.step)];
  const PolicyParams& params = bundle.params;
  const PolicyShape& shape = params.shape;
  const auto& defense = config.defense;

  const std::string unit_id =
      sample_unit_id(unit.trajectory->trajectory_id, unit.step);
  rng::Stream stream(rng::derive(config.seed, "defense/" + defense_tag,
                                 unit_id, 0));

  Observation observation = sample.observation;
  if (defense.kind == DefenseKind::kJitter) {
    observation = defend_obs_jitter(observation, defense.jitter, stream);
  }
  const auto* vec = std::get_if<VectorObs>(&observation);
  if (vec == nullptr) {
    raise(ErrorKind::kDimensionMismatch,
          "the surrogate policy consumes vector observations");
  }
  const std::span<const double> features(vec->values);

  const int instruction =
      config.prompt_mode == PromptMode::kOriginal
          ? bundle.instruction_index(unit.trajectory->instruction_id)
          : bundle.generic_instruction_index();

  const bool mc_dropout = defense.kind == DefenseKind::kMcDropout &&
                          defense.dropout_p > 0.0;
  const auto mask = [&]() -> std::vector<double> {
    return mc_dropout
               ? sample_dropout_mask(shape.hidden, defense.dropout_p, stream)
               : std::vector<double>{};
  };

  InferenceRecord record;
  record.trajectory_id = unit.trajectory->trajectory_id;
  record.step_index = unit.step;
  record.prompt_mode = config.prompt_mode;

  // Autoregressive generation; rows are conditioned on the generated prefix.
  std::vector<std::vector<double>> rows;
  std::vector<int> tokens;
  rows.reserve(static_cast<size_t>(shape.action_dim));
  for (int j = 0; j < shape.action_dim; ++j) {
    auto row = forward_logits(params, features, instruction, tokens, mask());
    log_softmax_inplace(row);
    int token;
    if (defense.kind == DefenseKind::kDecode) {
      auto draw = mitigations::defend_decode(row, defense.temperature,
                                             defense.top_p, stream);
      token = draw.token;
      row = std::move(draw.post_temperature_logprobs);
    } else {
      token = static_cast<int>(
          std::max_element(row.begin(), row.end()) - row.begin());
    }
    rows.push_back(std::move(row));
    tokens.push_back(token);
  }

  Action generated = bundle.tokenizer.detokenize(tokens);
  if (defense.kind == DefenseKind::kGaussian) {
    generated = mitigations::defend_gaussian(generated, defense.sigma, stream);
  } else if (defense.kind == DefenseKind::kRound) {
    generated = mitigations::defend_round(generated, defense.delta);
  }
  record.generated_action = std::move(generated);
  record.token_logprob_rows = std::move(rows);

  // Teacher-forced pass over the ground-truth token prefix.
  const std::vector<int> gt_tokens = bundle.tokenizer.tokenize(sample.action);
  std::vector<double> gt_logprobs;
  gt_logprobs.reserve(gt_tokens.size());
  for (int j = 0; j < shape.action_dim; ++j) {
    const std::span<const int> prefix(gt_tokens.data(),
                                      static_cast<size_t>(j));
    auto row = forward_logits(params, features, instruction, prefix, mask());
    log_softmax_inplace(row);
    if (defense.kind == DefenseKind::kDecode) {
      row = mitigations::temperature_rescale(row, defense.temperature);
    }
    gt_logprobs.push_back(
        std::min(row[static_cast<size_t>(gt_tokens[static_cast<size_t>(j)])],
                 0.0));
  }
  record.gt_token_logprobs = std::move(gt_logprobs);
  return record;
}

}  // namespace

InferenceLog run_inference(const PolicyBundle& bundle, const Corpus& corpus,
                           const corpus::EvalManifest& manifest,
                           const InferenceConfig& config) {
  std::unordered_map<std::string, const Trajectory*> by_id;
  for (const auto& traj : corpus.trajectories) {
    by_id.emplace(traj.trajectory_id, &traj);
  }
  const auto lookup = [&](const std::string& id) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      raise(ErrorKind::kUnknownUnit,
            "unknown trajectory id '" + id + "' in evaluation manifest");
    }
    return it->second;
  };

  // Deduplicated, canonically ordered unit set: every sampled transition
  // plus every step of every sampled trajectory.
  std::set<std::pair<std::string, int>> keys;
  for (const auto* list : {&manifest.member_samples,
                           &manifest.nonmember_samples}) {
    for (const auto& unit : *list) {
      const auto [traj_id, step] = parse_sample_unit_id(unit);
      const Trajectory* traj = lookup(traj_id);
      if (step < 0 || static_cast<size_t>(step) >= traj->length()) {
        raise(ErrorKind::kUnknownUnit,
              "manifest unit '" + unit + "' is outside the trajectory");
      }
      keys.emplace(traj_id, step);
    }
  }
  for (const auto* list : {&manifest.member_trajs,
                           &manifest.nonmember_trajs}) {
    for (const auto& traj_id : *list) {
      const Trajectory* traj = lookup(traj_id);
      for (const auto& sample : traj->samples) {
        keys.emplace(traj_id, sample.step_index);
      }
    }
  }

  std::vector<Unit> units;
  units.reserve(keys.size());
  for (const auto& [traj_id, step] : keys) {
    units.push_back({by_id.at(traj_id), step});
  }

  const std::string tag = mitigations::defense_tag(config.defense);
  InferenceLog log;
  log.header.model_tag = config.model_tag;
  log.header.prompt_mode = config.prompt_mode;
  // Identity settings must reproduce the undefended log bit for bit, so
  // only effective defenses are tagged in the header.
  if (!config.defense.is_identity()) log.header.defense = tag;
  log.records.resize(units.size());

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    for (size_t i = 0; i < units.size(); ++i) {
      log.records[i] = process_unit(bundle, units[i], config, tag);
    }
    return log;
  }

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> failures(static_cast<size_t>(workers));
  const size_t chunk = (units.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const size_t begin = static_cast<size_t>(w) * chunk;
    const size_t end = std::min(units.size(), begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        for (size_t i = begin; i < end; ++i) {
          log.records[i] = process_unit(bundle, units[i], config, tag);
        }
      } catch (...) {
        failures[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return log;
}

}  // namespace actaudit::surrogate
