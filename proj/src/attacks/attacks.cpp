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

#include "actaudit/attacks/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "actaudit/core/errors.hpp"

namespace actaudit::attacks {
namespace {

double l2_norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

const InferenceRecord& record_for(const InferenceLog& log,
                                  const std::unordered_map<std::string,
                                                           size_t>& index,
                                  const std::string& unit_id) {
  const auto it = index.find(unit_id);
  if (it == index.end()) {
    raise(ErrorKind::kMissingRecord,
          "inference log has no record for manifest unit '" + unit_id + "'");
  }
  return log.records[it->second];
}

const Trajectory& trajectory_for(const Corpus& corpus,
                                 const std::string& trajectory_id) {
  const Trajectory* traj = corpus.find_trajectory(trajectory_id);
  if (traj == nullptr) {
    raise(ErrorKind::kUnknownUnit,
          "corpus has no trajectory '" + trajectory_id + "'");
  }
  return *traj;
}

void check_prompt_mode(AttackName attack, const InferenceLog& log) {
  const bool wants_fixed =
      attack == AttackName::kConfFix || attack == AttackName::kAggConfFix;
  const bool log_fixed = log.header.prompt_mode == PromptMode::kFixed;
  if (wants_fixed != log_fixed) {
    raise(ErrorKind::kPromptModeMismatch,
          std::string(to_string(attack)) + " requires a " +
              (wants_fixed ? "fixed" : "original") + "-prompt log, got " +
              to_string(log.header.prompt_mode));
  }
}

// The sample-level score underlying an aggregated trajectory attack.
AttackName base_attack(AttackName attack) {
  switch (attack) {
    case AttackName::kAggNll:
      return AttackName::kNll;
    case AttackName::kAggConf:
      return AttackName::kConf;
    case AttackName::kAggConfFix:
      return AttackName::kConfFix;
    case AttackName::kAggActionL1:
      return AttackName::kActionL1;
    case AttackName::kAggActionMse:
      return AttackName::kActionMse;
    default:
      return attack;
  }
}

double sample_score(AttackName attack, const InferenceRecord& record,
                    const Action& gt) {
  switch (attack) {
    case AttackName::kNll:
      return score_nll(record);
    case AttackName::kConf:
      return score_conf(record);
    case AttackName::kConfFix:
      return score_conf_fix(record);
    case AttackName::kActionL1:
      return score_action_l1(record, gt);
    case AttackName::kActionMse:
      return score_action_mse(record, gt);
    default:
      raise(ErrorKind::kUsage, "not a sample-level attack");
  }
}

}  // namespace

const char* to_string(AttackName attack) {
  switch (attack) {
    case AttackName::kNll:
      return "NLL";
    case AttackName::kConf:
      return "Conf";
    case AttackName::kConfFix:
      return "ConfFix";
    case AttackName::kActionL1:
      return "ActionL1";
    case AttackName::kActionMse:
      return "ActionMSE";
    case AttackName::kAggNll:
      return "AggNLL";
    case AttackName::kAggConf:
      return "AggConf";
    case AttackName::kAggConfFix:
      return "AggConfFix";
    case AttackName::kAggActionL1:
      return "AggActionL1";
    case AttackName::kAggActionMse:
      return "AggActionMSE";
    case AttackName::kTempSmooth:
      return "TempSmooth";
    case AttackName::kTempCurv:
      return "TempCurv";
  }
  return "unknown";
}

const std::vector<AttackName>& all_attacks() {
  static const std::vector<AttackName> attacks = {
      AttackName::kNll,         AttackName::kConf,
      AttackName::kConfFix,     AttackName::kActionL1,
      AttackName::kActionMse,   AttackName::kAggNll,
      AttackName::kAggConf,     AttackName::kAggConfFix,
      AttackName::kAggActionL1, AttackName::kAggActionMse,
      AttackName::kTempSmooth,  AttackName::kTempCurv};
  return attacks;
}

AttackName attack_from_string(const std::string& name) {
  for (AttackName attack : all_attacks()) {
    if (name == to_string(attack)) return attack;
  }
  raise(ErrorKind::kUsage, "unknown attack '" + name + "'");
}

bool is_trajectory_attack(AttackName attack) {
  switch (attack) {
    case AttackName::kNll:
    case AttackName::kConf:
    case AttackName::kConfFix:
    case AttackName::kActionL1:
    case AttackName::kActionMse:
      return false;
    default:
      return true;
  }
}

AccessRegime access_regime(AttackName attack) {
  switch (base_attack(attack)) {
    case AttackName::kNll:
      return {.original_instruction = true,
              .ground_truth_action = true,
              .token_probabilities = true,
              .generated_action = false};
    case AttackName::kConf:
      return {.original_instruction = true,
              .ground_truth_action = false,
              .token_probabilities = true,
              .generated_action = true};
    case AttackName::kConfFix:
      return {.original_instruction = false,
              .ground_truth_action = false,
              .token_probabilities = true,
              .generated_action = true};
    case AttackName::kActionL1:
    case AttackName::kActionMse:
      return {.original_instruction = true,
              .ground_truth_action = true,
              .token_probabilities = false,
              .generated_action = true};
    case AttackName::kTempSmooth:
    case AttackName::kTempCurv:
      return {.original_instruction = true,
              .ground_truth_action = false,
              .token_probabilities = false,
              .generated_action = true};
    default:
      raise(ErrorKind::kUsage, "unmapped attack");
  }
}

double score_nll(const InferenceRecord& record) {
  if (!record.gt_token_logprobs || record.gt_token_logprobs->empty()) {
    raise(ErrorKind::kAccessRegimeViolation,
          "NLL needs teacher-forced ground-truth token log-probabilities");
  }
  double sum = 0.0;
  for (double lp : *record.gt_token_logprobs) {
    sum += std::max(lp, kLogProbFloor);
  }
  return sum / static_cast<double>(record.gt_token_logprobs->size());
}

double score_conf(const InferenceRecord& record) {
  if (!record.token_logprob_rows || record.token_logprob_rows->empty()) {
    raise(ErrorKind::kAccessRegimeViolation,
          "Conf needs per-step token log-probability rows");
  }
  double sum = 0.0;
  for (const auto& row : *record.token_logprob_rows) {
    double best = -std::numeric_limits<double>::infinity();
    for (double lp : row) best = std::max(best, lp);
    sum += std::max(best, kLogProbFloor);
  }
  return sum / static_cast<double>(record.token_logprob_rows->size());
}

double score_conf_fix(const InferenceRecord& record) {
  if (record.prompt_mode != PromptMode::kFixed) {
    raise(ErrorKind::kPromptModeMismatch,
          "ConfFix requires a fixed-prompt record");
  }
  return score_conf(record);
}

double score_action_l1(const InferenceRecord& record, const Action& gt) {
  if (record.generated_action.dim() != gt.dim()) {
    raise(ErrorKind::kDimensionMismatch,
          "generated/ground-truth action dimension mismatch");
  }
  double sum = 0.0;
  for (size_t k = 0; k < gt.dim(); ++k) {
    sum += std::abs(record.generated_action[k] - gt[k]);
  }
  return -sum;
}

double score_action_mse(const InferenceRecord& record, const Action& gt) {
  if (record.generated_action.dim() != gt.dim()) {
    raise(ErrorKind::kDimensionMismatch,
          "generated/ground-truth action dimension mismatch");
  }
  double sum = 0.0;
  for (size_t k = 0; k < gt.dim(); ++k) {
    const double diff = record.generated_action[k] - gt[k];
    sum += diff * diff;
  }
  return -sum / static_cast<double>(gt.dim());
}

double score_traj_agg(const std::vector<double>& sample_scores) {
  if (sample_scores.empty()) {
    raise(ErrorKind::kEmptyTrajectory,
          "cannot aggregate an empty score list");
  }
  double sum = 0.0;
  for (double s : sample_scores) sum += s;
  return sum / static_cast<double>(sample_scores.size());
}

double score_temp_smooth(const std::vector<Action>& generated) {
  if (generated.size() < 2) {
    raise(ErrorKind::kTrajectoryTooShort,
          "temporal smoothness needs at least 2 steps");
  }
  std::vector<double> diff(generated.front().dim());
  double sum = 0.0;
  for (size_t t = 1; t < generated.size(); ++t) {
    for (size_t k = 0; k < diff.size(); ++k) {
      diff[k] = generated[t][k] - generated[t - 1][k];
    }
    sum += l2_norm(diff);
  }
  return -sum / static_cast<double>(generated.size() - 1);
}

double score_temp_curv(const std::vector<Action>& generated) {
  if (generated.size() < 3) {
    raise(ErrorKind::kTrajectoryTooShort,
          "temporal curvature needs at least 3 steps");
  }
  std::vector<double> diff(generated.front().dim());
  double sum = 0.0;
  for (size_t t = 2; t < generated.size(); ++t) {
    for (size_t k = 0; k < diff.size(); ++k) {
      diff[k] = generated[t][k] - 2.0 * generated[t - 1][k] +
                generated[t - 2][k];
    }
    sum += l2_norm(diff);
  }
  return -sum / static_cast<double>(generated.size() - 2);
}

AttackResult run_attack(AttackName attack, const Corpus& corpus,
                        const InferenceLog& log,
                        const corpus::EvalManifest& manifest) {
  check_prompt_mode(attack, log);
  const auto index = build_record_index(log);
  const std::string attack_name = to_string(attack);

  AttackResult result;
  if (!is_trajectory_attack(attack)) {
    for (const auto* units : {&manifest.member_samples,
                              &manifest.nonmember_samples}) {
      for (const auto& unit_id : *units) {
        const auto [traj_id, step] = parse_sample_unit_id(unit_id);
        const Trajectory& traj = trajectory_for(corpus, traj_id);
        if (step < 0 || static_cast<size_t>(step) >= traj.length()) {
          raise(ErrorKind::kUnknownUnit,
                "manifest unit '" + unit_id + "' is outside the trajectory");
        }
        const InferenceRecord& record = record_for(log, index, unit_id);
        const Action& gt = traj.samples[static_cast<size_t>(step)].action;
        result.scores.push_back({unit_id, attack_name,
                                 sample_score(attack, record, gt),
                                 traj.member});
      }
    }
  } else {
    const AttackName base = base_attack(attack);
    const bool temporal = attack == AttackName::kTempSmooth ||
                          attack == AttackName::kTempCurv;
    const size_t min_length = attack == AttackName::kTempCurv ? 3
                              : attack == AttackName::kTempSmooth ? 2
                                                                  : 1;
    for (const auto* units : {&manifest.member_trajs,
                              &manifest.nonmember_trajs}) {
      for (const auto& traj_id : *units) {
        const Trajectory& traj = trajectory_for(corpus, traj_id);
        if (traj.length() < min_length) {
          ++result.skipped_short_trajectories;
          continue;
        }
        double score = 0.0;
        if (temporal) {
          std::vector<Action> generated;
          generated.reserve(traj.length());
          for (const auto& sample : traj.samples) {
            const InferenceRecord& record = record_for(
                log, index, sample_unit_id(traj_id, sample.step_index));
            generated.push_back(record.generated_action);
          }
          score = attack == AttackName::kTempSmooth
                      ? score_temp_smooth(generated)
                      : score_temp_curv(generated);
        } else {
          std::vector<double> sample_scores;
          sample_scores.reserve(traj.length());
          for (const auto& sample : traj.samples) {
            const InferenceRecord& record = record_for(
                log, index, sample_unit_id(traj_id, sample.step_index));
            sample_scores.push_back(
                sample_score(base, record, sample.action));
          }
          score = score_traj_agg(sample_scores);
        }
        result.scores.push_back({traj_id, attack_name, score, traj.member});
      }
    }
  }

  std::sort(result.scores.begin(), result.scores.end(),
            [](const ScoredExample& a, const ScoredExample& b) {
              return a.unit_id < b.unit_id;
            });
  return result;
}

}  // namespace actaudit::attacks
