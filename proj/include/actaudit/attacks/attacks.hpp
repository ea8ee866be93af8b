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

#ifndef ACTAUDIT_ATTACKS_ATTACKS_HPP
#define ACTAUDIT_ATTACKS_ATTACKS_HPP

#include <string>
#include <vector>

#include "actaudit/core/io.hpp"
#include "actaudit/core/types.hpp"
#include "actaudit/corpus/corpus.hpp"

namespace actaudit::attacks {

// The attack suite. Sample-level scores read one inference record;
// trajectory-level scores either aggregate sample scores over all
// transitions (Agg*) or read only the generated action sequence (Temp*).
enum class AttackName {
  kNll,
  kConf,
  kConfFix,
  kActionL1,
  kActionMse,
  kAggNll,
  kAggConf,
  kAggConfFix,
  kAggActionL1,
  kAggActionMse,
  kTempSmooth,
  kTempCurv,
};

const char* to_string(AttackName attack);
AttackName attack_from_string(const std::string& name);
const std::vector<AttackName>& all_attacks();

bool is_trajectory_attack(AttackName attack);

// Access-regime columns: which log fields an attack is allowed to touch.
struct AccessRegime {
  bool original_instruction = false;
  bool ground_truth_action = false;
  bool token_probabilities = false;
  bool generated_action = false;

  bool black_box() const { return !token_probabilities; }
};
AccessRegime access_regime(AttackName attack);

// Log-probabilities below ln(1e-12) are floored before averaging so scores
// stay finite on zero-probability tokens.
inline constexpr double kLogProbFloor = -27.631021115928547;  // ln(1e-12)

// Mean teacher-forced log-likelihood of the ground-truth tokens.
double score_nll(const InferenceRecord& record);

// Mean over decoding steps of the maximum log-probability, conditioned on
// the generated prefix.
double score_conf(const InferenceRecord& record);

// score_conf arithmetic, but only defined for fixed-prompt records.
double score_conf_fix(const InferenceRecord& record);

// Negative action errors: -(L1 distance) and -(mean squared error).
double score_action_l1(const InferenceRecord& record, const Action& gt);
double score_action_mse(const InferenceRecord& record, const Action& gt);

// Arithmetic mean of sample scores over a trajectory.
double score_traj_agg(const std::vector<double>& sample_scores);

// Negative mean first/second-order differences of the generated sequence.
double score_temp_smooth(const std::vector<Action>& generated);
double score_temp_curv(const std::vector<Action>& generated);

struct AttackResult {
  std::vector<ScoredExample> scores;  // ordered by unit_id
  size_t skipped_short_trajectories = 0;
};

// Scores every manifest unit for one attack, attaching ground-truth
// membership from the corpus. Enforces the access regime: a missing
// required field raises AccessRegimeViolation, and fields outside the
// attack's regime are never read. Trajectories too short for a temporal
// score are excluded and counted, never scored 0.
AttackResult run_attack(AttackName attack, const Corpus& corpus,
                        const InferenceLog& log,
                        const corpus::EvalManifest& manifest);

}  // namespace actaudit::attacks

#endif  // ACTAUDIT_ATTACKS_ATTACKS_HPP
