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

#ifndef ACTAUDIT_CLI_COMMANDS_HPP
#define ACTAUDIT_CLI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace actaudit::cli {

// Subcommands: gen, train, infer, attack, eval, ablate, defend-sweep.
// Every run writes `<primary output>.run.json` capturing the resolved
// options and content hashes of inputs and outputs; a run manifest alone
// suffices to re-execute the run (see replay_run).
//
// Exit codes: 0 success, 2 usage, 3 schema/data, 4 access regime,
// 5 numeric failure.

struct GenOptions {
  int tasks = 4;
  int trajs_per_task = 50;
  int horizon = 60;
  int action_dim = 7;
  double sigma_demo = 0.05;
  double sigma_obs = 0.01;
  int bins = 256;
  double member_fraction = 0.5;
  uint64_t seed = 7;
  std::string out_path = "corpus.ndjson";
};

struct TrainOptions {
  std::string corpus_path;
  std::string out_dir = "checkpoints";
  int steps = 3000;
  double lr = 0.05;
  int batch = 64;
  double momentum = 0.9;
  int checkpoint_every = 500;
  int bins = 0;  // 0: corpus default
  double dropout_p = 0.0;
  uint64_t seed = 7;
};

struct InferOptions {
  std::string corpus_path;
  std::string checkpoint_path;
  std::string out_path = "inference.ndjson";
  std::string manifest_path;  // default: <out_path>.manifest.json
  int eval_samples = 600;     // per class
  int eval_trajs = 25;        // per class
  bool disjoint = false;
  std::string prompt_mode = "original";
  std::string defense = "none";
  std::string access = "full";  // or "blackbox": strip probability fields
  std::string model_tag;
  int workers = 1;
  uint64_t seed = 7;
};

struct AttackOptions {
  std::string corpus_path;
  std::string log_path;
  std::string manifest_path;
  std::string out_path = "scores.ndjson";
  std::string attack = "all";  // one AttackName or "all"
};

struct EvalOptions {
  std::vector<std::string> score_paths;
  std::vector<std::string> tags;  // parallel to score_paths; default: stem
  std::string out_csv = "report.csv";
  std::string out_text = "report.txt";
};

// Both sweeps evaluate at sample granularity (the ablation figures are
// sample-level), so their manifests request no whole trajectories.
struct AblateOptions {
  std::string corpus_path;
  std::string out_dir = "ablation";
  std::vector<int> bins = {64, 256, 512};
  int bins_steps = 600;  // training steps for the bin-count sweep
  int steps = 3000;      // training steps for the checkpoint sweep
  int checkpoint_every = 500;
  double lr = 0.05;
  int batch = 64;
  int eval_samples = 600;
  int workers = 1;
  uint64_t seed = 7;
};

struct DefendSweepOptions {
  std::string corpus_path;
  std::string checkpoint_path;
  std::string out_dir = "defense_sweep";
  std::vector<std::string> defenses = {"gaussian:0", "gaussian:0.1",
                                       "gaussian:0.2", "gaussian:0.5"};
  int eval_samples = 600;
  int workers = 1;
  uint64_t seed = 7;
};

void cmd_gen(const GenOptions& options);
void cmd_train(const TrainOptions& options);
void cmd_infer(const InferOptions& options);
void cmd_attack(const AttackOptions& options);
void cmd_eval(const EvalOptions& options);
void cmd_ablate(const AblateOptions& options);
void cmd_defend_sweep(const DefendSweepOptions& options);

// Full CLI entry point; catches toolkit errors and prints one
// machine-parsable line: "error: <CLASS>: <message>".
int run_cli(int argc, const char* const* argv);

// Re-execute a run from its manifest.
void replay_run(const std::filesystem::path& run_manifest_path);

}  // namespace actaudit::cli

#endif  // ACTAUDIT_CLI_COMMANDS_HPP
