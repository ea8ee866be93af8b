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

#include "actaudit/cli/commands.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "actaudit/attacks/attacks.hpp"
#include "actaudit/core/errors.hpp"
#include "actaudit/core/rng.hpp"
#include "actaudit/corpus/corpus.hpp"
#include "actaudit/metrics/report.hpp"
#include "actaudit/mitigations/defended_inference.hpp"
#include "actaudit/surrogate/checkpoint.hpp"
#include "actaudit/surrogate/inference.hpp"
#include "actaudit/surrogate/train.hpp"

namespace actaudit::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kConfigEnvVar = "ACTAUDIT_CONFIG";

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Options <-> JSON (config sections, run manifests, replay)

json to_json(const GenOptions& o) {
  return {{"tasks", o.tasks},
          {"trajs_per_task", o.trajs_per_task},
          {"horizon", o.horizon},
          {"action_dim", o.action_dim},
          {"sigma_demo", o.sigma_demo},
          {"sigma_obs", o.sigma_obs},
          {"bins", o.bins},
          {"member_fraction", o.member_fraction},
          {"seed", o.seed},
          {"out_path", o.out_path}};
}

void from_json(const json& j, GenOptions& o) {
  o.tasks = j.value("tasks", o.tasks);
  o.trajs_per_task = j.value("trajs_per_task", o.trajs_per_task);
  o.horizon = j.value("horizon", o.horizon);
  o.action_dim = j.value("action_dim", o.action_dim);
  o.sigma_demo = j.value("sigma_demo", o.sigma_demo);
  o.sigma_obs = j.value("sigma_obs", o.sigma_obs);
  o.bins = j.value("bins", o.bins);
  o.member_fraction = j.value("member_fraction", o.member_fraction);
  o.seed = j.value("seed", o.seed);
  o.out_path = j.value("out_path", o.out_path);
}

json to_json(const TrainOptions& o) {
  return {{"corpus_path", o.corpus_path},
          {"out_dir", o.out_dir},
          {"steps", o.steps},
          {"lr", o.lr},
          {"batch", o.batch},
          {"momentum", o.momentum},
          {"checkpoint_every", o.checkpoint_every},
          {"bins", o.bins},
          {"dropout_p", o.dropout_p},
          {"seed", o.seed}};
}

void from_json(const json& j, TrainOptions& o) {
  o.corpus_path = j.value("corpus_path", o.corpus_path);
  o.out_dir = j.value("out_dir", o.out_dir);
  o.steps = j.value("steps", o.steps);
  o.lr = j.value("lr", o.lr);
  o.batch = j.value("batch", o.batch);
  o.momentum = j.value("momentum", o.momentum);
  o.checkpoint_every = j.value("checkpoint_every", o.checkpoint_every);
  o.bins = j.value("bins", o.bins);
  o.dropout_p = j.value("dropout_p", o.dropout_p);
  o.seed = j.value("seed", o.seed);
}

json to_json(const InferOptions& o) {
  return {{"corpus_path", o.corpus_path},
          {"checkpoint_path", o.checkpoint_path},
          {"out_path", o.out_path},
          {"manifest_path", o.manifest_path},
          {"eval_samples", o.eval_samples},
          {"eval_trajs", o.eval_trajs},
          {"disjoint", o.disjoint},
          {"prompt_mode", o.prompt_mode},
          {"defense", o.defense},
          {"access", o.access},
          {"model_tag", o.model_tag},
          {"workers", o.workers},
          {"seed", o.seed}};
}

void from_json(const json& j, InferOptions& o) {
  o.corpus_path = j.value("corpus_path", o.corpus_path);
  o.checkpoint_path = j.value("checkpoint_path", o.checkpoint_path);
  o.out_path = j.value("out_path", o.out_path);
  o.manifest_path = j.value("manifest_path", o.manifest_path);
  o.eval_samples = j.value("eval_samples", o.eval_samples);
  o.eval_trajs = j.value("eval_trajs", o.eval_trajs);
  o.disjoint = j.value("disjoint", o.disjoint);
  o.prompt_mode = j.value("prompt_mode", o.prompt_mode);
  o.defense = j.value("defense", o.defense);
  o.access = j.value("access", o.access);
  o.model_tag = j.value("model_tag", o.model_tag);
  o.workers = j.value("workers", o.workers);
  o.seed = j.value("seed", o.seed);
}

json to_json(const AttackOptions& o) {
  return {{"corpus_path", o.corpus_path},
          {"log_path", o.log_path},
          {"manifest_path", o.manifest_path},
          {"out_path", o.out_path},
          {"attack", o.attack}};
}

void from_json(const json& j, AttackOptions& o) {
  o.corpus_path = j.value("corpus_path", o.corpus_path);
  o.log_path = j.value("log_path", o.log_path);
  o.manifest_path = j.value("manifest_path", o.manifest_path);
  o.out_path = j.value("out_path", o.out_path);
  o.attack = j.value("attack", o.attack);
}

json to_json(const EvalOptions& o) {
  return {{"score_paths", o.score_paths},
          {"tags", o.tags},
          {"out_csv", o.out_csv},
          {"out_text", o.out_text}};
}

void from_json(const json& j, EvalOptions& o) {
  o.score_paths = j.value("score_paths", o.score_paths);
  o.tags = j.value("tags", o.tags);
  o.out_csv = j.value("out_csv", o.out_csv);
  o.out_text = j.value("out_text", o.out_text);
}

json to_json(const AblateOptions& o) {
  return {{"corpus_path", o.corpus_path},
          {"out_dir", o.out_dir},
          {"bins", o.bins},
          {"bins_steps", o.bins_steps},
          {"steps", o.steps},
          {"checkpoint_every", o.checkpoint_every},
          {"lr", o.lr},
          {"batch", o.batch},
          {"eval_samples", o.eval_samples},
          {"workers", o.workers},
          {"seed", o.seed}};
}

void from_json(const json& j, AblateOptions& o) {
  o.corpus_path = j.value("corpus_path", o.corpus_path);
  o.out_dir = j.value("out_dir", o.out_dir);
  o.bins = j.value("bins", o.bins);
  o.bins_steps = j.value("bins_steps", o.bins_steps);
  o.steps = j.value("steps", o.steps);
  o.checkpoint_every = j.value("checkpoint_every", o.checkpoint_every);
  o.lr = j.value("lr", o.lr);
  o.batch = j.value("batch", o.batch);
  o.eval_samples = j.value("eval_samples", o.eval_samples);
  o.workers = j.value("workers", o.workers);
  o.seed = j.value("seed", o.seed);
}

json to_json(const DefendSweepOptions& o) {
  return {{"corpus_path", o.corpus_path},
          {"checkpoint_path", o.checkpoint_path},
          {"out_dir", o.out_dir},
          {"defenses", o.defenses},
          {"eval_samples", o.eval_samples},
          {"workers", o.workers},
          {"seed", o.seed}};
}

void from_json(const json& j, DefendSweepOptions& o) {
  o.corpus_path = j.value("corpus_path", o.corpus_path);
  o.checkpoint_path = j.value("checkpoint_path", o.checkpoint_path);
  o.out_dir = j.value("out_dir", o.out_dir);
  o.defenses = j.value("defenses", o.defenses);
  o.eval_samples = j.value("eval_samples", o.eval_samples);
  o.workers = j.value("workers", o.workers);
  o.seed = j.value("seed", o.seed);
}

// ---------------------------------------------------------------------------
// Run manifests

void write_run_manifest(const std::string& command, const json& options,
                        const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs) {
  if (outputs.empty()) return;
  json manifest;
  manifest["schema"] = "run/1";
  manifest["command"] = command;
  manifest["options"] = options;
  json in_hashes = json::object();
  for (const auto& path : inputs) {
    in_hashes[path.string()] = file_content_hash(path);
  }
  json out_hashes = json::object();
  for (const auto& path : outputs) {
    out_hashes[path.string()] = file_content_hash(path);
  }
  manifest["inputs"] = std::move(in_hashes);
  manifest["outputs"] = std::move(out_hashes);

  const fs::path manifest_path = outputs.front().string() + ".run.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorKind::kIo,
          "cannot write run manifest '" + manifest_path.string() + "'");
  }
  out << manifest.dump(2) << '\n';
}

void ensure_parent_dir(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string checkpoint_filename(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt_%06d.json", step);
  return buf;
}

corpus::EvalManifest load_or_create_manifest(const Corpus& corpus,
                                             const fs::path& manifest_path,
                                             int eval_samples, int eval_trajs,
                                             bool disjoint, uint64_t seed) {
  if (fs::exists(manifest_path)) {
    return corpus::read_manifest(manifest_path);
  }
  const auto manifest = corpus::sample_eval_sets(
      corpus, eval_samples, eval_trajs, rng::derive(seed, "eval"), disjoint);
  ensure_parent_dir(manifest_path);
  corpus::write_manifest(manifest_path, manifest);
  return manifest;
}

std::vector<attacks::AttackName> attacks_for_log(const InferenceLog& log,
                                                 const std::string& selector) {
  if (selector != "all") {
    return {attacks::attack_from_string(selector)};
  }
  std::vector<attacks::AttackName> result;
  const bool fixed = log.header.prompt_mode == PromptMode::kFixed;
  for (const auto attack : attacks::all_attacks()) {
    const bool wants_fixed = attack == attacks::AttackName::kConfFix ||
                             attack == attacks::AttackName::kAggConfFix;
    if (wants_fixed == fixed) result.push_back(attack);
  }
  return result;
}

// ---------------------------------------------------------------------------
// CLI plumbing

json load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorKind::kUsage, "cannot open config '" + path.string() + "'");
  }
  json config = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (config.is_discarded() || !config.is_object()) {
    raise(ErrorKind::kUsage, "config '" + path.string() + "' is not a JSON "
                             "object");
  }
  return config;
}

// The config path must be known before CLI11 parses flags, so scan for it.
std::string find_config_arg(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) {
    return env;
  }
  return {};
}

template <typename Options>
void apply_config(const json& config, const char* section, uint64_t* seed_out,
                  Options& options) {
  if (config.contains("seed") && seed_out != nullptr) {
    *seed_out = config.at("seed").get<uint64_t>();
  }
  if (config.contains(section)) {
    from_json(config.at(section), options);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

void cmd_gen(const GenOptions& options) {
  corpus::GenerateConfig config;
  config.n_tasks = options.tasks;
  config.trajs_per_task = options.trajs_per_task;
  config.horizon = options.horizon;
  config.action_dim = options.action_dim;
  config.sigma_demo = options.sigma_demo;
  config.sigma_obs = options.sigma_obs;
  config.bin_count = options.bins;
  config.seed = rng::derive(options.seed, "corpus");

  Corpus corpus = corpus::generate_corpus(config);
  const auto plan = corpus::split_corpus(
      corpus.trajectories, options.member_fraction,
      rng::derive(options.seed, "split"));
  corpus::apply_split(corpus, plan);

  const fs::path out_path(options.out_path);
  ensure_parent_dir(out_path);
  write_corpus(out_path, corpus);
  write_run_manifest("gen", to_json(options), {}, {out_path});

  size_t samples = 0;
  for (const auto& traj : corpus.trajectories) samples += traj.length();
  std::cout << "wrote " << options.out_path << " ("
            << corpus.trajectories.size() << " trajectories, " << samples
            << " samples, " << plan.member_ids.size() << " members)\n";
}

void cmd_train(const TrainOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path);
  surrogate::TrainConfig config;
  config.steps = options.steps;
  config.lr = options.lr;
  config.batch_size = options.batch;
  config.momentum = options.momentum;
  config.checkpoint_every = options.checkpoint_every;
  config.bins_override = options.bins;
  config.dropout_p = options.dropout_p;
  config.seed = rng::derive(options.seed, "train");

  const auto checkpoints = surrogate::train(corpus, config);

  fs::create_directories(options.out_dir);
  std::vector<fs::path> outputs;
  for (const auto& ckpt : checkpoints) {
    const fs::path path =
        fs::path(options.out_dir) / checkpoint_filename(ckpt.step);
    surrogate::write_checkpoint(path, ckpt);
    outputs.push_back(path);
    std::cout << "step " << ckpt.step << ": train CE "
              << format_double(ckpt.train_loss) << " nats/token, holdout L1 "
              << format_double(ckpt.holdout_error) << " -> " << path.string()
              << "\n";
  }
  write_run_manifest("train", to_json(options), {options.corpus_path},
                     outputs);
}

void cmd_infer(const InferOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path);
  const auto checkpoint = surrogate::read_checkpoint(options.checkpoint_path);

  const fs::path out_path(options.out_path);
  const fs::path manifest_path = options.manifest_path.empty()
                                     ? fs::path(options.out_path + ".manifest.json")
                                     : fs::path(options.manifest_path);
  const auto manifest = load_or_create_manifest(
      corpus, manifest_path, options.eval_samples, options.eval_trajs,
      options.disjoint, options.seed);

  surrogate::InferenceConfig config;
  config.prompt_mode = prompt_mode_from_string(options.prompt_mode);
  config.defense = mitigations::parse_defense(options.defense);
  config.seed = rng::derive(options.seed, "defense");
  config.workers = options.workers;
  config.model_tag = options.model_tag.empty()
                         ? "surrogate@step" + std::to_string(checkpoint.step)
                         : options.model_tag;

  InferenceLog log =
      surrogate::run_inference(checkpoint.bundle, corpus, manifest, config);
  if (options.access == "blackbox") {
    for (auto& rec : log.records) {
      rec.token_logprob_rows.reset();
      rec.gt_token_logprobs.reset();
    }
  } else if (options.access != "full") {
    raise(ErrorKind::kUsage, "access must be 'full' or 'blackbox'");
  }

  ensure_parent_dir(out_path);
  write_inference_log(out_path, log);
  write_run_manifest(
      "infer", to_json(options),
      {options.corpus_path, options.checkpoint_path, manifest_path},
      {out_path});
  std::cout << "wrote " << options.out_path << " (" << log.records.size()
            << " records, prompt " << options.prompt_mode << ", defense "
            << mitigations::defense_tag(config.defense) << ")\n";
}

void cmd_attack(const AttackOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path);
  const InferenceLog log = read_inference_log(options.log_path);
  const fs::path manifest_path = options.manifest_path.empty()
                                     ? fs::path(options.log_path + ".manifest.json")
                                     : fs::path(options.manifest_path);
  const auto manifest = corpus::read_manifest(manifest_path);

  std::vector<ScoredExample> all_scores;
  size_t skipped = 0;
  for (const auto attack : attacks_for_log(log, options.attack)) {
    auto result = attacks::run_attack(attack, corpus, log, manifest);
    skipped += result.skipped_short_trajectories;
    all_scores.insert(all_scores.end(), result.scores.begin(),
                      result.scores.end());
  }

  const fs::path out_path(options.out_path);
  ensure_parent_dir(out_path);
  write_scores(out_path, all_scores);
  write_run_manifest("attack", to_json(options),
                     {options.corpus_path, options.log_path, manifest_path},
                     {out_path});
  std::cout << "wrote " << options.out_path << " (" << all_scores.size()
            << " scores)";
  if (skipped > 0) {
    std::cout << " [" << skipped
              << " trajectories too short for temporal scores]";
  }
  std::cout << "\n";
}

void cmd_eval(const EvalOptions& options) {
  if (options.score_paths.empty()) {
    raise(ErrorKind::kUsage, "eval needs at least one scores file");
  }
  if (!options.tags.empty() &&
      options.tags.size() != options.score_paths.size()) {
    raise(ErrorKind::kUsage, "--tag count must match the score files");
  }

  std::vector<metrics::ReportRow> rows;
  for (size_t i = 0; i < options.score_paths.size(); ++i) {
    const std::string tag =
        options.tags.empty() ? fs::path(options.score_paths[i]).stem().string()
                             : options.tags[i];
    const auto scores = read_scores(options.score_paths[i]);
    std::map<std::string, std::vector<ScoredExample>> by_attack;
    for (const auto& s : scores) by_attack[s.attack_name].push_back(s);
    for (const auto& [attack, group] : by_attack) {
      rows.push_back({tag, metrics::summarize(attack, group)});
    }
  }

  const std::string csv = metrics::build_report(rows, metrics::ReportFormat::kCsv);
  const std::string text =
      metrics::build_report(rows, metrics::ReportFormat::kText);
  ensure_parent_dir(options.out_csv);
  ensure_parent_dir(options.out_text);
  std::ofstream(options.out_csv, std::ios::binary | std::ios::trunc) << csv;
  std::ofstream(options.out_text, std::ios::binary | std::ios::trunc) << text;

  std::vector<fs::path> inputs(options.score_paths.begin(),
                               options.score_paths.end());
  write_run_manifest("eval", to_json(options), inputs,
                     {options.out_csv, options.out_text});
  std::cout << text;
}

void cmd_ablate(const AblateOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path);
  fs::create_directories(options.out_dir);

  const auto manifest = corpus::sample_eval_sets(
      corpus, options.eval_samples, /*n_trajs_per_class=*/0,
      rng::derive(options.seed, "eval"), /*disjoint=*/false);

  surrogate::InferenceConfig infer_config;
  infer_config.seed = rng::derive(options.seed, "defense");
  infer_config.workers = options.workers;

  const auto sample_attacks = {
      attacks::AttackName::kNll, attacks::AttackName::kConf,
      attacks::AttackName::kActionL1, attacks::AttackName::kActionMse};

  // Bin-count sweep: matched runs that differ only in the tokenizer.
  std::vector<metrics::ReportRow> bins_rows;
  for (int bins : options.bins) {
    surrogate::TrainConfig train_config;
    train_config.steps = options.bins_steps;
    train_config.lr = options.lr;
    train_config.batch_size = options.batch;
    train_config.checkpoint_every = 0;
    train_config.bins_override = bins;
    train_config.seed = rng::derive(options.seed, "train");
    const auto checkpoints = surrogate::train(corpus, train_config);
    const auto& final_ckpt = checkpoints.back();

    infer_config.model_tag = "ablate-bins" + std::to_string(bins);
    const InferenceLog log = surrogate::run_inference(
        final_ckpt.bundle, corpus, manifest, infer_config);
    for (const auto attack : sample_attacks) {
      const auto result = attacks::run_attack(attack, corpus, log, manifest);
      bins_rows.push_back(
          {"bins=" + std::to_string(bins),
           metrics::summarize(attacks::to_string(attack), result.scores)});
    }
    std::cout << "bins=" << bins << ": final train CE "
              << format_double(final_ckpt.train_loss) << "\n";
  }
  const fs::path bins_csv = fs::path(options.out_dir) / "bins_report.csv";
  const fs::path bins_text = fs::path(options.out_dir) / "bins_report.txt";
  std::ofstream(bins_csv, std::ios::binary | std::ios::trunc)
      << metrics::build_report(bins_rows, metrics::ReportFormat::kCsv);
  std::ofstream(bins_text, std::ios::binary | std::ios::trunc)
      << metrics::build_report(bins_rows, metrics::ReportFormat::kText);

  // Training-step sweep at the corpus default bin count.
  surrogate::TrainConfig train_config;
  train_config.steps = options.steps;
  train_config.lr = options.lr;
  train_config.batch_size = options.batch;
  train_config.checkpoint_every = options.checkpoint_every;
  train_config.seed = rng::derive(options.seed, "train");
  const auto checkpoints = surrogate::train(corpus, train_config);

  std::ostringstream steps_csv;
  steps_csv << "step,train_loss,holdout_error,nll_auc,action_l1_auc\n";
  for (const auto& ckpt : checkpoints) {
    infer_config.model_tag = "ablate-step" + std::to_string(ckpt.step);
    const InferenceLog log =
        surrogate::run_inference(ckpt.bundle, corpus, manifest, infer_config);
    const auto nll =
        attacks::run_attack(attacks::AttackName::kNll, corpus, log, manifest);
    const auto l1 = attacks::run_attack(attacks::AttackName::kActionL1, corpus,
                                        log, manifest);
    steps_csv << ckpt.step << ',' << format_double(ckpt.train_loss) << ','
              << format_double(ckpt.holdout_error) << ','
              << format_double(metrics::auc(nll.scores)) << ','
              << format_double(metrics::auc(l1.scores)) << '\n';
  }
  const fs::path steps_path = fs::path(options.out_dir) / "steps_report.csv";
  std::ofstream(steps_path, std::ios::binary | std::ios::trunc)
      << steps_csv.str();

  write_run_manifest("ablate", to_json(options), {options.corpus_path},
                     {bins_csv, bins_text, steps_path});
  std::cout << "wrote " << bins_csv.string() << ", " << bins_text.string()
            << ", " << steps_path.string() << "\n";
}

void cmd_defend_sweep(const DefendSweepOptions& options) {
  const Corpus corpus = read_corpus(options.corpus_path);
  const auto checkpoint = surrogate::read_checkpoint(options.checkpoint_path);
  fs::create_directories(options.out_dir);

  const auto manifest = corpus::sample_eval_sets(
      corpus, options.eval_samples, /*n_trajs_per_class=*/0,
      rng::derive(options.seed, "eval"), /*disjoint=*/false);

  std::ostringstream csv;
  csv << "defense,action_l1_auc,action_mse_auc,utility_error\n";
  for (const auto& tag : options.defenses) {
    const auto defense = mitigations::parse_defense(tag);
    const InferenceLog log = mitigations::run_defended_inference(
        checkpoint.bundle, corpus, manifest, defense,
        rng::derive(options.seed, "defense"), options.workers);
    const auto l1 = attacks::run_attack(attacks::AttackName::kActionL1, corpus,
                                        log, manifest);
    const auto mse = attacks::run_attack(attacks::AttackName::kActionMse,
                                         corpus, log, manifest);
    csv << mitigations::defense_tag(defense) << ','
        << format_double(metrics::auc(l1.scores)) << ','
        << format_double(metrics::auc(mse.scores)) << ','
        << format_double(mitigations::utility_error(log, corpus)) << '\n';
  }
  const fs::path out_path = fs::path(options.out_dir) / "defense_report.csv";
  std::ofstream(out_path, std::ios::binary | std::ios::trunc) << csv.str();
  write_run_manifest("defend-sweep", to_json(options),
                     {options.corpus_path, options.checkpoint_path},
                     {out_path});
  std::cout << csv.str();
}

// ---------------------------------------------------------------------------
// Entry point

void replay_run(const fs::path& run_manifest_path) {
  std::ifstream in(run_manifest_path, std::ios::binary);
  if (!in) {
    raise(ErrorKind::kIo,
          "cannot open run manifest '" + run_manifest_path.string() + "'");
  }
  json manifest = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (manifest.is_discarded() ||
      manifest.value("schema", std::string()) != "run/1") {
    raise(ErrorKind::kSchemaMismatch,
          run_manifest_path.string() + ": not a run manifest");
  }
  const std::string command = manifest.at("command").get<std::string>();
  const json& options = manifest.at("options");
  if (command == "gen") {
    GenOptions o;
    from_json(options, o);
    cmd_gen(o);
  } else if (command == "train") {
    TrainOptions o;
    from_json(options, o);
    cmd_train(o);
  } else if (command == "infer") {
    InferOptions o;
    from_json(options, o);
    cmd_infer(o);
  } else if (command == "attack") {
    AttackOptions o;
    from_json(options, o);
    cmd_attack(o);
  } else if (command == "eval") {
    EvalOptions o;
    from_json(options, o);
    cmd_eval(o);
  } else if (command == "ablate") {
    AblateOptions o;
    from_json(options, o);
    cmd_ablate(o);
  } else if (command == "defend-sweep") {
    DefendSweepOptions o;
    from_json(options, o);
    cmd_defend_sweep(o);
  } else {
    raise(ErrorKind::kSchemaMismatch, "unknown command '" + command + "'");
  }
}

int run_cli(int argc, const char* const* argv) {
  try {
    json config = json::object();
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) config = load_config_file(config_path);

    CLI::App app{"actaudit: membership-inference auditing for "
                 "tokenized-action policies"};
    app.require_subcommand(1);
    std::string config_flag;
    app.add_option("--config", config_flag,
                   "JSON config file (sections: corpus, train, infer, "
                   "attack, eval, ablation, defend; flags win)");

    GenOptions gen;
    apply_config(config, "corpus", &gen.seed, gen);
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic corpus");
    gen_cmd->add_option("--tasks", gen.tasks);
    gen_cmd->add_option("--trajs-per-task", gen.trajs_per_task);
    gen_cmd->add_option("--horizon", gen.horizon);
    gen_cmd->add_option("--action-dim", gen.action_dim);
    gen_cmd->add_option("--sigma-demo", gen.sigma_demo);
    gen_cmd->add_option("--sigma-obs", gen.sigma_obs);
    gen_cmd->add_option("--bins", gen.bins);
    gen_cmd->add_option("--member-fraction", gen.member_fraction);
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--out", gen.out_path);

    TrainOptions train;
    apply_config(config, "train", &train.seed, train);
    auto* train_cmd =
        app.add_subcommand("train", "train the surrogate policy");
    train_cmd->add_option("--corpus", train.corpus_path)->required();
    train_cmd->add_option("--out-dir", train.out_dir);
    train_cmd->add_option("--steps", train.steps);
    train_cmd->add_option("--lr", train.lr);
    train_cmd->add_option("--batch", train.batch);
    train_cmd->add_option("--momentum", train.momentum);
    train_cmd->add_option("--checkpoint-every", train.checkpoint_every);
    train_cmd->add_option("--bins", train.bins);
    train_cmd->add_option("--dropout-p", train.dropout_p);
    train_cmd->add_option("--seed", train.seed);

    InferOptions infer;
    apply_config(config, "infer", &infer.seed, infer);
    auto* infer_cmd =
        app.add_subcommand("infer", "run the policy and export a log");
    infer_cmd->add_option("--corpus", infer.corpus_path)->required();
    infer_cmd->add_option("--checkpoint", infer.checkpoint_path)->required();
    infer_cmd->add_option("--out", infer.out_path);
    infer_cmd->add_option("--manifest", infer.manifest_path);
    infer_cmd->add_option("--eval-samples", infer.eval_samples);
    infer_cmd->add_option("--eval-trajs", infer.eval_trajs);
    infer_cmd->add_flag("--disjoint", infer.disjoint);
    infer_cmd->add_option("--prompt-mode", infer.prompt_mode);
    infer_cmd->add_option("--defense", infer.defense);
    infer_cmd->add_option("--access", infer.access);
    infer_cmd->add_option("--model-tag", infer.model_tag);
    infer_cmd->add_option("--workers", infer.workers);
    infer_cmd->add_option("--seed", infer.seed);

    AttackOptions attack;
    apply_config(config, "attack", nullptr, attack);
    auto* attack_cmd =
        app.add_subcommand("attack", "score membership from a log");
    attack_cmd->add_option("--corpus", attack.corpus_path)->required();
    attack_cmd->add_option("--log", attack.log_path)->required();
    attack_cmd->add_option("--manifest", attack.manifest_path);
    attack_cmd->add_option("--out", attack.out_path);
    attack_cmd->add_option("--attack", attack.attack);

    EvalOptions eval;
    apply_config(config, "eval", nullptr, eval);
    auto* eval_cmd =
        app.add_subcommand("eval", "ROC/AUC report from score files");
    eval_cmd->add_option("scores", eval.score_paths, "score files");
    eval_cmd->add_option("--tag", eval.tags);
    eval_cmd->add_option("--out-csv", eval.out_csv);
    eval_cmd->add_option("--out-text", eval.out_text);

    AblateOptions ablate;
    apply_config(config, "ablation", &ablate.seed, ablate);
    auto* ablate_cmd = app.add_subcommand(
        "ablate", "bin-count and training-step sweeps");
    ablate_cmd->add_option("--corpus", ablate.corpus_path)->required();
    ablate_cmd->add_option("--out-dir", ablate.out_dir);
    ablate_cmd->add_option("--bins", ablate.bins);
    ablate_cmd->add_option("--bins-steps", ablate.bins_steps);
    ablate_cmd->add_option("--steps", ablate.steps);
    ablate_cmd->add_option("--checkpoint-every", ablate.checkpoint_every);
    ablate_cmd->add_option("--lr", ablate.lr);
    ablate_cmd->add_option("--batch", ablate.batch);
    ablate_cmd->add_option("--eval-samples", ablate.eval_samples);
    ablate_cmd->add_option("--workers", ablate.workers);
    ablate_cmd->add_option("--seed", ablate.seed);

    DefendSweepOptions defend;
    apply_config(config, "defend", &defend.seed, defend);
    auto* defend_cmd = app.add_subcommand(
        "defend-sweep", "privacy/utility trade-off across defenses");
    defend_cmd->add_option("--corpus", defend.corpus_path)->required();
    defend_cmd->add_option("--checkpoint", defend.checkpoint_path)->required();
    defend_cmd->add_option("--out-dir", defend.out_dir);
    defend_cmd->add_option("--defense", defend.defenses,
                           "repeatable, e.g. --defense gaussian:0.2");
    defend_cmd->add_option("--eval-samples", defend.eval_samples);
    defend_cmd->add_option("--workers", defend.workers);
    defend_cmd->add_option("--seed", defend.seed);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);
      app.exit(e);
      return 2;
    }

    if (gen_cmd->parsed()) {
      cmd_gen(gen);
    } else if (train_cmd->parsed()) {
      cmd_train(train);
    } else if (infer_cmd->parsed()) {
      cmd_infer(infer);
    } else if (attack_cmd->parsed()) {
      cmd_attack(attack);
    } else if (eval_cmd->parsed()) {
      cmd_eval(eval);
    } else if (ablate_cmd->parsed()) {
      cmd_ablate(ablate);
    } else if (defend_cmd->parsed()) {
      cmd_defend_sweep(defend);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.error_class() << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace actaudit::cli
