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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "actaudit/cli/commands.hpp"
#include "actaudit/core/io.hpp"

using namespace actaudit;
namespace fs = std::filesystem;

namespace {

fs::path data_file(const char* name) {
  return fs::path(ACTAUDIT_TEST_DATA_DIR) / name;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "actaudit_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"actaudit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A reduced pipeline: gen -> train -> infer -> attack -> eval.
struct PipelinePaths {
  fs::path corpus, ckpt_dir, log, scores, report_csv, report_text;
};

PipelinePaths run_small_pipeline(const fs::path& dir, uint64_t seed,
                                 int workers = 1) {
  PipelinePaths p;
  p.corpus = dir / "corpus.ndjson";
  p.ckpt_dir = dir / "ckpts";
  p.log = dir / "log.ndjson";
  p.scores = dir / "scores.ndjson";
  p.report_csv = dir / "report.csv";
  p.report_text = dir / "report.txt";
  const std::string seed_str = std::to_string(seed);
  REQUIRE(run({"gen", "--tasks", "2", "--trajs-per-task", "8", "--horizon",
               "16", "--action-dim", "3", "--bins", "16", "--seed", seed_str,
               "--out", p.corpus.string()}) == 0);
  REQUIRE(run({"train", "--corpus", p.corpus.string(), "--out-dir",
               p.ckpt_dir.string(), "--steps", "150", "--checkpoint-every",
               "0", "--seed", seed_str}) == 0);
  REQUIRE(run({"infer", "--corpus", p.corpus.string(), "--checkpoint",
               (p.ckpt_dir / "ckpt_000150.json").string(), "--out",
               p.log.string(), "--eval-samples", "30", "--eval-trajs", "4",
               "--seed", seed_str, "--workers", std::to_string(workers)}) ==
          0);
  REQUIRE(run({"attack", "--corpus", p.corpus.string(), "--log",
               p.log.string(), "--out", p.scores.string()}) == 0);
  REQUIRE(run({"eval", p.scores.string(), "--tag", "small", "--out-csv",
               p.report_csv.string(), "--out-text",
               p.report_text.string()}) == 0);
  return p;
}

}  // namespace

TEST_CASE("the full pipeline runs and is byte-deterministic under one seed") {
  const auto dir_a = fresh_dir("pipeline_a");
  const auto dir_b = fresh_dir("pipeline_b");
  const auto a = run_small_pipeline(dir_a, 7);
  const auto b = run_small_pipeline(dir_b, 7);
  CHECK(file_content_hash(a.corpus) == file_content_hash(b.corpus));
  CHECK(file_content_hash(a.log) == file_content_hash(b.log));
  CHECK(file_content_hash(a.scores) == file_content_hash(b.scores));
  CHECK(read_file(a.report_csv) == read_file(b.report_csv));
  CHECK(read_file(a.report_text) == read_file(b.report_text));
}

TEST_CASE("worker count does not change inference output") {
  const auto dir_a = fresh_dir("workers_1");
  const auto dir_b = fresh_dir("workers_4");
  const auto a = run_small_pipeline(dir_a, 11, /*workers=*/1);
  const auto b = run_small_pipeline(dir_b, 11, /*workers=*/4);
  CHECK(file_content_hash(a.log) == file_content_hash(b.log));
  CHECK(read_file(a.report_csv) == read_file(b.report_csv));
}

TEST_CASE("NLL against a black-box log exits with the access-regime code") {
  const auto dir = fresh_dir("blackbox");
  const auto p = run_small_pipeline(dir, 13);
  const auto bb_log = dir / "blackbox.ndjson";
  REQUIRE(run({"infer", "--corpus", p.corpus.string(), "--checkpoint",
               (p.ckpt_dir / "ckpt_000150.json").string(), "--out",
               bb_log.string(), "--manifest",
               (p.log.string() + ".manifest.json"), "--access", "blackbox",
               "--seed", "13"}) == 0);

  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = run({"attack", "--corpus", p.corpus.string(), "--log",
                        bb_log.string(), "--manifest",
                        (p.log.string() + ".manifest.json"), "--attack",
                        "NLL", "--out", (dir / "nll.ndjson").string()});
  std::cerr.rdbuf(old);
  CHECK(code == 4);
  CHECK(captured.str().find("ACCESS_REGIME") != std::string::npos);

  // Black-box attacks still succeed on the stripped log.
  CHECK(run({"attack", "--corpus", p.corpus.string(), "--log",
             bb_log.string(), "--manifest",
             (p.log.string() + ".manifest.json"), "--attack", "ActionL1",
             "--out", (dir / "l1.ndjson").string()}) == 0);
}

TEST_CASE("missing input files exit non-zero with a machine-parsable class") {
  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = run({"train", "--corpus", "/nonexistent/corpus.ndjson"});
  std::cerr.rdbuf(old);
  CHECK(code == 2);
  CHECK(captured.str().rfind("error: IO:", 0) == 0);
}

TEST_CASE("usage errors exit with code 2") {
  std::ostringstream captured;
  auto* old_err = std::cerr.rdbuf(captured.rdbuf());
  const int code = run({"train"});  // missing required --corpus
  std::cerr.rdbuf(old_err);
  CHECK(code == 2);
}

TEST_CASE("eval on the frozen scores fixture reproduces the frozen report") {
  const auto dir = fresh_dir("golden_eval");
  const auto csv = dir / "report.csv";
  const auto text = dir / "report.txt";
  REQUIRE(run({"eval", data_file("golden_scores.ndjson").string(), "--tag",
               "golden", "--out-csv", csv.string(), "--out-text",
               text.string()}) == 0);
  CHECK(read_file(csv) == read_file(data_file("golden_report.csv")));
  CHECK(read_file(text) == read_file(data_file("golden_report.txt")));
}

TEST_CASE("a run manifest alone suffices to re-execute the run") {
  const auto dir = fresh_dir("replay");
  const auto p = run_small_pipeline(dir, 17);
  const auto scores_hash = file_content_hash(p.scores);
  fs::remove(p.scores);
  cli::replay_run(p.scores.string() + ".run.json");
  CHECK(file_content_hash(p.scores) == scores_hash);
}

TEST_CASE("config files provide defaults and flags win") {
  const auto dir = fresh_dir("config");
  const auto config_path = dir / "config.json";
  const auto out_from_config = dir / "from_config.ndjson";
  {
    std::ofstream out(config_path);
    out << R"({"seed": 21, "corpus": {"tasks": 2, "trajs_per_task": 4,)"
        << R"("horizon": 10, "action_dim": 3, "out_path": ")"
        << out_from_config.string() << R"("}})";
  }
  REQUIRE(run({"--config", config_path.string(), "gen"}) == 0);
  const Corpus from_config = read_corpus(out_from_config);
  CHECK(from_config.trajectories.size() == 8);  // 2 tasks x 4 trajs

  // A flag overrides the config value for the same key.
  const auto out_override = dir / "override.ndjson";
  REQUIRE(run({"--config", config_path.string(), "gen", "--trajs-per-task",
               "6", "--out", out_override.string()}) == 0);
  CHECK(read_corpus(out_override).trajectories.size() == 12);
}

TEST_CASE("fixed-prompt logs feed the fixed-prompt attacks") {
  const auto dir = fresh_dir("fixed_prompt");
  const auto p = run_small_pipeline(dir, 23);
  const auto fixed_log = dir / "fixed.ndjson";
  REQUIRE(run({"infer", "--corpus", p.corpus.string(), "--checkpoint",
               (p.ckpt_dir / "ckpt_000150.json").string(), "--out",
               fixed_log.string(), "--manifest",
               (p.log.string() + ".manifest.json"), "--prompt-mode", "fixed",
               "--seed", "23"}) == 0);
  const auto fixed_scores = dir / "fixed_scores.ndjson";
  REQUIRE(run({"attack", "--corpus", p.corpus.string(), "--log",
               fixed_log.string(), "--manifest",
               (p.log.string() + ".manifest.json"), "--out",
               fixed_scores.string()}) == 0);
  const auto scores = read_scores(fixed_scores);
  REQUIRE(!scores.empty());
  for (const auto& s : scores) {
    CHECK((s.attack_name == "ConfFix" || s.attack_name == "AggConfFix"));
  }
}

TEST_CASE("defend-sweep emits the trade-off table") {
  const auto dir = fresh_dir("defend");
  const auto p = run_small_pipeline(dir, 29);
  REQUIRE(run({"defend-sweep", "--corpus", p.corpus.string(), "--checkpoint",
               (p.ckpt_dir / "ckpt_000150.json").string(), "--out-dir",
               (dir / "sweep").string(), "--defense", "gaussian:0",
               "--defense", "gaussian:0.2", "--eval-samples", "20", "--seed",
               "29"}) == 0);
  const std::string csv = read_file(dir / "sweep" / "defense_report.csv");
  CHECK(csv.rfind("defense,action_l1_auc,action_mse_auc,utility_error\n", 0)
        == 0);
  CHECK(csv.find("gaussian:0.2") != std::string::npos);
}
