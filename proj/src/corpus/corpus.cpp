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

#include "actaudit/corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "actaudit/core/errors.hpp"
#include "actaudit/core/rng.hpp"

namespace actaudit::corpus {
namespace {

using json = nlohmann::json;

double cubic_ease(double u) { return u * u * (3.0 - 2.0 * u); }

std::string task_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "t%02d", index);
  return buf;
}

std::string traj_name(const std::string& task_id, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_r%03d", index);
  return task_id + buf;
}

}  // namespace

std::vector<double> reference_position(const TaskSpec& task, int t) {
  const double u =
      static_cast<double>(t) / static_cast<double>(task.horizon);
  const double e = cubic_ease(u);
  std::vector<double> pos(task.start.size());
  for (size_t i = 0; i < pos.size(); ++i) {
    pos[i] = task.start[i] + e * (task.goal[i] - task.start[i]);
  }
  return pos;
}

Corpus generate_corpus(const GenerateConfig& config) {
  if (config.action_dim < 2) {
    raise(ErrorKind::kUsage,
          "action_dim must be >= 2 (motion dimensions plus gripper)");
  }
  if (config.n_tasks < 2 || config.trajs_per_task < 2) {
    raise(ErrorKind::kUsage,
          "need at least 2 tasks and 2 trajectories per task");
  }
  if (config.horizon < 8) {
    raise(ErrorKind::kUsage, "horizon must be >= 8");
  }
  if (config.sigma_demo < 0.0 || config.sigma_obs < 0.0) {
    raise(ErrorKind::kUsage, "noise scales must be non-negative");
  }
  if (config.bin_count < 2) {
    raise(ErrorKind::kUsage, "bin_count must be >= 2");
  }

  const int d = config.action_dim;
  const int d_pos = d - 1;
  const int horizon = config.horizon;

  Corpus corpus;
  corpus.meta.action_dim = d;
  corpus.meta.bin_count = config.bin_count;
  corpus.meta.vocab_size = config.bin_count;
  corpus.meta.seed = config.seed;
  corpus.meta.bounds.assign(static_cast<size_t>(d), {-1.0, 1.0});

  for (int k = 0; k < config.n_tasks; ++k) {
    TaskSpec task;
    task.task_id = task_name(k);
    task.horizon = horizon;
    task.sigma_demo = config.sigma_demo;
    task.sigma_obs = config.sigma_obs;
    rng::Stream task_stream(
        rng::derive(config.seed, "corpus/task", static_cast<uint64_t>(k)));
    for (int i = 0; i < d_pos; ++i) {
      task.start.push_back(task_stream.uniform(-0.9, -0.1));
    }
    for (int i = 0; i < d_pos; ++i) {
      task.goal.push_back(task_stream.uniform(0.1, 0.9));
    }

    for (int r = 0; r < config.trajs_per_task; ++r) {
      Trajectory traj;
      traj.trajectory_id = traj_name(task.task_id, r);
      traj.instruction_id = task.task_id;
      rng::Stream traj_stream(rng::derive(config.seed, "corpus/traj",
                                          traj.trajectory_id, 0));
      std::vector<double> jitter(static_cast<size_t>(d_pos));
      for (double& v : jitter) {
        v = traj_stream.normal(0.0, config.sigma_demo);
      }

      std::vector<double> position = task.start;
      for (int t = 0; t < horizon; ++t) {
        TransitionSample sample;
        sample.step_index = t;
        sample.instruction_id = task.task_id;

        VectorObs obs;
        obs.values.reserve(static_cast<size_t>(2 * d_pos + 1));
        obs.values.insert(obs.values.end(), position.begin(), position.end());
        obs.values.insert(obs.values.end(), task.goal.begin(),
                          task.goal.end());
        obs.values.push_back(static_cast<double>(t) /
                             static_cast<double>(horizon - 1));
        for (double& v : obs.values) {
          v += traj_stream.normal(0.0, config.sigma_obs);
        }
        sample.observation = std::move(obs);

        const auto ref_now = reference_position(task, t);
        const auto ref_next = reference_position(task, t + 1);
        sample.action.values.resize(static_cast<size_t>(d));
        for (int i = 0; i < d_pos; ++i) {
          const double delta = ref_next[static_cast<size_t>(i)] -
                               ref_now[static_cast<size_t>(i)] +
                               jitter[static_cast<size_t>(i)];
          sample.action.values[static_cast<size_t>(i)] =
              std::clamp(delta, -1.0, 1.0);
          position[static_cast<size_t>(i)] +=
              sample.action.values[static_cast<size_t>(i)];
        }
        // Gripper channel: closed (-1) until the final quarter, then open.
        sample.action.values[static_cast<size_t>(d_pos)] =
            (t >= (3 * horizon) / 4) ? 1.0 : -1.0;

        traj.samples.push_back(std::move(sample));
      }
      corpus.trajectories.push_back(std::move(traj));
    }
  }
  return corpus;
}

SplitPlan split_corpus(const std::vector<Trajectory>& trajectories,
                       double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    raise(ErrorKind::kUsage, "split fraction must lie in (0, 1)");
  }
  // Group trajectory ids per task, preserving corpus order.
  std::vector<std::string> task_order;
  std::map<std::string, std::vector<std::string>> by_task;
  for (const auto& traj : trajectories) {
    auto [it, inserted] = by_task.try_emplace(traj.instruction_id);
    if (inserted) task_order.push_back(traj.instruction_id);
    it->second.push_back(traj.trajectory_id);
  }

  SplitPlan plan;
  plan.seed = seed;
  for (const auto& task_id : task_order) {
    auto ids = by_task.at(task_id);
    if (ids.size() < 2) {
      raise(ErrorKind::kInsufficientPopulation,
            "task '" + task_id + "' has fewer than 2 trajectories");
    }
    const auto n = static_cast<double>(ids.size());
    auto n_member = static_cast<size_t>(std::floor(fraction * n + 0.5));
    n_member = std::clamp<size_t>(n_member, 1, ids.size() - 1);

    rng::Stream stream(rng::derive(seed, "split", task_id, 0));
    stream.shuffle(ids);
    for (size_t i = 0; i < ids.size(); ++i) {
      (i < n_member ? plan.member_ids : plan.nonmember_ids)
          .push_back(ids[i]);
    }
  }
  std::sort(plan.member_ids.begin(), plan.member_ids.end());
  std::sort(plan.nonmember_ids.begin(), plan.nonmember_ids.end());
  return plan;
}

void apply_split(Corpus& corpus, const SplitPlan& plan) {
  std::unordered_map<std::string, bool> label;
  for (const auto& id : plan.member_ids) label[id] = true;
  for (const auto& id : plan.nonmember_ids) {
    if (!label.emplace(id, false).second) {
      raise(ErrorKind::kSchemaMismatch,
            "trajectory '" + id + "' appears in both sides of the split");
    }
  }
  if (label.size() != corpus.trajectories.size()) {
    raise(ErrorKind::kSchemaMismatch,
          "split plan does not cover the corpus exactly");
  }
  for (auto& traj : corpus.trajectories) {
    const auto it = label.find(traj.trajectory_id);
    if (it == label.end()) {
      raise(ErrorKind::kSchemaMismatch,
            "split plan is missing trajectory '" + traj.trajectory_id + "'");
    }
    traj.member = it->second;
  }
}

EvalManifest sample_eval_sets(const Corpus& corpus, int n_samples_per_class,
                              int n_trajs_per_class, uint64_t seed,
                              bool disjoint) {
  if (n_samples_per_class < 0 || n_trajs_per_class < 0) {
    raise(ErrorKind::kUsage, "requested counts must be non-negative");
  }

  std::vector<std::string> member_samples;
  std::vector<std::string> nonmember_samples;
  std::vector<std::string> member_trajs;
  std::vector<std::string> nonmember_trajs;
  for (const auto& traj : corpus.trajectories) {
    (traj.member ? member_trajs : nonmember_trajs)
        .push_back(traj.trajectory_id);
    for (const auto& sample : traj.samples) {
      (traj.member ? member_samples : nonmember_samples)
          .push_back(sample_unit_id(traj.trajectory_id, sample.step_index));
    }
  }

  const auto check = [](size_t available, int requested,
                        const std::string& what) {
    if (static_cast<size_t>(requested) > available) {
      raise(ErrorKind::kInsufficientPopulation,
            "requested " + std::to_string(requested) + " " + what +
                " but only " + std::to_string(available) +
                " available (shortfall " +
                std::to_string(static_cast<size_t>(requested) - available) +
                ")");
    }
  };
  check(member_samples.size(), n_samples_per_class, "member samples");
  check(nonmember_samples.size(), n_samples_per_class, "non-member samples");

  EvalManifest manifest;
  manifest.seed = seed;
  manifest.disjoint = disjoint;

  const auto draw = [&](std::vector<std::string>& pool, int n,
                        const char* stream_name) {
    rng::Stream stream(rng::derive(seed, stream_name));
    stream.shuffle(pool);
    pool.resize(static_cast<size_t>(n));
    return pool;
  };
  manifest.member_samples =
      draw(member_samples, n_samples_per_class, "eval/member_samples");
  manifest.nonmember_samples =
      draw(nonmember_samples, n_samples_per_class, "eval/nonmember_samples");

  if (disjoint) {
    std::unordered_set<std::string> used;
    for (const auto& unit : manifest.member_samples) {
      used.insert(parse_sample_unit_id(unit).first);
    }
    for (const auto& unit : manifest.nonmember_samples) {
      used.insert(parse_sample_unit_id(unit).first);
    }
    std::erase_if(member_trajs,
                  [&](const std::string& id) { return used.contains(id); });
    std::erase_if(nonmember_trajs,
                  [&](const std::string& id) { return used.contains(id); });
  }
  check(member_trajs.size(), n_trajs_per_class, "member trajectories");
  check(nonmember_trajs.size(), n_trajs_per_class, "non-member trajectories");
  manifest.member_trajs =
      draw(member_trajs, n_trajs_per_class, "eval/member_trajs");
  manifest.nonmember_trajs =
      draw(nonmember_trajs, n_trajs_per_class, "eval/nonmember_trajs");
  return manifest;
}

void write_manifest(const std::filesystem::path& path,
                    const EvalManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  json j;
  j["schema"] = "manifest/1";
  j["seed"] = manifest.seed;
  j["disjoint"] = manifest.disjoint;
  j["samples"]["member"] = manifest.member_samples;
  j["samples"]["nonmember"] = manifest.nonmember_samples;
  j["trajectories"]["member"] = manifest.member_trajs;
  j["trajectories"]["nonmember"] = manifest.nonmember_trajs;
  out << j.dump() << '\n';
  if (!out) raise(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

EvalManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": malformed manifest JSON");
  }
  if (j.value("schema", std::string()) != "manifest/1") {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": unsupported manifest schema");
  }
  EvalManifest m;
  m.seed = j.at("seed").get<uint64_t>();
  m.disjoint = j.at("disjoint").get<bool>();
  m.member_samples =
      j.at("samples").at("member").get<std::vector<std::string>>();
  m.nonmember_samples =
      j.at("samples").at("nonmember").get<std::vector<std::string>>();
  m.member_trajs =
      j.at("trajectories").at("member").get<std::vector<std::string>>();
  m.nonmember_trajs =
      j.at("trajectories").at("nonmember").get<std::vector<std::string>>();
  return m;
}

}  // namespace actaudit::corpus
