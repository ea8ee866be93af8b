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

#include "actaudit/core/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "actaudit/core/errors.hpp"

namespace actaudit {
namespace {

using json = nlohmann::json;

constexpr double kRowSumTolerance = 1e-6;

void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) raise(kind, message);
}

json parse_line(const std::string& line, const std::filesystem::path& path,
                size_t line_no) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ":" + std::to_string(line_no) + ": malformed JSON");
  }
  return j;
}

std::vector<double> to_double_vector(const json& j, ErrorKind kind,
                                     const std::string& what) {
  require(j.is_array(), kind, what + " must be a numeric array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    require(v.is_number(), kind, what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_known_keys(const json& j, const std::set<std::string>& known,
                      bool strict, const std::string& context) {
  if (!strict) return;
  for (const auto& item : j.items()) {
    require(known.contains(item.key()), ErrorKind::kSchemaMismatch,
            context + ": unknown field '" + item.key() + "'");
  }
}

json observation_to_json(const Observation& obs) {
  json j;
  if (const auto* vec = std::get_if<VectorObs>(&obs)) {
    j["kind"] = "vector";
    j["values"] = vec->values;
  } else {
    const auto& px = std::get<PixelObs>(obs);
    j["kind"] = "pixel";
    j["height"] = px.height;
    j["width"] = px.width;
    j["channels"] = px.channels;
    j["pixels"] = px.pixels;
  }
  return j;
}

Observation observation_from_json(const json& j, bool strict,
                                  const std::string& context) {
  require(j.is_object() && j.contains("kind"), ErrorKind::kSchemaMismatch,
          context + ": observation must be an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vector") {
    check_known_keys(j, {"kind", "values"}, strict, context);
    VectorObs obs;
    obs.values = to_double_vector(j.at("values"), ErrorKind::kSchemaMismatch,
                                  context + ": observation values");
    for (double v : obs.values) {
      require(std::isfinite(v), ErrorKind::kSchemaMismatch,
              context + ": observation contains a non-finite value");
    }
    return obs;
  }
  if (kind == "pixel") {
    check_known_keys(j, {"kind", "height", "width", "channels", "pixels"},
                     strict, context);
    PixelObs obs;
    obs.height = j.at("height").get<int>();
    obs.width = j.at("width").get<int>();
    obs.channels = j.at("channels").get<int>();
    obs.pixels = to_double_vector(j.at("pixels"), ErrorKind::kSchemaMismatch,
                                  context + ": pixels");
    require(obs.height > 0 && obs.width > 0 && obs.channels > 0,
            ErrorKind::kSchemaMismatch, context + ": bad pixel grid shape");
    require(obs.pixels.size() == static_cast<size_t>(obs.height) * obs.width *
                                     obs.channels,
            ErrorKind::kSchemaMismatch,
            context + ": pixel count disagrees with shape");
    for (double v : obs.pixels) {
      require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
              ErrorKind::kSchemaMismatch,
              context + ": pixel value outside [0,1]");
    }
    return obs;
  }
  raise(ErrorKind::kSchemaMismatch,
        context + ": unknown observation kind '" + kind + "'");
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  }
  return in;
}

void validate_logprob_rows(const std::vector<std::vector<double>>& rows,
                           const std::string& context) {
  for (const auto& row : rows) {
    require(!row.empty(), ErrorKind::kSchemaMismatch,
            context + ": empty log-probability row");
    require(row.size() == rows.front().size(), ErrorKind::kSchemaMismatch,
            context + ": ragged log-probability rows");
    double sum = 0.0;
    for (double lp : row) {
      require(std::isfinite(lp), ErrorKind::kSchemaMismatch,
              context + ": non-finite log-probability");
      sum += std::exp(lp);
    }
    require(std::abs(sum - 1.0) <= kRowSumTolerance,
            ErrorKind::kSchemaMismatch,
            context + ": log-probability row does not normalize (sum=" +
                std::to_string(sum) + ")");
  }
}

}  // namespace

const Trajectory* Corpus::find_trajectory(
    const std::string& trajectory_id) const {
  for (const auto& traj : trajectories) {
    if (traj.trajectory_id == trajectory_id) return &traj;
  }
  return nullptr;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  auto out = open_for_write(path);
  json header;
  header["schema"] = corpus.meta.schema_version;
  header["d"] = corpus.meta.action_dim;
  header["B"] = corpus.meta.bin_count;
  json bounds = json::array();
  for (const auto& [lo, hi] : corpus.meta.bounds) {
    bounds.push_back(json::array({lo, hi}));
  }
  header["bounds"] = std::move(bounds);
  header["V"] = corpus.meta.vocab_size;
  header["seed"] = corpus.meta.seed;
  out << header.dump() << '\n';

  for (const auto& traj : corpus.trajectories) {
    for (const auto& sample : traj.samples) {
      json j;
      j["trajectory_id"] = traj.trajectory_id;
      j["step_index"] = sample.step_index;
      j["instruction_id"] = traj.instruction_id;
      j["member"] = traj.member;
      j["observation"] = observation_to_json(sample.observation);
      j["action"] = sample.action.values;
      out << j.dump() << '\n';
    }
  }
  if (!out) raise(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

Corpus read_corpus(const std::filesystem::path& path, ReadOptions options,
                   ReadStats* stats) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorKind::kMissingMetadata,
          "corpus file '" + path.string() + "' has no metadata header");
  }
  json header = parse_line(line, path, 1);
  require(header.is_object() && header.contains("schema"),
          ErrorKind::kMissingMetadata,
          path.string() + ": first line is not a metadata header");
  const std::string schema = header.at("schema").get<std::string>();
  require(schema == "corpus/1", ErrorKind::kSchemaMismatch,
          path.string() + ": unsupported corpus schema '" + schema + "'");

  Corpus corpus;
  corpus.meta.schema_version = schema;
  corpus.meta.action_dim = header.at("d").get<int>();
  corpus.meta.bin_count = header.at("B").get<int>();
  corpus.meta.vocab_size = header.at("V").get<int>();
  corpus.meta.seed = header.at("seed").get<uint64_t>();
  for (const auto& b : header.at("bounds")) {
    require(b.is_array() && b.size() == 2, ErrorKind::kSchemaMismatch,
            path.string() + ": each bound must be [lo, hi]");
    corpus.meta.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
  }
  require(corpus.meta.action_dim >= 1 &&
              corpus.meta.bounds.size() ==
                  static_cast<size_t>(corpus.meta.action_dim),
          ErrorKind::kSchemaMismatch,
          path.string() + ": bounds do not match action_dim");
  require(corpus.meta.bin_count >= 2, ErrorKind::kSchemaMismatch,
          path.string() + ": bin count must be >= 2");
  require(corpus.meta.vocab_size >= corpus.meta.bin_count,
          ErrorKind::kSchemaMismatch,
          path.string() + ": vocab size must be >= bin count");
  for (const auto& [lo, hi] : corpus.meta.bounds) {
    require(lo < hi, ErrorKind::kSchemaMismatch,
            path.string() + ": bound with lo >= hi");
  }

  std::unordered_map<std::string, size_t> traj_index;
  std::set<std::pair<std::string, int>> seen_keys;
  size_t obs_dim = 0;  // first vector observation pins the corpus obs width
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    json j = parse_line(line, path, line_no);
    check_known_keys(j,
                     {"trajectory_id", "step_index", "instruction_id",
                      "member", "observation", "action"},
                     options.strict, context);
    const std::string traj_id = j.at("trajectory_id").get<std::string>();
    const int step = j.at("step_index").get<int>();
    require(seen_keys.insert({traj_id, step}).second,
            ErrorKind::kDuplicateRecord,
            context + ": duplicate (trajectory_id, step_index) key (" +
                traj_id + ", " + std::to_string(step) + ")");

    TransitionSample sample;
    sample.step_index = step;
    sample.instruction_id = j.at("instruction_id").get<std::string>();
    sample.observation =
        observation_from_json(j.at("observation"), options.strict, context);
    sample.action.values = to_double_vector(
        j.at("action"), ErrorKind::kSchemaMismatch, context + ": action");

    bool lengths_ok = sample.action.dim() ==
                      static_cast<size_t>(corpus.meta.action_dim);
    if (const auto* vec = std::get_if<VectorObs>(&sample.observation)) {
      if (obs_dim == 0) obs_dim = vec->values.size();
      lengths_ok = lengths_ok && vec->values.size() == obs_dim;
    }
    if (!lengths_ok) {
      if (options.strict) {
        raise(ErrorKind::kDimensionMismatch,
              context + ": vector lengths disagree with corpus metadata");
      }
      if (stats) ++stats->skipped;
      continue;
    }
    for (double v : sample.action.values) {
      require(std::isfinite(v), ErrorKind::kSchemaMismatch,
              context + ": action contains a non-finite value");
    }

    const bool member = j.at("member").get<bool>();
    auto [it, inserted] =
        traj_index.try_emplace(traj_id, corpus.trajectories.size());
    if (inserted) {
      Trajectory traj;
      traj.trajectory_id = traj_id;
      traj.instruction_id = sample.instruction_id;
      traj.member = member;
      corpus.trajectories.push_back(std::move(traj));
    }
    Trajectory& traj = corpus.trajectories[it->second];
    require(traj.instruction_id == sample.instruction_id,
            ErrorKind::kSchemaMismatch,
            context + ": instruction_id differs within trajectory '" +
                traj_id + "'");
    require(traj.member == member, ErrorKind::kSchemaMismatch,
            context + ": member flag differs within trajectory '" + traj_id +
                "'");
    traj.samples.push_back(std::move(sample));
  }

  for (const auto& traj : corpus.trajectories) {
    require(!traj.samples.empty(), ErrorKind::kEmptyTrajectory,
            path.string() + ": trajectory '" + traj.trajectory_id +
                "' has no samples");
    for (size_t i = 0; i < traj.samples.size(); ++i) {
      require(traj.samples[i].step_index == static_cast<int>(i),
              ErrorKind::kSchemaMismatch,
              path.string() + ": trajectory '" + traj.trajectory_id +
                  "' step indices are not 0..T-1 in order");
    }
  }
  return corpus;
}

std::unordered_map<std::string, size_t> build_record_index(
    const InferenceLog& log) {
  std::unordered_map<std::string, size_t> index;
  index.reserve(log.records.size());
  for (size_t i = 0; i < log.records.size(); ++i) {
    const auto& rec = log.records[i];
    const auto [it, inserted] =
        index.try_emplace(sample_unit_id(rec.trajectory_id, rec.step_index), i);
    if (!inserted) {
      raise(ErrorKind::kDuplicateRecord,
            "duplicate inference record for unit '" + it->first + "'");
    }
  }
  return index;
}

void write_inference_log(const std::filesystem::path& path,
                         const InferenceLog& log) {
  auto out = open_for_write(path);
  json header;
  header["schema"] = log.header.schema;
  header["model_tag"] = log.header.model_tag;
  header["prompt_mode"] = to_string(log.header.prompt_mode);
  if (!log.header.defense.empty()) header["defense"] = log.header.defense;
  out << header.dump() << '\n';

  for (const auto& rec : log.records) {
    json j;
    j["trajectory_id"] = rec.trajectory_id;
    j["step_index"] = rec.step_index;
    j["generated_action"] = rec.generated_action.values;
    if (rec.token_logprob_rows) j["token_logprob_rows"] = *rec.token_logprob_rows;
    if (rec.gt_token_logprobs) j["gt_token_logprobs"] = *rec.gt_token_logprobs;
    out << j.dump() << '\n';
  }
  if (!out) raise(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

InferenceLog read_inference_log(const std::filesystem::path& path,
                                ReadOptions options, ReadStats* stats) {
  auto in = open_for_read(path);
  InferenceLog log;
  std::string line;
  if (!std::getline(in, line)) return log;  // empty file: empty log
  json header = parse_line(line, path, 1);
  require(header.is_object() && header.contains("schema"),
          ErrorKind::kMissingMetadata,
          path.string() + ": first line is not a metadata header");
  log.header.schema = header.at("schema").get<std::string>();
  require(log.header.schema == "inferlog/1", ErrorKind::kSchemaMismatch,
          path.string() + ": unsupported inference log schema '" +
              log.header.schema + "'");
  log.header.model_tag = header.value("model_tag", std::string());
  log.header.prompt_mode =
      prompt_mode_from_string(header.at("prompt_mode").get<std::string>());
  log.header.defense = header.value("defense", std::string());

  std::set<std::pair<std::string, int>> seen_keys;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    json j = parse_line(line, path, line_no);
    check_known_keys(j,
                     {"trajectory_id", "step_index", "generated_action",
                      "token_logprob_rows", "gt_token_logprobs"},
                     options.strict, context);

    InferenceRecord rec;
    rec.trajectory_id = j.at("trajectory_id").get<std::string>();
    rec.step_index = j.at("step_index").get<int>();
    rec.prompt_mode = log.header.prompt_mode;
    require(seen_keys.insert({rec.trajectory_id, rec.step_index}).second,
            ErrorKind::kDuplicateRecord,
            context + ": duplicate (trajectory_id, step_index) key");
    rec.generated_action.values =
        to_double_vector(j.at("generated_action"), ErrorKind::kSchemaMismatch,
                         context + ": generated_action");
    for (double v : rec.generated_action.values) {
      require(std::isfinite(v), ErrorKind::kSchemaMismatch,
              context + ": generated_action has a non-finite value");
    }

    if (j.contains("token_logprob_rows")) {
      std::vector<std::vector<double>> rows;
      for (const auto& row : j.at("token_logprob_rows")) {
        rows.push_back(to_double_vector(row, ErrorKind::kSchemaMismatch,
                                        context + ": token_logprob_rows"));
      }
      validate_logprob_rows(rows, context);
      rec.token_logprob_rows = std::move(rows);
    }
    if (j.contains("gt_token_logprobs")) {
      auto lps = to_double_vector(j.at("gt_token_logprobs"),
                                  ErrorKind::kSchemaMismatch,
                                  context + ": gt_token_logprobs");
      for (double lp : lps) {
        require(lp <= 0.0, ErrorKind::kSchemaMismatch,
                context + ": teacher-forced log-probability above 0");
      }
      if (rec.token_logprob_rows) {
        require(lps.size() == rec.token_logprob_rows->size(),
                ErrorKind::kSchemaMismatch,
                context +
                    ": gt_token_logprobs length differs from row count");
      }
      rec.gt_token_logprobs = std::move(lps);
    }
    log.records.push_back(std::move(rec));
  }
  (void)stats;
  return log;
}

void write_scores(const std::filesystem::path& path,
                  const std::vector<ScoredExample>& scores) {
  auto out = open_for_write(path);
  for (const auto& s : scores) {
    json j;
    j["unit_id"] = s.unit_id;
    j["attack"] = s.attack_name;
    j["score"] = s.score;
    j["member"] = s.member;
    out << j.dump() << '\n';
  }
  if (!out) raise(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

std::vector<ScoredExample> read_scores(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::vector<ScoredExample> scores;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse_line(line, path, line_no);
    ScoredExample s;
    s.unit_id = j.at("unit_id").get<std::string>();
    s.attack_name = j.at("attack").get<std::string>();
    s.score = j.at("score").get<double>();
    s.member = j.at("member").get<bool>();
    if (!std::isfinite(s.score)) {
      raise(ErrorKind::kNonFiniteScore,
            path.string() + ":" + std::to_string(line_no) +
                ": non-finite score");
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

std::string file_content_hash(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace actaudit
