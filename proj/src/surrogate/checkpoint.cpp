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

#include "actaudit/surrogate/checkpoint.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "actaudit/core/errors.hpp"

namespace actaudit::surrogate {
namespace {

using json = nlohmann::json;

}  // namespace

void write_checkpoint(const std::filesystem::path& path,
                      const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  const PolicyParams& params = checkpoint.bundle.params;
  json header;
  header["schema"] = "ckpt/1";
  header["step"] = checkpoint.step;
  header["seed"] = params.seed;
  header["train_loss"] = checkpoint.train_loss;
  header["holdout_error"] = checkpoint.holdout_error;
  header["dropout_p"] = params.dropout_p;
  header["arch"] = {{"obs_dim", params.shape.obs_dim},
                    {"n_instructions", params.shape.n_instructions},
                    {"action_dim", params.shape.action_dim},
                    {"bins", params.shape.bins},
                    {"hidden", params.shape.hidden}};
  header["instructions"] = checkpoint.bundle.instructions;
  json bounds = json::array();
  for (const auto& [lo, hi] : checkpoint.bundle.tokenizer.bounds()) {
    bounds.push_back(json::array({lo, hi}));
  }
  header["bounds"] = std::move(bounds);
  out << header.dump() << '\n';

  // Flat parameter array, written manually: shortest-round-trip doubles
  // without building a multi-million-node JSON document.
  out << '[';
  char buf[64];
  for (size_t i = 0; i < params.flat.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), params.flat[i]);
    if (i != 0) out << ',';
    out.write(buf, ptr - buf);
  }
  out << "]\n";
  if (!out) raise(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorKind::kMissingMetadata,
          "checkpoint '" + path.string() + "' has no header");
  }
  json header = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (header.is_discarded() || !header.is_object()) {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": malformed checkpoint header");
  }
  if (header.value("schema", std::string()) != "ckpt/1") {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": unsupported checkpoint schema");
  }

  PolicyShape shape;
  const json& arch = header.at("arch");
  shape.obs_dim = arch.at("obs_dim").get<int>();
  shape.n_instructions = arch.at("n_instructions").get<int>();
  shape.action_dim = arch.at("action_dim").get<int>();
  shape.bins = arch.at("bins").get<int>();
  shape.hidden = arch.at("hidden").get<int>();

  std::vector<std::pair<double, double>> bounds;
  for (const auto& b : header.at("bounds")) {
    bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
  }

  PolicyParams params = zero_params(shape);
  params.seed = header.at("seed").get<uint64_t>();
  params.dropout_p = header.at("dropout_p").get<double>();

  if (!std::getline(in, line)) {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": missing parameter array");
  }
  json flat = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (flat.is_discarded() || !flat.is_array() ||
      flat.size() != params.flat.size()) {
    raise(ErrorKind::kSchemaMismatch,
          path.string() + ": parameter array disagrees with arch shape");
  }
  for (size_t i = 0; i < params.flat.size(); ++i) {
    params.flat[i] = flat[i].get<double>();
  }

  Checkpoint ckpt{
      PolicyBundle{std::move(params),
                   header.at("instructions").get<std::vector<std::string>>(),
                   ActionTokenizer(shape.bins, std::move(bounds))},
      header.at("step").get<int>(), header.at("train_loss").get<double>(),
      header.at("holdout_error").get<double>()};
  return ckpt;
}

}  // namespace actaudit::surrogate
