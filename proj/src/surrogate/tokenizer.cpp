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

#include "actaudit/surrogate/tokenizer.hpp"

#include <algorithm>
#include <cmath>

#include "actaudit/core/errors.hpp"

namespace actaudit::surrogate {

ActionTokenizer::ActionTokenizer(
    int bin_count, std::vector<std::pair<double, double>> bounds)
    : bin_count_(bin_count), bounds_(std::move(bounds)) {
  if (bin_count_ < 2) {
    raise(ErrorKind::kUsage, "tokenizer needs at least 2 bins");
  }
  if (bounds_.empty()) {
    raise(ErrorKind::kUsage, "tokenizer needs per-dimension bounds");
  }
  for (const auto& [lo, hi] : bounds_) {
    if (!(lo < hi)) {
      raise(ErrorKind::kUsage, "tokenizer bounds must satisfy lo < hi");
    }
  }
}

ActionTokenizer ActionTokenizer::from_metadata(const CorpusMetadata& meta,
                                               int bins_override) {
  return ActionTokenizer(bins_override > 0 ? bins_override : meta.bin_count,
                         meta.bounds);
}

std::vector<int> ActionTokenizer::tokenize(const Action& action) const {
  if (action.dim() != bounds_.size()) {
    raise(ErrorKind::kDimensionMismatch,
          "action dimension does not match tokenizer bounds");
  }
  std::vector<int> tokens(action.dim());
  for (size_t k = 0; k < action.dim(); ++k) {
    const auto [lo, hi] = bounds_[k];
    const double clipped = std::clamp(action[k], lo, hi);
    const double width = (hi - lo) / bin_count_;
    const int bin = static_cast<int>(std::floor((clipped - lo) / width));
    tokens[k] = std::clamp(bin, 0, bin_count_ - 1);
  }
  return tokens;
}

Action ActionTokenizer::detokenize(const std::vector<int>& tokens) const {
  if (tokens.size() != bounds_.size()) {
    raise(ErrorKind::kDimensionMismatch,
          "token count does not match tokenizer bounds");
  }
  Action action;
  action.values.resize(tokens.size());
  for (size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k] < 0 || tokens[k] >= bin_count_) {
      raise(ErrorKind::kDimensionMismatch, "token id outside bin range");
    }
    const auto [lo, hi] = bounds_[k];
    const double width = (hi - lo) / bin_count_;
    action.values[k] = lo + (tokens[k] + 0.5) * width;
  }
  return action;
}

}  // namespace actaudit::surrogate
