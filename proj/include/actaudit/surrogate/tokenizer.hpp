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

#ifndef ACTAUDIT_SURROGATE_TOKENIZER_HPP
#define ACTAUDIT_SURROGATE_TOKENIZER_HPP

#include <utility>
#include <vector>

#include "actaudit/core/types.hpp"

namespace actaudit::surrogate {

// Per-dimension uniform binning over [lo, hi]: half-open bins
// [lo + i*w, lo + (i+1)*w) with w = (hi-lo)/B; the upper edge maps to bin
// B-1 and inputs are clipped to the bounds first. Detokenization returns
// bin centers, so a round trip moves a value by at most half a bin width.
class ActionTokenizer {
 public:
  ActionTokenizer(int bin_count,
                  std::vector<std::pair<double, double>> bounds);

  static ActionTokenizer from_metadata(const CorpusMetadata& meta,
                                       int bins_override = 0);

  std::vector<int> tokenize(const Action& action) const;
  Action detokenize(const std::vector<int>& tokens) const;

  int bin_count() const { return bin_count_; }
  size_t action_dim() const { return bounds_.size(); }
  const std::vector<std::pair<double, double>>& bounds() const {
    return bounds_;
  }

 private:
  int bin_count_;
  std::vector<std::pair<double, double>> bounds_;
};

}  // namespace actaudit::surrogate

#endif  // ACTAUDIT_SURROGATE_TOKENIZER_HPP
