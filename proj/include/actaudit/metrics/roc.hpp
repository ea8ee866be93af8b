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

#ifndef ACTAUDIT_METRICS_ROC_HPP
#define ACTAUDIT_METRICS_ROC_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "actaudit/core/types.hpp"

namespace actaudit::metrics {

// Threshold-free evaluation of membership scores. The decision rule is
// "predict member iff score >= gamma"; every statistic here sweeps gamma
// over the distinct score values with ties grouped at one threshold.

inline constexpr std::array<double, 3> kFprGrid = {0.001, 0.01, 0.05};

// Mann-Whitney AUC: P(member score > non-member score) + 0.5 P(equal),
// computed by rank-sum in O(n log n). Raises DegenerateEvaluation unless
// both classes are non-empty.
double auc(const std::vector<ScoredExample>& scored);

// Maximum TPR over operating points with empirical FPR <= fpr_target
// (conservative step rule, no interpolation); 0 when no point qualifies.
double tpr_at_fpr(const std::vector<ScoredExample>& scored, double fpr_target);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

// Piecewise-constant ROC curve at all distinct thresholds, starting at
// (0,0) and ending at (1,1). Trapezoidal area over these points equals
// auc() exactly up to rounding.
std::vector<RocPoint> roc_curve(const std::vector<ScoredExample>& scored);

struct ClassDigest {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct RocSummary {
  std::string attack_name;
  size_t n_members = 0;
  size_t n_nonmembers = 0;
  double auc = 0.0;
  std::map<double, double> tpr_at;  // keyed by FPR target
  ClassDigest member_digest;
  ClassDigest nonmember_digest;
};

RocSummary summarize(const std::string& attack_name,
                     const std::vector<ScoredExample>& scored);

}  // namespace actaudit::metrics

#endif  // ACTAUDIT_METRICS_ROC_HPP
