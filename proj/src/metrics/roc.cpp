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

#include "actaudit/metrics/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "actaudit/core/errors.hpp"

namespace actaudit::metrics {
namespace {

struct Counts {
  size_t members = 0;
  size_t nonmembers = 0;
};

Counts validate(const std::vector<ScoredExample>& scored) {
  Counts c;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) {
      raise(ErrorKind::kNonFiniteScore,
            "unit '" + s.unit_id + "' has a non-finite score");
    }
    (s.member ? c.members : c.nonmembers)++;
  }
  if (c.members == 0 || c.nonmembers == 0) {
    raise(ErrorKind::kDegenerateEvaluation,
          "evaluation needs at least one member and one non-member score");
  }
  return c;
}

// (score, member) pairs sorted by descending score.
std::vector<std::pair<double, bool>> sorted_desc(
    const std::vector<ScoredExample>& scored) {
  std::vector<std::pair<double, bool>> v;
  v.reserve(scored.size());
  for (const auto& s : scored) v.emplace_back(s.score, s.member);
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  return v;
}

}  // namespace

double auc(const std::vector<ScoredExample>& scored) {
  const Counts c = validate(scored);
  std::vector<std::pair<double, bool>> v;
  v.reserve(scored.size());
  for (const auto& s : scored) v.emplace_back(s.score, s.member);
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Midrank sum over members; ties get the average of their rank range.
  double member_rank_sum = 0.0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    size_t tied_members = 0;
    while (j < v.size() && v[j].first == v[i].first) {
      tied_members += v[j].second ? 1 : 0;
      ++j;
    }
    const double midrank =
        (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    member_rank_sum += midrank * static_cast<double>(tied_members);
    i = j;
  }
  const double m = static_cast<double>(c.members);
  const double n = static_cast<double>(c.nonmembers);
  const double u = member_rank_sum - m * (m + 1.0) / 2.0;
  return u / (m * n);
}

double tpr_at_fpr(const std::vector<ScoredExample>& scored,
                  double fpr_target) {
  if (!(fpr_target > 0.0 && fpr_target < 1.0)) {
    raise(ErrorKind::kUsage, "fpr_target must lie in (0, 1)");
  }
  const Counts c = validate(scored);
  const auto v = sorted_desc(scored);

  double best_tpr = 0.0;
  size_t tp = 0;
  size_t fp = 0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    while (j < v.size() && v[j].first == v[i].first) {
      (v[j].second ? tp : fp)++;
      ++j;
    }
    const double fpr =
        static_cast<double>(fp) / static_cast<double>(c.nonmembers);
    if (fpr <= fpr_target) {
      best_tpr = std::max(
          best_tpr, static_cast<double>(tp) / static_cast<double>(c.members));
    }
    i = j;
  }
  return best_tpr;
}

std::vector<RocPoint> roc_curve(const std::vector<ScoredExample>& scored) {
  const Counts c = validate(scored);
  const auto v = sorted_desc(scored);

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0});
  size_t tp = 0;
  size_t fp = 0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    while (j < v.size() && v[j].first == v[i].first) {
      (v[j].second ? tp : fp)++;
      ++j;
    }
    curve.push_back(
        {static_cast<double>(fp) / static_cast<double>(c.nonmembers),
         static_cast<double>(tp) / static_cast<double>(c.members)});
    i = j;
  }
  if (curve.back() != RocPoint{1.0, 1.0}) curve.push_back({1.0, 1.0});
  return curve;
}

RocSummary summarize(const std::string& attack_name,
                     const std::vector<ScoredExample>& scored) {
  RocSummary summary;
  summary.attack_name = attack_name;
  summary.auc = auc(scored);
  for (double target : kFprGrid) {
    summary.tpr_at[target] = tpr_at_fpr(scored, target);
  }

  ClassDigest member{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity(), 0.0};
  ClassDigest nonmember = member;
  for (const auto& s : scored) {
    ClassDigest& d = s.member ? member : nonmember;
    d.min = std::min(d.min, s.score);
    d.max = std::max(d.max, s.score);
    d.mean += s.score;
    (s.member ? summary.n_members : summary.n_nonmembers)++;
  }
  member.mean /= static_cast<double>(summary.n_members);
  nonmember.mean /= static_cast<double>(summary.n_nonmembers);
  summary.member_digest = member;
  summary.nonmember_digest = nonmember;
  return summary;
}

}  // namespace actaudit::metrics
