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

#ifndef ACTAUDIT_METRICS_REPORT_HPP
#define ACTAUDIT_METRICS_REPORT_HPP

#include <string>
#include <vector>

#include "actaudit/metrics/roc.hpp"

namespace actaudit::metrics {

enum class ReportFormat { kCsv, kText };

struct ReportRow {
  std::string dataset;  // e.g. "default", "bins=64", "gaussian:0.2"
  RocSummary summary;
};

// One row per (dataset, attack) in deterministic order: datasets
// lexicographic, attacks in canonical enum order. CSV carries every summary
// field at full precision; the text table shows AUC and TPR at the fixed
// FPR grid with per-block maxima marked '*'.
std::string build_report(std::vector<ReportRow> rows, ReportFormat format);

// Inverse of build_report(..., kCsv): parse(emit(x)) == x.
std::vector<ReportRow> parse_report_csv(const std::string& text);

}  // namespace actaudit::metrics

#endif  // ACTAUDIT_METRICS_REPORT_HPP
