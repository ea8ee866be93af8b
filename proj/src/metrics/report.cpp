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

#include "actaudit/metrics/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "actaudit/core/errors.hpp"

namespace actaudit::metrics {
namespace {

// Row order within a dataset block mirrors the attack suite tables.
constexpr std::array<const char*, 12> kCanonicalAttackOrder = {
    "NLL",        "Conf",    "ConfFix",    "ActionL1",    "ActionMSE",
    "AggNLL",     "AggConf", "AggConfFix", "AggActionL1", "AggActionMSE",
    "TempSmooth", "TempCurv"};

int attack_rank(const std::string& name) {
  for (size_t i = 0; i < kCanonicalAttackOrder.size(); ++i) {
    if (name == kCanonicalAttackOrder[i]) return static_cast<int>(i);
  }
  return static_cast<int>(kCanonicalAttackOrder.size());
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              if (a.dataset != b.dataset) return a.dataset < b.dataset;
              const int ra = attack_rank(a.summary.attack_name);
              const int rb = attack_rank(b.summary.attack_name);
              if (ra != rb) return ra < rb;
              return a.summary.attack_name < b.summary.attack_name;
            });
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& field, size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    raise(ErrorKind::kSchemaMismatch,
          "report csv line " + std::to_string(line_no) +
              ": bad numeric field '" + field + "'");
  }
  return v;
}

constexpr const char* kCsvHeader =
    "dataset,attack,n_members,n_nonmembers,auc,tpr_at_0.001,tpr_at_0.01,"
    "tpr_at_0.05,member_min,member_max,member_mean,nonmember_min,"
    "nonmember_max,nonmember_mean";

std::string build_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& row : rows) {
    const RocSummary& s = row.summary;
    out << row.dataset << ',' << s.attack_name << ',' << s.n_members << ','
        << s.n_nonmembers << ',' << format_double(s.auc);
    for (double target : kFprGrid) {
      out << ',' << format_double(s.tpr_at.at(target));
    }
    out << ',' << format_double(s.member_digest.min) << ','
        << format_double(s.member_digest.max) << ','
        << format_double(s.member_digest.mean) << ','
        << format_double(s.nonmember_digest.min) << ','
        << format_double(s.nonmember_digest.max) << ','
        << format_double(s.nonmember_digest.mean) << '\n';
  }
  return out.str();
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string build_text(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "dataset        attack        AUC      TPR@0.1%  TPR@1%    TPR@5%\n";
  out << "-------------- ------------- -------- --------- --------- ---------\n";

  bool low_fpr_footnote = false;
  size_t i = 0;
  while (i < rows.size()) {
    size_t j = i;
    while (j < rows.size() && rows[j].dataset == rows[i].dataset) ++j;

    // Per-block column maxima get a '*', mirroring bold table entries.
    std::array<double, 4> best = {-1.0, -1.0, -1.0, -1.0};
    for (size_t k = i; k < j; ++k) {
      const RocSummary& s = rows[k].summary;
      best[0] = std::max(best[0], s.auc);
      for (size_t g = 0; g < kFprGrid.size(); ++g) {
        best[g + 1] = std::max(best[g + 1], s.tpr_at.at(kFprGrid[g]));
      }
    }
    for (size_t k = i; k < j; ++k) {
      const RocSummary& s = rows[k].summary;
      std::array<double, 4> vals = {s.auc, s.tpr_at.at(kFprGrid[0]),
                                    s.tpr_at.at(kFprGrid[1]),
                                    s.tpr_at.at(kFprGrid[2])};
      std::ostringstream line;
      line << rows[k].dataset;
      line << std::string(
          rows[k].dataset.size() < 14 ? 15 - rows[k].dataset.size() : 1, ' ');
      line << s.attack_name;
      line << std::string(
          s.attack_name.size() < 13 ? 14 - s.attack_name.size() : 1, ' ');
      for (size_t g = 0; g < vals.size(); ++g) {
        std::string cell = fixed4(vals[g]);
        if (vals[g] == best[g]) cell += '*';
        line << cell << std::string(cell.size() < 9 ? 10 - cell.size() : 1,
                                    ' ');
      }
      out << line.str() << '\n';
      for (double target : kFprGrid) {
        if (target * static_cast<double>(s.n_nonmembers) < 1.0) {
          low_fpr_footnote = true;
        }
      }
    }
    i = j;
  }
  if (low_fpr_footnote) {
    out << "note: TPR at FPR targets below 1/(non-member count) is reported "
           "at the FPR=0 operating point.\n";
  }
  return out.str();
}

}  // namespace

std::string build_report(std::vector<ReportRow> rows, ReportFormat format) {
  sort_rows(rows);
  return format == ReportFormat::kCsv ? build_csv(rows) : build_text(rows);
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    raise(ErrorKind::kSchemaMismatch, "report csv: missing or bad header");
  }
  std::vector<ReportRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 14) {
      raise(ErrorKind::kSchemaMismatch,
            "report csv line " + std::to_string(line_no) +
                ": expected 14 fields, got " + std::to_string(fields.size()));
    }
    ReportRow row;
    row.dataset = fields[0];
    RocSummary& s = row.summary;
    s.attack_name = fields[1];
    s.n_members = static_cast<size_t>(parse_double(fields[2], line_no));
    s.n_nonmembers = static_cast<size_t>(parse_double(fields[3], line_no));
    s.auc = parse_double(fields[4], line_no);
    for (size_t g = 0; g < kFprGrid.size(); ++g) {
      s.tpr_at[kFprGrid[g]] = parse_double(fields[5 + g], line_no);
    }
    s.member_digest = {parse_double(fields[8], line_no),
                       parse_double(fields[9], line_no),
                       parse_double(fields[10], line_no)};
    s.nonmember_digest = {parse_double(fields[11], line_no),
                          parse_double(fields[12], line_no),
                          parse_double(fields[13], line_no)};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace actaudit::metrics
