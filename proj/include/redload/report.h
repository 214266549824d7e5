/*
 * Copyright (C) 2026 The redload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef REDLOAD_REPORT_H_
#define REDLOAD_REPORT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "redload/profile.h"

namespace redload {

inline constexpr size_t kDefaultReportTop = 20;
inline constexpr const char* kReportFormat = "redload-report";

enum class RowKind { kTemporal, kSpatial };
enum class ReportFormat { kText, kJson };

const char* ToString(RowKind kind);
// Throws UsageError for anything but "text" or "json".
ReportFormat ParseReportFormat(const std::string& name);

struct ReportRow {
  size_t rank = 0;  // 1-based within its kind
  RowKind kind = RowKind::kTemporal;
  CanonicalContext new_ctx;
  std::optional<CanonicalContext> old_ctx;
  std::optional<CanonicalContext> scope;
  std::optional<std::string> object;  // spatial rows only
  RedundancyCounters counters;
  FractionPair fraction;
  double instance_percent = 0.0;
  std::string cls;  // precise, approx or mixed

  // new_ctx frames followed by old_ctx frames.
  std::vector<Frame> SyntheticChain() const;
};

struct Report {
  uint32_t threads = 0;
  size_t top = kDefaultReportTop;
  FractionPair temporal_program;
  FractionPair spatial_program;
  size_t temporal_candidates = 0;
  size_t spatial_candidates = 0;
  std::vector<ReportRow> temporal;
  std::vector<ReportRow> spatial;
};

// Keeps pairs with at least one redundant instance, ranked by redundant
// bytes, then by key. At most `top` rows per kind.
Report BuildReport(const Profile& profile, size_t top = kDefaultReportTop);

std::string RenderText(const Report& report);
nlohmann::json ToJson(const Report& report);
std::string Render(const Report& report, ReportFormat format);

}  // namespace redload

#endif  // REDLOAD_REPORT_H_
