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

#include "redload/report.h"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "redload/errors.h"

namespace redload {

namespace {

std::string RowKey(const ReportRow& r) {
  std::string key = r.object.value_or("");
  key += '|';
  key += r.old_ctx ? Serialize(*r.old_ctx) : "";
  key += '|' + Serialize(r.new_ctx) + '|';
  key += r.scope ? Serialize(*r.scope) : "";
  return key;
}

std::string ClassOf(const RedundancyCounters& c) {
  const bool precise = c.total_bytes_precise > 0;
  const bool approx = c.total_bytes_approx > 0;
  if (precise && approx) return "mixed";
  return approx ? "approx" : "precise";
}

ReportRow MakeRow(RowKind kind, const CanonicalPairKey& key,
                  const RedundancyCounters& counters,
                  const ProgramTotals& totals) {
  ReportRow r;
  r.kind = kind;
  r.new_ctx = key.new_ctx;
  r.old_ctx = key.old_ctx;
  r.scope = key.scope;
  r.counters = counters;
  r.fraction = PairFraction(counters, totals);
  r.instance_percent =
      counters.total_instances == 0
          ? 0.0
          : 100.0 * static_cast<double>(counters.redundant_instances) /
                static_cast<double>(counters.total_instances);
  r.cls = ClassOf(counters);
  return r;
}

size_t Rank(std::vector<ReportRow>& rows, size_t top) {
  std::vector<std::pair<std::string, ReportRow>> keyed;
  keyed.reserve(rows.size());
  for (auto& r : rows) keyed.emplace_back(RowKey(r), std::move(r));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    const uint64_t x = a.second.counters.redundant_bytes();
    const uint64_t y = b.second.counters.redundant_bytes();
    if (x != y) return x > y;
    return a.first < b.first;
  });
  const size_t candidates = keyed.size();
  rows.clear();
  for (size_t i = 0; i < std::min(top, candidates); ++i) {
    rows.push_back(std::move(keyed[i].second));
    rows.back().rank = i + 1;
  }
  return candidates;
}

std::string FormatFraction(const Fraction& f) {
  return f.defined ? fmt::format("{:#.6g}", f.value) : "n/a";
}

const char* FrameLabel(NodeKind kind) {
  switch (kind) {
    case NodeKind::kRoot: return "Root";
    case NodeKind::kFunction: return "Function";
    case NodeKind::kLoop: return "Loop";
    case NodeKind::kLoadSite: return "LoadSite";
  }
  return "?";
}

std::string FrameText(const Frame& f) {
  if (f.kind == NodeKind::kLoop)
    return fmt::format("Loop {}:{}", f.file, f.line);
  return fmt::format("{} {} {}:{}", FrameLabel(f.kind), f.name, f.file, f.line);
}

nlohmann::json FramesJson(const std::vector<Frame>& frames) {
  return ToJson(CanonicalContext{frames});
}

void RenderSection(std::string& out, const char* title,
                   const std::vector<ReportRow>& rows, size_t candidates) {
  out += fmt::format("\n== {} pairs: {} shown of {} ==\n", title, rows.size(),
                     candidates);
  for (const ReportRow& r : rows) {
    const RedundancyCounters& c = r.counters;
    out += fmt::format(
        "\n#{} {} redundant bytes {} ({} precise, {} approx)\n", r.rank, r.cls,
        c.redundant_bytes(), c.redundant_bytes_precise, c.redundant_bytes_approx);
    if (r.object) out += fmt::format("  object: {}\n", *r.object);
    out += fmt::format("  fraction: precise {} approx {}\n",
                       FormatFraction(r.fraction.precise),
                       FormatFraction(r.fraction.approx));
    out += fmt::format("  redundant instances: {:#.6g}% ({} of {})\n",
                       r.instance_percent, c.redundant_instances,
                       c.total_instances);
    out += "  scope: ";
    if (r.scope && !r.scope->empty())
      out += FrameText(r.scope->frames.back());
    else
      out += "none";
    out += '\n';
    size_t depth = 0;
    for (const Frame& f : r.new_ctx.frames)
      out += fmt::format("  {:{}}{}\n", "", 2 * depth++, FrameText(f));
    if (!r.old_ctx) {
      out += fmt::format("  {:{}}(first load)\n", "", 2 * depth);
      continue;
    }
    out += fmt::format("  {:{}}<- loaded before at\n", "", 2 * depth);
    for (const Frame& f : r.old_ctx->frames)
      out += fmt::format("  {:{}}{}\n", "", 2 * depth++, FrameText(f));
  }
}

nlohmann::json RowJson(const ReportRow& r) {
  nlohmann::json j;
  j["rank"] = r.rank;
  j["kind"] = ToString(r.kind);
  j["class"] = r.cls;
  j["object"] = r.object ? nlohmann::json(*r.object) : nlohmann::json(nullptr);
  j["chain"] = FramesJson(r.SyntheticChain());
  j["new"] = ToJson(r.new_ctx);
  j["old"] = r.old_ctx ? ToJson(*r.old_ctx) : nlohmann::json(nullptr);
  j["scope"] = r.scope ? ToJson(*r.scope) : nlohmann::json(nullptr);
  j["redundant_bytes"] = r.counters.redundant_bytes();
  j["counters"] = ToJson(r.counters);
  j["fraction"] = ToJson(r.fraction);
  j["instance_percent"] = r.instance_percent;
  return j;
}

}  // namespace

const char* ToString(RowKind kind) {
  return kind == RowKind::kTemporal ? "temporal" : "spatial";
}

ReportFormat ParseReportFormat(const std::string& name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "json") return ReportFormat::kJson;
  throw UsageError("unknown report format '" + name + "' (text or json)");
}

std::vector<Frame> ReportRow::SyntheticChain() const {
  std::vector<Frame> chain = new_ctx.frames;
  if (old_ctx)
    chain.insert(chain.end(), old_ctx->frames.begin(), old_ctx->frames.end());
  return chain;
}

Report BuildReport(const Profile& profile, size_t top) {
  Report rep;
  rep.threads = profile.threads;
  rep.top = top;
  rep.temporal_program = ProgramFraction(profile.temporal_totals);
  rep.spatial_program = ProgramFraction(profile.spatial_totals);

  for (const auto& [key, counters] : profile.temporal) {
    if (counters.redundant_instances == 0) continue;
    rep.temporal.push_back(
        MakeRow(RowKind::kTemporal, key, counters, profile.temporal_totals));
  }
  for (const auto& [okey, rec] : profile.objects) {
    for (const auto& [key, counters] : rec.pairs) {
      if (counters.redundant_instances == 0) continue;
      ReportRow r =
          MakeRow(RowKind::kSpatial, key, counters, profile.spatial_totals);
      r.object = Describe(okey);
      rep.spatial.push_back(std::move(r));
    }
  }
  rep.temporal_candidates = Rank(rep.temporal, top);
  rep.spatial_candidates = Rank(rep.spatial, top);
  return rep;
}

std::string RenderText(const Report& report) {
  std::string out = fmt::format("redload report ({} thread{})\n", report.threads,
                                report.threads == 1 ? "" : "s");
  out += fmt::format("R_prog temporal: precise {} approx {}\n",
                     FormatFraction(report.temporal_program.precise),
                     FormatFraction(report.temporal_program.approx));
  out += fmt::format("R_prog spatial:  precise {} approx {}\n",
                     FormatFraction(report.spatial_program.precise),
                     FormatFraction(report.spatial_program.approx));
  if (report.top == 0) return out;
  RenderSection(out, "temporal", report.temporal, report.temporal_candidates);
  RenderSection(out, "spatial", report.spatial, report.spatial_candidates);
  return out;
}

nlohmann::json ToJson(const Report& report) {
  nlohmann::json j;
  j["format"] = kReportFormat;
  j["version"] = 1;
  j["threads"] = report.threads;
  j["program"] = {{"temporal", ToJson(report.temporal_program)},
                  {"spatial", ToJson(report.spatial_program)}};
  j["temporal_candidates"] = report.temporal_candidates;
  j["spatial_candidates"] = report.spatial_candidates;
  j["temporal"] = nlohmann::json::array();
  for (const auto& r : report.temporal) j["temporal"].push_back(RowJson(r));
  j["spatial"] = nlohmann::json::array();
  for (const auto& r : report.spatial) j["spatial"].push_back(RowJson(r));
  return j;
}

std::string Render(const Report& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return ToJson(report).dump(1) + "\n";
  return RenderText(report);
}

}  // namespace redload
