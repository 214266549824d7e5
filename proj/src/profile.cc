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

#include "redload/profile.h"

#include <fstream>
#include <unordered_map>
#include <vector>

#include "redload/errors.h"

namespace redload {

using nlohmann::json;

std::string Describe(const ObjectKey& key) {
  if (key.kind == ObjectKind::kStatic) return key.name;
  return "heap@" + Serialize(key.alloc_context);
}

Profile CanonicalizeThread(const TemporalDetector& temporal,
                           const SpatialDetector& spatial,
                           const ContextTree& tree,
                           const ObjectRegistry& registry,
                           const SourceMap& source_map) {
  std::unordered_map<ContextHandle, CanonicalContext> memo;
  auto canon = [&](ContextHandle h) -> const CanonicalContext& {
    auto it = memo.find(h);
    if (it == memo.end())
      it = memo.emplace(h, Canonicalize(h, tree, source_map)).first;
    return it->second;
  };
  auto canon_key = [&](const PairKey& k) {
    CanonicalPairKey out;
    if (k.old_ctx.valid()) out.old_ctx = canon(k.old_ctx);
    out.new_ctx = canon(k.new_ctx);
    if (k.scope.valid()) out.scope = canon(k.scope);
    return out;
  };

  Profile p;
  p.threads = 1;
  for (const auto& [key, counters] : temporal.pairs())
    p.temporal[canon_key(key)] += counters;
  p.temporal_totals = temporal.totals();

  for (const auto& [id, state] : spatial.objects()) {
    const ObjectDescriptor& d = registry.object(id);
    ObjectKey ok;
    ok.kind = d.kind;
    if (d.kind == ObjectKind::kStatic)
      ok.name = d.name;
    else
      ok.alloc_context = d.alloc_context;
    ObjectRecord& rec = p.objects[ok];
    rec.counters += state.counters;
    for (const auto& [key, counters] : state.pairs)
      rec.pairs[canon_key(key)] += counters;
  }
  p.spatial_totals = spatial.totals();
  return p;
}

namespace {

void MergeTable(CanonicalPairTable& into, const CanonicalPairTable& from) {
  for (const auto& [key, counters] : from) into[key] += counters;
}

}  // namespace

void MergeInto(Profile& into, const Profile& from) {
  into.threads += from.threads;
  MergeTable(into.temporal, from.temporal);
  into.temporal_totals += from.temporal_totals;
  for (const auto& [key, rec] : from.objects) {
    ObjectRecord& dst = into.objects[key];
    dst.counters += rec.counters;
    MergeTable(dst.pairs, rec.pairs);
  }
  into.spatial_totals += from.spatial_totals;
}

Profile Merge(const Profile& a, const Profile& b) {
  Profile out = a;
  MergeInto(out, b);
  return out;
}

Profile MergeAll(std::span<const Profile> profiles) {
  if (profiles.empty()) return {};
  std::vector<Profile> level(profiles.begin(), profiles.end());
  while (level.size() > 1) {
    std::vector<Profile> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2) {
      MergeInto(level[i], level[i + 1]);
      next.push_back(std::move(level[i]));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front());
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const char* KindName(NodeKind k) { return ToString(k); }

NodeKind KindFromName(const std::string& s) {
  if (s == "function") return NodeKind::kFunction;
  if (s == "loop") return NodeKind::kLoop;
  if (s == "load") return NodeKind::kLoadSite;
  throw Error("profile: unknown frame kind '" + s + "'");
}

json OptionalContext(const std::optional<CanonicalContext>& ctx) {
  return ctx ? ToJson(*ctx) : json(nullptr);
}

std::optional<CanonicalContext> OptionalContextFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return ContextFromJson(j);
}

RedundancyCounters CountersFromJson(const json& j) {
  RedundancyCounters c;
  c.redundant_bytes_precise = j.at("redundant_bytes_precise").get<uint64_t>();
  c.redundant_bytes_approx = j.at("redundant_bytes_approx").get<uint64_t>();
  c.total_bytes_precise = j.at("total_bytes_precise").get<uint64_t>();
  c.total_bytes_approx = j.at("total_bytes_approx").get<uint64_t>();
  c.redundant_instances = j.at("redundant_instances").get<uint64_t>();
  c.total_instances = j.at("total_instances").get<uint64_t>();
  c.fp_exact_instances = j.at("fp_exact_instances").get<uint64_t>();
  return c;
}

ProgramTotals TotalsFromJson(const json& j) {
  ProgramTotals t;
  t.total_nonfp_bytes = j.at("total_nonfp_bytes").get<uint64_t>();
  t.total_fp_bytes = j.at("total_fp_bytes").get<uint64_t>();
  t.redundant_nonfp_bytes = j.at("redundant_nonfp_bytes").get<uint64_t>();
  t.redundant_fp_bytes = j.at("redundant_fp_bytes").get<uint64_t>();
  return t;
}

json PairsToJson(const CanonicalPairTable& table) {
  json rows = json::array();
  for (const auto& [key, counters] : table) {
    rows.push_back({{"old", OptionalContext(key.old_ctx)},
                    {"new", ToJson(key.new_ctx)},
                    {"scope", OptionalContext(key.scope)},
                    {"counters", ToJson(counters)}});
  }
  return rows;
}

CanonicalPairTable PairsFromJson(const json& rows) {
  CanonicalPairTable table;
  for (const json& row : rows) {
    CanonicalPairKey key;
    key.old_ctx = OptionalContextFromJson(row.at("old"));
    key.new_ctx = ContextFromJson(row.at("new"));
    key.scope = OptionalContextFromJson(row.at("scope"));
    table[key] += CountersFromJson(row.at("counters"));
  }
  return table;
}

}  // namespace

json ToJson(const CanonicalContext& ctx) {
  json frames = json::array();
  for (const Frame& f : ctx.frames) {
    frames.push_back({{"kind", KindName(f.kind)},
                      {"name", f.name},
                      {"file", f.file},
                      {"line", f.line}});
  }
  return frames;
}

CanonicalContext ContextFromJson(const json& j) {
  CanonicalContext ctx;
  for (const json& f : j) {
    Frame frame;
    frame.kind = KindFromName(f.at("kind").get<std::string>());
    frame.name = f.at("name").get<std::string>();
    frame.file = f.at("file").get<std::string>();
    frame.line = f.at("line").get<uint32_t>();
    ctx.frames.push_back(std::move(frame));
  }
  return ctx;
}

json ToJson(const RedundancyCounters& c) {
  return {{"redundant_bytes_precise", c.redundant_bytes_precise},
          {"redundant_bytes_approx", c.redundant_bytes_approx},
          {"total_bytes_precise", c.total_bytes_precise},
          {"total_bytes_approx", c.total_bytes_approx},
          {"redundant_instances", c.redundant_instances},
          {"total_instances", c.total_instances},
          {"fp_exact_instances", c.fp_exact_instances}};
}

json ToJson(const ProgramTotals& t) {
  return {{"total_nonfp_bytes", t.total_nonfp_bytes},
          {"total_fp_bytes", t.total_fp_bytes},
          {"redundant_nonfp_bytes", t.redundant_nonfp_bytes},
          {"redundant_fp_bytes", t.redundant_fp_bytes}};
}

json ToJson(const Fraction& f) { return f.defined ? json(f.value) : json(nullptr); }

json ToJson(const FractionPair& f) {
  return {{"precise", ToJson(f.precise)}, {"approx", ToJson(f.approx)}};
}

json ToJson(const Profile& p) {
  json objects = json::array();
  for (const auto& [key, rec] : p.objects) {
    json o;
    o["kind"] = key.kind == ObjectKind::kStatic ? "static" : "dynamic";
    if (key.kind == ObjectKind::kStatic)
      o["name"] = key.name;
    else
      o["alloc_context"] = ToJson(key.alloc_context);
    o["counters"] = ToJson(rec.counters);
    o["fractions"] = ToJson(ObjectFraction(rec.counters, p.spatial_totals));
    o["pairs"] = PairsToJson(rec.pairs);
    objects.push_back(std::move(o));
  }
  return {
      {"format", kProfileFormat},
      {"version", kProfileVersion},
      {"threads", p.threads},
      {"temporal",
       {{"totals", ToJson(p.temporal_totals)},
        {"fractions", ToJson(ProgramFraction(p.temporal_totals))},
        {"pairs", PairsToJson(p.temporal)}}},
      {"spatial",
       {{"totals", ToJson(p.spatial_totals)},
        {"fractions", ToJson(ProgramFraction(p.spatial_totals))},
        {"objects", std::move(objects)}}},
  };
}

Profile ProfileFromJson(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kProfileFormat)
      throw Error("not a redload profile");
    if (j.at("version").get<int>() != kProfileVersion)
      throw Error("unsupported profile version");
    Profile p;
    p.threads = j.at("threads").get<uint32_t>();
    const json& t = j.at("temporal");
    p.temporal_totals = TotalsFromJson(t.at("totals"));
    p.temporal = PairsFromJson(t.at("pairs"));
    const json& s = j.at("spatial");
    p.spatial_totals = TotalsFromJson(s.at("totals"));
    for (const json& o : s.at("objects")) {
      ObjectKey key;
      const std::string kind = o.at("kind").get<std::string>();
      if (kind == "static") {
        key.kind = ObjectKind::kStatic;
        key.name = o.at("name").get<std::string>();
      } else if (kind == "dynamic") {
        key.kind = ObjectKind::kDynamic;
        key.alloc_context = ContextFromJson(o.at("alloc_context"));
      } else {
        throw Error("unknown object kind '" + kind + "'");
      }
      ObjectRecord& rec = p.objects[key];
      rec.counters += CountersFromJson(o.at("counters"));
      for (auto& [k, c] : PairsFromJson(o.at("pairs"))) rec.pairs[k] += c;
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed profile: ") + e.what());
  }
}

void SaveProfile(const Profile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << ToJson(profile).dump(1) << "\n";
  if (!out) throw Error("failed writing '" + path + "'");
}

Profile LoadProfile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return ProfileFromJson(j);
  } catch (const Error& e) {
    throw Error("'" + path + "': " + e.what());
  }
}

}  // namespace redload
