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

#include "compare.h"

#include <map>

#include <fmt/format.h>

#include "redload/canonical_context.h"

namespace redload::testing {

namespace {

using NameCache = std::map<std::pair<uint32_t, uint32_t>, std::string>;

const std::string& Ctx(NameCache& cache, uint32_t tid, ContextHandle h,
                       const ContextTree& tree, const SourceMap& map) {
  auto [it, inserted] = cache.try_emplace({tid, h.value});
  if (inserted && h.valid()) it->second = Serialize(Canonicalize(h, tree, map));
  return it->second;
}

CanonicalPairTable Fold(const CanonicalPairTable& table) {
  CanonicalPairTable out;
  for (const auto& [key, counters] : table) {
    CanonicalPairKey k = key;
    k.scope.reset();
    out[k] += counters;
  }
  return out;
}

}  // namespace

AnalyzerConfig FullMonitoring(uint32_t scope_budget) {
  AnalyzerConfig c;
  c.sampling = SamplingConfig::Disabled();
  c.scope_budget = scope_budget;
  return c;
}

std::vector<OracleVerdict> EngineVerdicts(const Trace& trace,
                                          const AnalyzerConfig& config,
                                          Profile* profile) {
  std::vector<OracleVerdict> out;
  NameCache names;
  Analyzer analyzer(config);
  analyzer.set_observer([&](const LoadObservation& o) {
    const ContextTree& tree = analyzer.tree(o.event->thread_id);
    const SourceMap& map = analyzer.source_map();
    const uint32_t tid = o.event->thread_id;
    auto Name = [&](ContextHandle h) { return Ctx(names, tid, h, tree, map); };
    OracleVerdict v;
    v.event_index = o.event_index;
    v.thread_id = o.event->thread_id;
    v.ctx = Name(o.ctx);
    v.ts = o.ts;
    v.monitored = o.monitored;
    if (o.monitored) {
      v.temporal_redundant = o.temporal.redundant;
      v.temporal_has_prior = o.temporal.has_prior;
      v.temporal_prior = Name(o.temporal.prior_ctx);
      v.temporal_scope = Name(o.temporal.scope);
      v.spatial_hit = o.spatial.hit;
      if (o.spatial.hit) {
        const ObjectDescriptor& d = analyzer.registry().object(o.spatial.object_id);
        ObjectKey key{d.kind, d.kind == ObjectKind::kStatic ? d.name : "",
                      d.kind == ObjectKind::kDynamic ? d.alloc_context
                                                     : CanonicalContext{}};
        v.spatial_object = Describe(key);
      }
      v.spatial_redundant = o.spatial.redundant;
      v.spatial_has_prior = o.spatial.has_prior;
      v.spatial_prior = Name(o.spatial.prior_ctx);
      v.spatial_scope = Name(o.spatial.scope);
    }
    out.push_back(std::move(v));
  });
  analyzer.Begin(trace.source_map);
  for (const TraceEvent& e : trace.events) analyzer.Event(e);
  analyzer.End();
  if (profile) *profile = analyzer.Finish();
  return out;
}

std::string DiffVerdicts(const std::vector<OracleVerdict>& engine,
                         const std::vector<OracleVerdict>& oracle,
                         VerdictPart part) {
  if (engine.size() != oracle.size())
    return fmt::format("load count {} vs {}", engine.size(), oracle.size());
  for (size_t i = 0; i < engine.size(); ++i) {
    const OracleVerdict& a = engine[i];
    const OracleVerdict& b = oracle[i];
    auto diff = [&](const char* what, const auto& x, const auto& y) {
      return fmt::format("event {} ({}): {} engine={} oracle={}", a.event_index,
                         a.ctx, what, x, y);
    };
    if (a.event_index != b.event_index)
      return diff("event index", a.event_index, b.event_index);
    if (a.ctx != b.ctx) return diff("context", a.ctx, b.ctx);
    if (a.ts != b.ts) return diff("timestamp", a.ts, b.ts);
    if (a.monitored != b.monitored) return diff("monitored", a.monitored, b.monitored);
    switch (part) {
      case VerdictPart::kTemporal:
        if (a.temporal_redundant != b.temporal_redundant)
          return diff("temporal redundant", a.temporal_redundant, b.temporal_redundant);
        if (a.temporal_has_prior != b.temporal_has_prior)
          return diff("temporal prior", a.temporal_has_prior, b.temporal_has_prior);
        if (a.temporal_prior != b.temporal_prior)
          return diff("temporal prior context", a.temporal_prior, b.temporal_prior);
        break;
      case VerdictPart::kSpatial:
        if (a.spatial_hit != b.spatial_hit)
          return diff("object hit", a.spatial_hit, b.spatial_hit);
        if (a.spatial_object != b.spatial_object)
          return diff("object", a.spatial_object, b.spatial_object);
        if (a.spatial_redundant != b.spatial_redundant)
          return diff("spatial redundant", a.spatial_redundant, b.spatial_redundant);
        if (a.spatial_prior != b.spatial_prior)
          return diff("spatial prior context", a.spatial_prior, b.spatial_prior);
        break;
      case VerdictPart::kScope:
        if (a.temporal_scope != b.temporal_scope)
          return diff("temporal scope", a.temporal_scope, b.temporal_scope);
        if (a.spatial_scope != b.spatial_scope)
          return diff("spatial scope", a.spatial_scope, b.spatial_scope);
        break;
    }
  }
  return "";
}

Profile WithoutScopes(const Profile& profile) {
  Profile out = profile;
  out.temporal = Fold(profile.temporal);
  for (auto& [key, rec] : out.objects) rec.pairs = Fold(rec.pairs);
  return out;
}

std::string DiffProfiles(const Profile& a, const Profile& b) {
  if (a.threads != b.threads) return fmt::format("threads {} vs {}", a.threads, b.threads);
  if (a.temporal_totals != b.temporal_totals) return "temporal totals";
  if (a.spatial_totals != b.spatial_totals) return "spatial totals";
  if (a.temporal.size() != b.temporal.size())
    return fmt::format("temporal rows {} vs {}", a.temporal.size(), b.temporal.size());
  if (a.temporal != b.temporal) return "temporal pair counters";
  if (a.objects.size() != b.objects.size())
    return fmt::format("objects {} vs {}", a.objects.size(), b.objects.size());
  for (auto ia = a.objects.begin(), ib = b.objects.begin(); ia != a.objects.end();
       ++ia, ++ib) {
    if (ia->first != ib->first) return "object keys";
    if (ia->second.counters != ib->second.counters)
      return "object counters of " + Describe(ia->first);
    if (ia->second.pairs != ib->second.pairs)
      return "object pairs of " + Describe(ia->first);
  }
  return "";
}

}  // namespace redload::testing
