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

#include "redload/analyzer.h"

#include <cstring>
#include <fstream>
#include <optional>
#include <vector>

#include "redload/errors.h"

namespace redload {

struct Analyzer::ThreadState {
  ThreadState(const SourceMap& source_map, const AnalyzerConfig& config)
      : tree(&source_map),
        temporal(config.approx_epsilon),
        spatial(config.approx_epsilon),
        temporal_scopes(tree, config.scope_budget),
        spatial_scopes(tree, config.scope_budget) {}

  ContextTree tree;
  ShadowTable shadow;
  TemporalDetector temporal;
  SpatialDetector spatial;
  ScopeResolver temporal_scopes;
  ScopeResolver spatial_scopes;
  std::optional<uint64_t> last_ins;
};

Analyzer::Analyzer(AnalyzerConfig config) : config_(config) {
  Validate(config_.sampling);
  if (config_.scope_budget == 0)
    throw ConfigError("scope budget must be at least 1");
  if (!(config_.approx_epsilon >= 0))
    throw ConfigError("approx epsilon must be non-negative");
}

Analyzer::~Analyzer() = default;

void Analyzer::Begin(const SourceMap& source_map) { source_map_ = source_map; }

Analyzer::ThreadState& Analyzer::Thread(uint32_t thread_id) {
  auto& slot = threads_[thread_id];
  if (!slot) slot = std::make_unique<ThreadState>(source_map_, config_);
  return *slot;
}

const ContextTree& Analyzer::tree(uint32_t thread_id) const {
  auto it = threads_.find(thread_id);
  if (it == threads_.end())
    throw LookupError("no thread " + std::to_string(thread_id));
  return it->second->tree;
}

void Analyzer::Event(const TraceEvent& e) {
  try {
    Dispatch(e);
  } catch (const StateError& err) {
    throw MalformedTraceError(err.what(), events_);
  } catch (const LookupError& err) {
    throw MalformedTraceError(err.what(), events_);
  }
  ++events_;
}

void Analyzer::Dispatch(const TraceEvent& e) {
  ThreadState& t = Thread(e.thread_id);
  if (t.last_ins && e.ins_index <= *t.last_ins)
    throw StateError("ins_index not strictly increasing for thread " +
                     std::to_string(e.thread_id));
  t.last_ins = e.ins_index;

  switch (e.kind) {
    case EventKind::kLoad: {
      if (!IsValidLoadSize(e.size)) throw StateError("invalid load size");
      const size_t width = FpWidth(e.fp_class);
      if (width != 0 && e.size % width != 0)
        throw StateError("load size not a multiple of its FP width");
      auto [ctx, ts] = t.tree.CurrentLoadContext(e.site_id);
      LoadObservation obs;
      obs.event_index = events_;
      obs.event = &e;
      obs.ctx = ctx;
      obs.ts = ts;
      obs.monitored = IsMonitored(e.ins_index, config_.sampling);
      if (obs.monitored) {
        obs.temporal =
            t.temporal.ProcessLoad(e, t.shadow, ctx, ts, t.temporal_scopes);
        obs.spatial =
            t.spatial.ProcessLoad(e, registry_, ctx, ts, t.spatial_scopes);
      }
      if (observer_) observer_(obs);
      break;
    }
    case EventKind::kCall:
      t.tree.OnCall(e.site_id);
      break;
    case EventKind::kReturn:
      t.tree.OnReturn();
      break;
    case EventKind::kLoopHead:
      t.tree.OnLoopHead(e.loop_id);
      break;
    case EventKind::kAlloc:
      registry_.OnAlloc(e.addr, e.size,
                        Canonicalize(t.tree.current(), t.tree, source_map_));
      break;
    case EventKind::kFree:
      registry_.OnFree(e.addr);
      break;
    case EventKind::kStaticImage:
      registry_.OnStaticImage(e.objects);
      break;
    case EventKind::kThreadStart:
      break;
  }
}

Profile Analyzer::Finish() const {
  std::vector<Profile> per_thread;
  per_thread.reserve(threads_.size());
  for (const auto& [tid, t] : threads_) {
    per_thread.push_back(CanonicalizeThread(t->temporal, t->spatial, t->tree,
                                            registry_, source_map_));
  }
  return MergeAll(per_thread);
}

Profile AnalyzeTrace(const Trace& trace, const AnalyzerConfig& config) {
  Analyzer analyzer(config);
  analyzer.Begin(trace.source_map);
  for (const TraceEvent& e : trace.events) analyzer.Event(e);
  analyzer.End();
  return analyzer.Finish();
}

Profile AnalyzeFile(const std::string& path, const AnalyzerConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace '" + path + "'");
  try {
    char head[5] = {};
    in.read(head, 5);
    const bool text = in.gcount() == 5 && std::memcmp(head, "LRT1 ", 5) == 0;
    in.clear();
    in.seekg(0);
    if (text) return AnalyzeTrace(ReadTextTrace(in), config);

    BinaryTraceReader reader(in);
    Analyzer analyzer(config);
    analyzer.Begin(reader.source_map());
    while (auto e = reader.Next()) analyzer.Event(*e);
    analyzer.End();
    return analyzer.Finish();
  } catch (const Error& err) {
    throw Error("'" + path + "': " + err.what());
  }
}

}  // namespace redload
