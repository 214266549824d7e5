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

#include "redload/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

#include "redload/errors.h"

namespace redload {

namespace {

struct RawFrame {
  NodeKind kind;
  uint32_t id;
  auto operator<=>(const RawFrame&) const = default;
};

using RawPath = std::vector<RawFrame>;  // root excluded

bool NearlyEqual(double a, double b, double eps) {
  if (std::memcmp(&a, &b, sizeof a) == 0) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= eps * std::max(std::fabs(a), std::fabs(b));
}

bool NearlyEqual(float a, float b, double eps) {
  if (std::memcmp(&a, &b, sizeof a) == 0) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double x = a;
  const double y = b;
  return std::fabs(x - y) <= eps * std::max(std::fabs(x), std::fabs(y));
}

// Returns {redundant, bit_exact}.
std::pair<bool, bool> Same(const std::vector<uint8_t>& a,
                           const std::vector<uint8_t>& b, FpClass fp,
                           double eps) {
  const bool exact = a == b;
  if (fp == FpClass::kNonFp) return {exact, exact};
  bool all = true;
  if (fp == FpClass::kF64) {
    for (size_t i = 0; i + 8 <= a.size(); i += 8) {
      double x, y;
      std::memcpy(&x, &a[i], 8);
      std::memcpy(&y, &b[i], 8);
      all = all && NearlyEqual(x, y, eps);
    }
  } else {
    for (size_t i = 0; i + 4 <= a.size(); i += 4) {
      float x, y;
      std::memcpy(&x, &a[i], 4);
      std::memcpy(&y, &b[i], 4);
      all = all && NearlyEqual(x, y, eps);
    }
  }
  return {all, exact};
}

void Count(RedundancyCounters& c, uint64_t bytes, FpClass fp, bool redundant,
           bool exact) {
  const bool approx = fp != FpClass::kNonFp;
  (approx ? c.total_bytes_approx : c.total_bytes_precise) += bytes;
  if (redundant) (approx ? c.redundant_bytes_approx : c.redundant_bytes_precise) += bytes;
  c.total_instances += 1;
  if (redundant) c.redundant_instances += 1;
  if (redundant && approx && exact) c.fp_exact_instances += 1;
}

void Count(ProgramTotals& t, uint64_t bytes, FpClass fp, bool redundant) {
  if (fp == FpClass::kNonFp) {
    t.total_nonfp_bytes += bytes;
    if (redundant) t.redundant_nonfp_bytes += bytes;
  } else {
    t.total_fp_bytes += bytes;
    if (redundant) t.redundant_fp_bytes += bytes;
  }
}

struct OracleObject {
  ObjectKey key;
  uint64_t base;
  uint64_t size;
  bool live;
};

struct ByteCell {
  uint8_t value;
  size_t ctx;
  uint64_t ts;
};

struct ObjectMemory {
  std::vector<uint8_t> value;
  FpClass fp;
  size_t ctx;
  uint64_t ts;
};

struct ThreadModel {
  RawPath path;
  std::vector<size_t> frame_starts;
  uint64_t clock = 0;
  std::map<RawPath, std::vector<uint64_t>> passes;
  std::map<uint64_t, ByteCell> memory;
  std::map<size_t, ObjectMemory> object_memory;
  std::map<RawPath, size_t> ids;
  std::vector<RawPath> paths;
  std::vector<CanonicalContext> canon;
  std::vector<std::string> text;

  size_t Intern(const RawPath& p) {
    auto [it, inserted] = ids.emplace(p, paths.size());
    if (inserted) paths.push_back(p);
    return it->second;
  }
};

class Oracle {
 public:
  Oracle(const SourceMap& map, double eps, const SamplingConfig& sampling)
      : map_(map), eps_(eps), sampling_(sampling) {}

  void Step(uint64_t index, const TraceEvent& e) {
    ThreadModel& t = threads_[e.thread_id];
    switch (e.kind) {
      case EventKind::kCall:
        t.frame_starts.push_back(t.path.size());
        t.path.push_back({NodeKind::kFunction, e.site_id});
        break;
      case EventKind::kReturn:
        if (t.frame_starts.empty()) throw StateError("unbalanced return");
        t.path.resize(t.frame_starts.back());
        t.frame_starts.pop_back();
        break;
      case EventKind::kLoopHead:
        LoopHead(t, e.loop_id);
        break;
      case EventKind::kLoad:
        Load(t, index, e);
        break;
      case EventKind::kAlloc:
        objects_.push_back({{ObjectKind::kDynamic, "", Canon(t.path)},
                            e.addr, e.size, true});
        break;
      case EventKind::kFree:
        for (auto& o : objects_)
          if (o.live && o.key.kind == ObjectKind::kDynamic && o.base == e.addr)
            o.live = false;
        break;
      case EventKind::kStaticImage:
        for (const auto& s : e.objects)
          objects_.push_back({{ObjectKind::kStatic, s.name, {}}, s.base, s.size, true});
        break;
      case EventKind::kThreadStart:
        break;
    }
  }

  OracleResult Finish() {
    result_.profile.threads = static_cast<uint32_t>(threads_.size());
    return std::move(result_);
  }

 private:
  void LoopHead(ThreadModel& t, uint32_t loop) {
    const size_t lo = t.frame_starts.empty() ? 0 : t.frame_starts.back() + 1;
    auto on_path = [&](uint32_t id) -> std::optional<size_t> {
      for (size_t i = t.path.size(); i > lo; --i)
        if (t.path[i - 1] == RawFrame{NodeKind::kLoop, id}) return i - 1;
      return std::nullopt;
    };
    if (auto at = on_path(loop)) {
      t.path.resize(*at + 1);
    } else {
      const uint32_t parent = map_.loop(loop).parent;
      if (parent == kNoLoop) {
        t.path.resize(lo);
      } else if (auto p = on_path(parent)) {
        t.path.resize(*p + 1);
      }
      t.path.push_back({NodeKind::kLoop, loop});
    }
    t.passes[t.path].push_back(++t.clock);
  }

  CanonicalContext Canon(const RawPath& p) const {
    CanonicalContext c;
    for (const RawFrame& f : p) {
      if (f.kind == NodeKind::kLoop) {
        const LoopInfo& l = map_.loop(f.id);
        c.frames.push_back({NodeKind::kLoop, "loop", l.file, l.line});
      } else {
        const SiteInfo& s = map_.site(f.id);
        c.frames.push_back({f.kind, s.function, s.file, s.line});
      }
    }
    return c;
  }

  // Interns `p` in the thread and makes sure its names are cached.
  size_t Named(ThreadModel& t, const RawPath& p) const {
    const size_t id = t.Intern(p);
    if (id == t.canon.size()) {
      t.canon.push_back(Canon(p));
      t.text.push_back(Serialize(t.canon.back()));
    }
    return id;
  }

  // Outermost loop common to both paths with a header pass strictly between
  // the two timestamps.
  std::optional<RawPath> Scope(const ThreadModel& t, const RawPath& old_path,
                               uint64_t old_ts, const RawPath& new_path,
                               uint64_t new_ts) const {
    RawPath prefix;
    for (size_t i = 0; i < std::min(old_path.size(), new_path.size()); ++i) {
      if (old_path[i] != new_path[i]) break;
      prefix.push_back(old_path[i]);
      if (prefix.back().kind != NodeKind::kLoop) continue;
      auto it = t.passes.find(prefix);
      if (it == t.passes.end()) continue;
      // Pass times are appended in increasing order.
      auto pass = std::upper_bound(it->second.begin(), it->second.end(), old_ts);
      if (pass != it->second.end() && *pass < new_ts) return prefix;
    }
    return std::nullopt;
  }

  void Load(ThreadModel& t, uint64_t index, const TraceEvent& e) {
    RawPath here = t.path;
    here.push_back({NodeKind::kLoadSite, e.site_id});
    const uint64_t ts = ++t.clock;
    const size_t ctx_id = Named(t, here);
    OracleVerdict v;
    v.event_index = index;
    v.thread_id = e.thread_id;
    v.ctx = t.text[ctx_id];
    v.ts = ts;
    v.monitored = !sampling_.enabled ||
                  e.ins_index % (sampling_.window_enable + sampling_.window_disable) <
                      sampling_.window_enable;
    if (!v.monitored) {
      result_.loads.push_back(std::move(v));
      return;
    }
    const std::vector<uint8_t> value(e.value.begin(), e.value.begin() + e.size);
    Profile& prof = result_.profile;

    // Fills the pair key and verdict strings from a prior load.
    auto describe_prior = [&](size_t prior_id, uint64_t prior_ts,
                              CanonicalPairKey& key, std::string& prior_text,
                              std::string& scope_text) {
      const RawPath prior = t.paths[prior_id];
      prior_text = t.text[prior_id];
      key.old_ctx = t.canon[prior_id];
      if (auto s = Scope(t, prior, prior_ts, here, ts)) {
        const size_t scope_id = Named(t, *s);
        key.scope = t.canon[scope_id];
        scope_text = t.text[scope_id];
      }
    };

    // Temporal: last value loaded at each byte.
    {
      std::vector<uint8_t> old(e.size);
      bool complete = true;
      for (uint64_t i = 0; i < e.size; ++i) {
        auto it = t.memory.find(e.addr + i);
        if (it == t.memory.end())
          complete = false;
        else
          old[i] = it->second.value;
      }
      auto [redundant, exact] =
          complete ? Same(old, value, e.fp_class, eps_) : std::pair{false, false};
      CanonicalPairKey key;
      key.new_ctx = t.canon[ctx_id];
      auto first = t.memory.find(e.addr);
      if (first != t.memory.end()) {
        v.temporal_has_prior = true;
        describe_prior(first->second.ctx, first->second.ts, key, v.temporal_prior,
                       v.temporal_scope);
      }
      v.temporal_redundant = redundant;
      Count(prof.temporal[key], e.size, e.fp_class, redundant, exact);
      Count(prof.temporal_totals, e.size, e.fp_class, redundant);
      for (uint64_t i = 0; i < e.size; ++i)
        t.memory[e.addr + i] = {value[i], ctx_id, ts};
    }

    // Spatial: last value loaded anywhere in the enclosing object.
    for (size_t id = 0; id < objects_.size(); ++id) {
      const OracleObject& o = objects_[id];
      if (!o.live || e.addr < o.base || e.addr - o.base >= o.size) continue;
      v.spatial_hit = true;
      v.spatial_object = Describe(o.key);
      bool redundant = false;
      bool exact = false;
      CanonicalPairKey key;
      key.new_ctx = t.canon[ctx_id];
      auto it = t.object_memory.find(id);
      if (it != t.object_memory.end()) {
        const ObjectMemory& m = it->second;
        if (m.value.size() == value.size() && m.fp == e.fp_class)
          std::tie(redundant, exact) = Same(m.value, value, e.fp_class, eps_);
        v.spatial_has_prior = true;
        describe_prior(m.ctx, m.ts, key, v.spatial_prior, v.spatial_scope);
      }
      v.spatial_redundant = redundant;
      ObjectRecord& rec = prof.objects[o.key];
      Count(rec.counters, e.size, e.fp_class, redundant, exact);
      Count(rec.pairs[key], e.size, e.fp_class, redundant, exact);
      Count(prof.spatial_totals, e.size, e.fp_class, redundant);
      t.object_memory[id] = {value, e.fp_class, ctx_id, ts};
      break;
    }
    result_.loads.push_back(std::move(v));
  }

  const SourceMap& map_;
  double eps_;
  SamplingConfig sampling_;
  std::map<uint32_t, ThreadModel> threads_;
  std::vector<OracleObject> objects_;
  OracleResult result_;
};

// Collects a trace and refuses once it grows past the oracle's limit.
class BoundedSink : public TraceSink {
 public:
  void Begin(const SourceMap& map) override { trace_.source_map = map; }
  void Event(const TraceEvent& e) override {
    if (e.kind == EventKind::kLoad && ++loads_ > kOracleMaxLoads)
      throw SizeError("scenario exceeds " + std::to_string(kOracleMaxLoads) +
                      " loads; too large for the oracle");
    trace_.events.push_back(e);
  }
  void End() override {}
  Trace& trace() { return trace_; }

 private:
  Trace trace_;
  uint64_t loads_ = 0;
};

}  // namespace

OracleResult ComputeOracle(const Trace& trace, double epsilon,
                           const SamplingConfig& sampling) {
  Oracle oracle(trace.source_map, epsilon, sampling);
  for (size_t i = 0; i < trace.events.size(); ++i)
    oracle.Step(i, trace.events[i]);
  return oracle.Finish();
}

Profile ExpectedRedundancy(const Scenario& scenario, double epsilon) {
  BoundedSink sink;
  Generate(scenario, sink);
  return ComputeOracle(sink.trace(), epsilon).profile;
}

}  // namespace redload
