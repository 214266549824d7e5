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

#ifndef REDLOAD_ANALYZER_H_
#define REDLOAD_ANALYZER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "redload/context_tree.h"
#include "redload/profile.h"
#include "redload/sampler.h"
#include "redload/scope_resolver.h"
#include "redload/shadow_memory.h"
#include "redload/spatial_detector.h"
#include "redload/temporal_detector.h"
#include "redload/trace.h"

namespace redload {

struct AnalyzerConfig {
  SamplingConfig sampling;
  double approx_epsilon = kDefaultApproxEpsilon;
  uint32_t scope_budget = 1;
};

// Everything the pipeline decided about one load event.
struct LoadObservation {
  uint64_t event_index = 0;
  const TraceEvent* event = nullptr;
  ContextHandle ctx;
  uint64_t ts = 0;
  bool monitored = false;
  LoadVerdict temporal;
  SpatialVerdict spatial;
};

// Replays a multiplexed trace: one context tree, shadow table and pair of
// detectors per thread, one object registry shared in trace order.
class Analyzer : public TraceSink {
 public:
  explicit Analyzer(AnalyzerConfig config = {});
  ~Analyzer() override;

  void Begin(const SourceMap& source_map) override;
  // Throws MalformedTraceError carrying the event position.
  void Event(const TraceEvent& event) override;

  void set_observer(std::function<void(const LoadObservation&)> observer) {
    observer_ = std::move(observer);
  }

  // Canonicalizes every thread and reduces them into one profile.
  Profile Finish() const;

  const ContextTree& tree(uint32_t thread_id) const;
  const ObjectRegistry& registry() const { return registry_; }
  const SourceMap& source_map() const { return source_map_; }
  uint64_t event_count() const { return events_; }

 private:
  struct ThreadState;
  ThreadState& Thread(uint32_t thread_id);
  void Dispatch(const TraceEvent& e);

  AnalyzerConfig config_;
  SourceMap source_map_;
  ObjectRegistry registry_;
  std::map<uint32_t, std::unique_ptr<ThreadState>> threads_;
  std::function<void(const LoadObservation&)> observer_;
  uint64_t events_ = 0;
};

Profile AnalyzeTrace(const Trace& trace, const AnalyzerConfig& config = {});

// Streams a binary trace file (text traces are loaded whole). Errors name
// the file.
Profile AnalyzeFile(const std::string& path, const AnalyzerConfig& config = {});

}  // namespace redload

#endif  // REDLOAD_ANALYZER_H_
