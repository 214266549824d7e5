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

#ifndef REDLOAD_TEMPORAL_DETECTOR_H_
#define REDLOAD_TEMPORAL_DETECTOR_H_

#include <cstdint>
#include <unordered_map>

#include "redload/context_tree.h"
#include "redload/redundancy.h"
#include "redload/scope_resolver.h"
#include "redload/shadow_memory.h"
#include "redload/trace.h"

namespace redload {

// Thread-local key of a redundancy pair. old_ctx is kNoContext for a load
// with no monitored predecessor; scope is kNoContext when no loop qualifies.
struct PairKey {
  ContextHandle old_ctx;
  ContextHandle new_ctx;
  ContextHandle scope;

  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  size_t operator()(const PairKey& k) const noexcept {
    uint64_t h = (uint64_t{k.old_ctx.value} << 32) ^ k.new_ctx.value;
    h = h * 0x9E3779B97F4A7C15ull ^ k.scope.value;
    return std::hash<uint64_t>{}(h);
  }
};

using PairTable = std::unordered_map<PairKey, RedundancyCounters, PairKeyHash>;

struct LoadVerdict {
  bool redundant = false;
  bool fp_exact = false;
  RedundancyClass cls = RedundancyClass::kPrecise;
  bool has_prior = false;
  ContextHandle prior_ctx;
  uint64_t prior_ts = 0;
  ContextHandle scope;
};

class TemporalDetector {
 public:
  explicit TemporalDetector(double epsilon = kDefaultApproxEpsilon)
      : epsilon_(epsilon) {}

  // Classifies one monitored load against the shadow, attributes it to
  // <C_old, C_new, scope> and updates the shadow unconditionally. C_old and
  // T_old come from the shadow byte at the load's start address.
  LoadVerdict ProcessLoad(const TraceEvent& load, ShadowTable& shadow,
                          ContextHandle ctx, uint64_t ts,
                          ScopeResolver& scopes);

  const PairTable& pairs() const { return pairs_; }
  const ProgramTotals& totals() const { return totals_; }
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
  PairTable pairs_;
  ProgramTotals totals_;
};

}  // namespace redload

#endif  // REDLOAD_TEMPORAL_DETECTOR_H_
