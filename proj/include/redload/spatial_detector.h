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

#ifndef REDLOAD_SPATIAL_DETECTOR_H_
#define REDLOAD_SPATIAL_DETECTOR_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "redload/canonical_context.h"
#include "redload/context_tree.h"
#include "redload/redundancy.h"
#include "redload/scope_resolver.h"
#include "redload/temporal_detector.h"
#include "redload/trace.h"

namespace redload {

enum class ObjectKind : uint8_t { kStatic, kDynamic };

struct ObjectDescriptor {
  uint64_t object_id = 0;
  ObjectKind kind = ObjectKind::kStatic;
  std::string name;                  // static objects
  CanonicalContext alloc_context;    // dynamic objects
  uint64_t base = 0;
  uint64_t size = 0;
  bool live = true;

  bool contains(uint64_t addr) const {
    return addr >= base && addr - base < size;
  }
};

// Address ranges of live static and dynamic objects. Retired objects stay
// addressable by id for reporting.
class ObjectRegistry {
 public:
  // Throw StateError on empty or overlapping ranges.
  uint64_t OnAlloc(uint64_t base, uint64_t size, CanonicalContext alloc_ctx);
  void OnStaticImage(const std::vector<StaticObject>& objects);
  // Throws StateError unless `base` starts a live dynamic object.
  void OnFree(uint64_t base);

  // The live object containing addr, or nullptr (stack, unmapped).
  const ObjectDescriptor* Lookup(uint64_t addr) const;
  const ObjectDescriptor& object(uint64_t object_id) const;

  size_t live_count() const { return live_.size(); }
  size_t object_count() const { return objects_.size(); }
  const std::vector<ObjectDescriptor>& objects() const { return objects_; }

 private:
  uint64_t Insert(ObjectDescriptor desc);

  std::vector<ObjectDescriptor> objects_;  // indexed by object_id
  std::map<uint64_t, uint64_t> live_;      // base -> object_id
};

struct SpatialVerdict {
  bool hit = false;  // the load fell inside a live object
  uint64_t object_id = 0;
  bool redundant = false;
  bool fp_exact = false;
  RedundancyClass cls = RedundancyClass::kPrecise;
  bool has_prior = false;
  ContextHandle prior_ctx;
  uint64_t prior_ts = 0;
  ContextHandle scope;
};

// Per-thread state of one object: the singleton previous value and the
// counters attributed to it.
struct ObjectLoadState {
  bool has_prior = false;
  std::array<uint8_t, kMaxLoadSize> value{};
  uint8_t size = 0;
  FpClass fp_class = FpClass::kNonFp;
  ContextHandle ctx;
  uint64_t ts = 0;
  RedundancyCounters counters;
  PairTable pairs;
};

class SpatialDetector {
 public:
  explicit SpatialDetector(double epsilon = kDefaultApproxEpsilon)
      : epsilon_(epsilon) {}

  // Looks the object up by the load's start address, compares with the
  // object's previous value (widths and FP classes must agree), then makes
  // this load the object's previous one.
  SpatialVerdict ProcessLoad(const TraceEvent& load,
                             const ObjectRegistry& registry, ContextHandle ctx,
                             uint64_t ts, ScopeResolver& scopes);

  const std::unordered_map<uint64_t, ObjectLoadState>& objects() const {
    return objects_;
  }
  const ProgramTotals& totals() const { return totals_; }

 private:
  double epsilon_;
  std::unordered_map<uint64_t, ObjectLoadState> objects_;
  ProgramTotals totals_;
};

// Redundant bytes of one object over the bytes loaded from all objects, per
// class. `all_objects` are the summed spatial totals.
FractionPair ObjectFraction(const RedundancyCounters& object,
                            const ProgramTotals& all_objects);

}  // namespace redload

#endif  // REDLOAD_SPATIAL_DETECTOR_H_
