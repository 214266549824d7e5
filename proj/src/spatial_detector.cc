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

#include "redload/spatial_detector.h"

#include <algorithm>

#include "redload/errors.h"

namespace redload {

uint64_t ObjectRegistry::Insert(ObjectDescriptor desc) {
  if (desc.size == 0) throw StateError("object with empty range");
  if (desc.base + desc.size < desc.base)
    throw StateError("object range wraps the address space");
  auto next = live_.lower_bound(desc.base);
  if (next != live_.end() && next->first < desc.base + desc.size)
    throw StateError("object range overlaps a live object");
  if (next != live_.begin()) {
    const ObjectDescriptor& prev = objects_[std::prev(next)->second];
    if (prev.base + prev.size > desc.base)
      throw StateError("object range overlaps a live object");
  }
  desc.object_id = objects_.size();
  desc.live = true;
  live_.emplace(desc.base, desc.object_id);
  objects_.push_back(std::move(desc));
  return objects_.back().object_id;
}

uint64_t ObjectRegistry::OnAlloc(uint64_t base, uint64_t size,
                                 CanonicalContext alloc_ctx) {
  ObjectDescriptor d;
  d.kind = ObjectKind::kDynamic;
  d.alloc_context = std::move(alloc_ctx);
  d.base = base;
  d.size = size;
  return Insert(std::move(d));
}

void ObjectRegistry::OnStaticImage(const std::vector<StaticObject>& objects) {
  for (const StaticObject& o : objects) {
    ObjectDescriptor d;
    d.kind = ObjectKind::kStatic;
    d.name = o.name;
    d.base = o.base;
    d.size = o.size;
    Insert(std::move(d));
  }
}

void ObjectRegistry::OnFree(uint64_t base) {
  auto it = live_.find(base);
  if (it == live_.end() || objects_[it->second].kind != ObjectKind::kDynamic)
    throw StateError("free of an address that is not a live allocation");
  objects_[it->second].live = false;
  live_.erase(it);
}

const ObjectDescriptor* ObjectRegistry::Lookup(uint64_t addr) const {
  auto it = live_.upper_bound(addr);
  if (it == live_.begin()) return nullptr;
  const ObjectDescriptor& d = objects_[std::prev(it)->second];
  return d.contains(addr) ? &d : nullptr;
}

const ObjectDescriptor& ObjectRegistry::object(uint64_t object_id) const {
  if (object_id >= objects_.size())
    throw LookupError("unknown object id " + std::to_string(object_id));
  return objects_[object_id];
}

SpatialVerdict SpatialDetector::ProcessLoad(const TraceEvent& load,
                                            const ObjectRegistry& registry,
                                            ContextHandle ctx, uint64_t ts,
                                            ScopeResolver& scopes) {
  SpatialVerdict v;
  const ObjectDescriptor* obj = registry.Lookup(load.addr);
  if (obj == nullptr) return v;
  v.hit = true;
  v.object_id = obj->object_id;
  v.cls = ClassOf(load.fp_class);

  ObjectLoadState& st = objects_[obj->object_id];
  PairKey key{kNoContext, ctx, kNoContext};
  if (st.has_prior) {
    v.has_prior = true;
    v.prior_ctx = st.ctx;
    v.prior_ts = st.ts;
    if (st.size == load.size && st.fp_class == load.fp_class) {
      ValueMatch m = CompareValues(std::span(st.value.data(), st.size),
                                   load.value_bytes(), load.fp_class, epsilon_);
      v.redundant = m.equal;
      v.fp_exact = m.bit_exact && load.fp_class != FpClass::kNonFp;
    }
    v.scope = scopes.Resolve({st.ctx, st.ts, ctx, ts});
    key.old_ctx = st.ctx;
    key.scope = v.scope;
  }

  st.counters.Record(load.size, v.cls, v.redundant, v.fp_exact);
  st.pairs[key].Record(load.size, v.cls, v.redundant, v.fp_exact);
  totals_.Record(load.size, v.cls, v.redundant);

  st.has_prior = true;
  std::copy_n(load.value.begin(), load.size, st.value.begin());
  st.size = static_cast<uint8_t>(load.size);
  st.fp_class = load.fp_class;
  st.ctx = ctx;
  st.ts = ts;
  return v;
}

FractionPair ObjectFraction(const RedundancyCounters& object,
                            const ProgramTotals& all_objects) {
  return {Ratio(object.redundant_bytes_precise, all_objects.total_nonfp_bytes),
          Ratio(object.redundant_bytes_approx, all_objects.total_fp_bytes)};
}

}  // namespace redload
