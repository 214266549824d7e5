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

#include "redload/temporal_detector.h"

#include <array>

namespace redload {

LoadVerdict TemporalDetector::ProcessLoad(const TraceEvent& load,
                                          ShadowTable& shadow,
                                          ContextHandle ctx, uint64_t ts,
                                          ScopeResolver& scopes) {
  const size_t size = load.size;
  std::array<ShadowCell, kMaxLoadSize> cells;
  shadow.ReadSpan(load.addr, std::span(cells.data(), size));

  LoadVerdict v;
  v.cls = ClassOf(load.fp_class);
  v.has_prior = cells[0].present;
  bool complete = true;
  std::array<uint8_t, kMaxLoadSize> old_value{};
  for (size_t i = 0; i < size; ++i) {
    complete = complete && cells[i].present;
    old_value[i] = cells[i].value;
  }
  if (complete) {
    ValueMatch m = CompareValues(std::span(old_value.data(), size),
                                 load.value_bytes(), load.fp_class, epsilon_);
    v.redundant = m.equal;
    v.fp_exact = m.bit_exact && load.fp_class != FpClass::kNonFp;
  }

  PairKey key{kNoContext, ctx, kNoContext};
  if (v.has_prior) {
    v.prior_ctx = cells[0].ctx;
    v.prior_ts = cells[0].ts;
    v.scope = scopes.Resolve({v.prior_ctx, v.prior_ts, ctx, ts});
    key.old_ctx = v.prior_ctx;
    key.scope = v.scope;
  }

  pairs_[key].Record(size, v.cls, v.redundant, v.fp_exact);
  totals_.Record(size, v.cls, v.redundant);
  shadow.WriteSpan(load.addr, load.value_bytes(), ctx, ts);
  return v;
}

}  // namespace redload
