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

#include <cstring>

#include "compare.h"
#include "doctest.h"
#include "redload/temporal_detector.h"
#include "redload/workload.h"

namespace redload {
namespace {

struct Harness {
  ContextTree tree;
  ShadowTable shadow;
  ScopeResolver scopes{tree};
  TemporalDetector detector;

  LoadVerdict Load(uint64_t addr, std::span<const uint8_t> v, FpClass fp,
                   uint32_t site = 1) {
    auto [ctx, ts] = tree.CurrentLoadContext(site);
    return detector.ProcessLoad(TraceEvent::Load(0, 0, addr, v, fp, site),
                                shadow, ctx, ts, scopes);
  }
};

std::array<uint8_t, 8> F64(double d) {
  std::array<uint8_t, 8> b;
  std::memcpy(b.data(), &d, 8);
  return b;
}

TEST_CASE("first load is not redundant") {
  Harness h;
  const uint8_t v[4] = {1, 0, 0, 0};
  LoadVerdict r = h.Load(0x1000, v, FpClass::kNonFp);
  CHECK_FALSE(r.redundant);
  CHECK_FALSE(r.has_prior);
  CHECK(h.detector.totals().total_nonfp_bytes == 4);
  CHECK(h.detector.totals().redundant_nonfp_bytes == 0);
}

TEST_CASE("same value twice from one site is precise-redundant") {
  Harness h;
  h.tree.OnLoopHead(1);
  const uint8_t v[4] = {1, 0, 0, 0};
  h.Load(0x1000, v, FpClass::kNonFp);
  h.tree.OnLoopHead(1);
  LoadVerdict r = h.Load(0x1000, v, FpClass::kNonFp);
  CHECK(r.redundant);
  CHECK(r.cls == RedundancyClass::kPrecise);
  CHECK(r.prior_ctx == h.tree.CurrentLoadContext(1).handle);
  PairKey key{r.prior_ctx, r.prior_ctx, r.scope};
  REQUIRE(h.detector.pairs().contains(key));
  CHECK(h.detector.pairs().at(key).redundant_bytes_precise == 4);
  CHECK(r.scope.valid());
}

TEST_CASE("F64 within tolerance is approx-redundant and not exact") {
  Harness h;
  auto a = F64(100.0);
  auto b = F64(100.5);
  h.Load(0x2000, a, FpClass::kF64);
  LoadVerdict r = h.Load(0x2000, b, FpClass::kF64);
  CHECK(r.redundant);
  CHECK(r.cls == RedundancyClass::kApprox);
  CHECK_FALSE(r.fp_exact);
  CHECK(h.detector.totals().redundant_fp_bytes == 8);
  uint64_t exact = 0;
  for (const auto& [k, c] : h.detector.pairs()) exact += c.fp_exact_instances;
  CHECK(exact == 0);
  LoadVerdict same = h.Load(0x2000, b, FpClass::kF64);
  CHECK(same.fp_exact);
}

TEST_CASE("partially covered spans are not redundant") {
  Harness h;
  const uint8_t v[8] = {};
  h.Load(0x3000, std::span(v, 4), FpClass::kNonFp, 1);
  LoadVerdict r = h.Load(0x3000, std::span(v, 8), FpClass::kNonFp, 2);
  CHECK(r.has_prior);
  CHECK_FALSE(r.redundant);
  // Now every byte has been seen.
  CHECK(h.Load(0x3000, std::span(v, 8), FpClass::kNonFp, 2).redundant);
  // The prior context comes from the start byte.
  const uint8_t w[4] = {};
  h.Load(0x3004, w, FpClass::kNonFp, 3);
  LoadVerdict mixed = h.Load(0x3000, std::span(v, 8), FpClass::kNonFp, 4);
  CHECK(mixed.redundant);
  CHECK(mixed.prior_ctx == h.tree.CurrentLoadContext(2).handle);
}

TEST_CASE("forward copy reloads are temporally redundant") {
  Trace trace = Generate({ScenarioName::kForwardCopy, {{"len", "8"}, {"reps", "1"}}});
  auto verdicts = testing::EngineVerdicts(trace, testing::FullMonitoring());
  REQUIRE(verdicts.size() == 7);
  // Each iteration reads the element written by the previous one; the
  // trace carries loads only, so every address is loaded once.
  for (const auto& v : verdicts) CHECK_FALSE(v.temporal_redundant);
  for (size_t i = 1; i < verdicts.size(); ++i) CHECK(verdicts[i].spatial_redundant);

  Trace twice = Generate({ScenarioName::kForwardCopy, {{"len", "8"}, {"reps", "2"}}});
  auto again = testing::EngineVerdicts(twice, testing::FullMonitoring());
  REQUIRE(again.size() == 14);
  for (size_t i = 7; i < 14; ++i) CHECK(again[i].temporal_redundant);
}

TEST_CASE("linear search is almost entirely redundant") {
  Profile p = AnalyzeTrace(Generate({ScenarioName::kLinearSearch, {}}),
                           testing::FullMonitoring());
  CHECK(ProgramFraction(p.temporal_totals).precise.value >= 0.95);
}

TEST_CASE("engine matches the oracle on random traces") {
  for (int seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    Trace trace = Generate({ScenarioName::kRandomMixed,
                            {{"seed", std::to_string(seed)}, {"loads", "3000"}}});
    Profile p;
    auto engine = testing::EngineVerdicts(trace, testing::FullMonitoring(), &p);
    OracleResult o = ComputeOracle(trace);
    CHECK(testing::DiffVerdicts(engine, o.loads, testing::VerdictPart::kTemporal) == "");
    CHECK(testing::DiffProfiles(testing::WithoutScopes(p),
                                testing::WithoutScopes(o.profile)) == "");
  }
}

}  // namespace
}  // namespace redload
