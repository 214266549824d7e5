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
#include "doctest.h"
#include "redload/errors.h"
#include "redload/spatial_detector.h"
#include "redload/workload.h"

namespace redload {
namespace {

struct Harness {
  ContextTree tree;
  ObjectRegistry registry;
  ScopeResolver scopes{tree};
  SpatialDetector detector;

  SpatialVerdict Load(uint64_t addr, int32_t value, uint32_t site = 1) {
    uint8_t b[4];
    std::memcpy(b, &value, 4);
    return LoadBytes(addr, b, FpClass::kNonFp, site);
  }

  SpatialVerdict LoadBytes(uint64_t addr, std::span<const uint8_t> v, FpClass fp,
                           uint32_t site = 1) {
    auto [ctx, ts] = tree.CurrentLoadContext(site);
    return detector.ProcessLoad(TraceEvent::Load(0, 0, addr, v, fp, site),
                                registry, ctx, ts, scopes);
  }
};

TEST_CASE("registry lookup, free and static images") {
  ObjectRegistry r;
  r.OnAlloc(0x1000, 64, {});
  REQUIRE(r.Lookup(0x1020) != nullptr);
  CHECK(r.Lookup(0x1020)->base == 0x1000);
  CHECK(r.Lookup(0x1040) == nullptr);
  CHECK(r.Lookup(0x0fff) == nullptr);
  r.OnFree(0x1000);
  CHECK(r.Lookup(0x1020) == nullptr);
  r.OnStaticImage({{"A", 0x2000, 16}});
  REQUIRE(r.Lookup(0x2004) != nullptr);
  CHECK(r.Lookup(0x2004)->name == "A");
  CHECK(r.Lookup(0x2004)->kind == ObjectKind::kStatic);
  CHECK(r.live_count() == 1);
  CHECK(r.objects().size() == 2);
  CHECK_FALSE(r.object(0).live);
}

TEST_CASE("registry rejects overlaps and unmatched frees") {
  ObjectRegistry r;
  r.OnAlloc(0x1000, 64, {});
  CHECK_THROWS_AS(r.OnAlloc(0x1020, 8, {}), StateError);
  CHECK_THROWS_AS(r.OnAlloc(0x0ff8, 16, {}), StateError);
  CHECK_THROWS_AS(r.OnAlloc(0x3000, 0, {}), StateError);
  CHECK_THROWS_AS(r.OnFree(0x1008), StateError);
  CHECK_THROWS_AS(r.OnFree(0x5000), StateError);
  r.OnStaticImage({{"S", 0x8000, 8}});
  CHECK_THROWS_AS(r.OnFree(0x8000), StateError);
  CHECK_NOTHROW(r.OnAlloc(0x1040, 8, {}));
  r.OnFree(0x1000);
  CHECK_THROWS_AS(r.OnFree(0x1000), StateError);
  CHECK_NOTHROW(r.OnAlloc(0x1000, 64, {}));
}

TEST_CASE("adjacent equal elements") {
  Harness h;
  h.registry.OnStaticImage({{"A", 0x2000, 16}});
  const int32_t values[] = {1, 1, 1, 15};
  const bool expected[] = {false, true, true, false};
  for (int i = 0; i < 4; ++i) {
    h.tree.OnLoopHead(1);
    SpatialVerdict v = h.Load(0x2000 + 4 * i, values[i]);
    CHECK(v.hit);
    CHECK(v.redundant == expected[i]);
  }
  const ObjectLoadState& st = h.detector.objects().at(0);
  CHECK(st.counters.redundant_instances == 2);
  CHECK(st.counters.total_instances == 4);
  FractionPair f = ObjectFraction(st.counters, h.detector.totals());
  CHECK(f.precise.value == 0.5);
}

TEST_CASE("loads outside objects are ignored") {
  Harness h;
  h.registry.OnAlloc(0x1000, 8, {});
  SpatialVerdict v = h.Load(0x7ffd0000, 3);
  CHECK_FALSE(v.hit);
  CHECK(h.detector.totals().total_nonfp_bytes == 0);
  // Lookup is by start address only.
  const uint8_t b[8] = {};
  CHECK(h.LoadBytes(0x1004, b, FpClass::kNonFp).hit);
  CHECK_FALSE(h.LoadBytes(0x1008, b, FpClass::kNonFp).hit);
}

TEST_CASE("width or class mismatch is not redundant") {
  Harness h;
  h.registry.OnAlloc(0x1000, 64, {});
  const uint8_t zeros[8] = {};
  h.LoadBytes(0x1000, std::span(zeros, 4), FpClass::kNonFp);
  CHECK_FALSE(h.LoadBytes(0x1008, std::span(zeros, 8), FpClass::kNonFp).redundant);
  CHECK_FALSE(h.LoadBytes(0x1010, std::span(zeros, 8), FpClass::kF64).redundant);
  CHECK(h.LoadBytes(0x1018, std::span(zeros, 8), FpClass::kF64).redundant);
}

TEST_CASE("object fractions") {
  Harness h;
  h.registry.OnStaticImage({{"X", 0x100, 64}, {"Y", 0x200, 64}});
  for (int i = 0; i < 5; ++i) h.Load(0x100 + 4 * i, 7);
  for (int i = 0; i < 5; ++i) h.Load(0x200 + 4 * i, i);
  const ProgramTotals& all = h.detector.totals();
  const auto& x = h.detector.objects().at(0).counters;
  const auto& y = h.detector.objects().at(1).counters;
  CHECK(x.redundant_bytes() == 16);
  CHECK(ObjectFraction(x, all).precise.value == doctest::Approx(16.0 / 40.0));
  CHECK(ObjectFraction(y, all).precise.value == 0.0);
  CHECK_FALSE(ObjectFraction(y, all).approx.defined);
}

TEST_CASE("single object, all loads after the first redundant") {
  Harness h;
  h.registry.OnAlloc(0x4000, 400, {});
  for (int i = 0; i < 100; ++i) h.Load(0x4000 + 4 * i, 0);
  FractionPair f = ObjectFraction(h.detector.objects().at(0).counters,
                                  h.detector.totals());
  CHECK(f.precise.value == doctest::Approx(99.0 / 100.0));
}

TEST_CASE("sparse zeros matches the oracle count") {
  Trace trace = Generate({ScenarioName::kSparseZeros, {{"shuffle", "1"}}});
  Profile p = AnalyzeTrace(trace, testing::FullMonitoring());
  OracleResult o = ComputeOracle(trace);
  uint64_t engine = 0, oracle = 0, total = 0;
  for (const auto& [k, rec] : p.objects) {
    engine += rec.counters.redundant_instances;
    total += rec.counters.total_instances;
  }
  for (const auto& [k, rec] : o.profile.objects) oracle += rec.counters.redundant_instances;
  CHECK(engine == oracle);
  CHECK(static_cast<double>(engine) / static_cast<double>(total) >= 0.85);
}

TEST_CASE("engine matches the singleton oracle on random traces") {
  for (int seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    Trace trace = Generate({ScenarioName::kRandomMixed,
                            {{"seed", std::to_string(seed)},
                             {"loads", "3000"},
                             {"threads", "2"}}});
    auto engine = testing::EngineVerdicts(trace, testing::FullMonitoring());
    auto oracle = ComputeOracle(trace).loads;
    CHECK(testing::DiffVerdicts(engine, oracle, testing::VerdictPart::kSpatial) == "");
  }
}

}  // namespace
}  // namespace redload
