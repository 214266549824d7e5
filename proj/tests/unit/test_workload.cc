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
#include <set>

#include "compare.h"
#include "doctest.h"
#include "redload/errors.h"
#include "redload/oracle.h"
#include "redload/workload.h"

namespace redload {
namespace {

std::vector<TraceEvent> Loads(const Trace& t) {
  std::vector<TraceEvent> out;
  for (const auto& e : t.events)
    if (e.kind == EventKind::kLoad) out.push_back(e);
  return out;
}

int32_t I32(const TraceEvent& e) {
  int32_t v;
  std::memcpy(&v, e.value.data(), 4);
  return v;
}

TEST_CASE("adjacent_equal emits four 4-byte loads on one object") {
  Trace t = Generate({ScenarioName::kAdjacentEqual, {}});
  auto loads = Loads(t);
  REQUIRE(loads.size() == 4);
  const int32_t expected[] = {1, 1, 1, 15};
  for (size_t i = 0; i < 4; ++i) {
    CHECK(loads[i].size == 4);
    CHECK(I32(loads[i]) == expected[i]);
  }
  size_t images = 0;
  for (const auto& e : t.events) images += e.kind == EventKind::kStaticImage;
  CHECK(images == 1);
}

TEST_CASE("forward_copy loads all return 1") {
  auto loads = Loads(Generate({ScenarioName::kForwardCopy, {{"len", "8"}, {"reps", "1"}}}));
  REQUIRE(loads.size() == 7);
  for (const auto& e : loads) CHECK(I32(e) == 1);
}

TEST_CASE("linear_search with probe 99 scans the whole key array") {
  auto loads = Loads(Generate({ScenarioName::kLinearSearch,
                               {{"n", "100"}, {"queries", "1"}, {"probe", "99"}}}));
  REQUIRE(loads.size() == 101);  // u[0] then CDF[0..99]
  std::set<int32_t> keys;
  for (size_t i = 1; i < loads.size(); ++i) keys.insert(I32(loads[i]));
  CHECK(keys.size() == 100);
}

TEST_CASE("generation is deterministic") {
  for (const std::string& name : ScenarioNames()) {
    CAPTURE(name);
    Scenario s{ParseScenarioName(name), {}};
    if (s.name == ScenarioName::kLinearSearch) s.params = {{"n", "100"}, {"queries", "50"}};
    CHECK(Generate(s).events == Generate(s).events);
  }
}

TEST_CASE("every scenario yields a valid trace") {
  for (const std::string& name : ScenarioNames()) {
    CAPTURE(name);
    Scenario s{ParseScenarioName(name), {{"threads", "2"}, {"ins_stride", "3"}}};
    if (s.name == ScenarioName::kLinearSearch) s.params.merge(ScenarioParams{{"n", "100"}});
    Trace t = Generate(s);
    TraceValidator v(t.source_map);
    for (size_t i = 0; i < t.events.size(); ++i) CHECK_NOTHROW(v.Check(t.events[i], i));
  }
}

TEST_CASE("bad parameters are configuration errors") {
  CHECK_THROWS_AS(ParseScenarioName("nope"), ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kStencil, {{"nx", "x"}}}), ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kStencil, {{"nx", "0"}}}), ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kStencil, {{"bogus", "1"}}}), ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kAdjacentEqual, {{"values", "1,,2"}}}),
                  ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kSparseZeros, {{"zero_density", "2"}}}),
                  ConfigError);
  CHECK_THROWS_AS(Generate({ScenarioName::kLinearSearch, {{"probe", "5000"}}}),
                  ConfigError);
}

TEST_CASE("oracle hand-enumerated expectations") {
  Profile adj = ExpectedRedundancy({ScenarioName::kAdjacentEqual, {}});
  CHECK(adj.temporal_totals.redundant_nonfp_bytes == 0);
  REQUIRE(adj.objects.size() == 1);
  CHECK(adj.objects.begin()->second.counters.redundant_instances == 2);
  CHECK(adj.objects.begin()->second.counters.total_instances == 4);

  Profile one = ExpectedRedundancy(
      {ScenarioName::kAdjacentEqual, {{"values", "42"}}});
  CHECK(one.temporal_totals.redundant_nonfp_bytes == 0);
  CHECK(one.spatial_totals.redundant_nonfp_bytes == 0);
  CHECK(one.temporal_totals.total_nonfp_bytes == 4);

  Profile copy = ExpectedRedundancy(
      {ScenarioName::kForwardCopy, {{"len", "8"}, {"reps", "1"}}});
  CHECK(copy.temporal_totals.redundant_nonfp_bytes == 0);
  CHECK(copy.spatial_totals.redundant_nonfp_bytes == 6 * 4);
}

TEST_CASE("oracle refuses oversized scenarios") {
  CHECK_THROWS_AS(ExpectedRedundancy({ScenarioName::kForwardCopy,
                                      {{"len", "1001"}, {"reps", "1001"}}}),
                  SizeError);
}

TEST_CASE("engine equals the oracle on every scenario") {
  for (const std::string& name : ScenarioNames()) {
    CAPTURE(name);
    Scenario s{ParseScenarioName(name), {{"threads", "2"}}};
    if (s.name == ScenarioName::kLinearSearch) s.params.merge(ScenarioParams{{"n", "200"}, {"queries", "200"}});
    if (s.name == ScenarioName::kHashCollision) s.params.merge(ScenarioParams{{"items", "400"}, {"queries", "400"}});
    if (s.name == ScenarioName::kForwardCopy) s.params.merge(ScenarioParams{{"reps", "20"}});
    Profile engine = AnalyzeTrace(Generate(s), testing::FullMonitoring(~0u));
    CHECK(testing::DiffProfiles(engine, ExpectedRedundancy(s)) == "");
  }
}

}  // namespace
}  // namespace redload
