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
#include "redload/scope_resolver.h"
#include "redload/workload.h"

namespace redload {
namespace {

constexpr uint32_t kMain = 1;
constexpr uint32_t kLoop1 = 1;
constexpr uint32_t kLoop2 = 2;
constexpr uint32_t kSite = 9;

// main -> loop1 -> loop2 -> load, replayed up to the given number of
// inner trips before the outer loop's second pass.
struct Walkthrough {
  ContextTree tree;
  ContextHandle main_fn, loop1, loop2, site;

  Walkthrough() {
    main_fn = tree.OnCall(kMain);
    loop1 = tree.OnLoopHead(kLoop1);
    loop2 = tree.OnLoopHead(kLoop2);
    site = tree.CurrentLoadContext(kSite).handle;
  }
};

TEST_CASE("inner-loop walkthrough resolves to the inner loop") {
  Walkthrough w;
  // T: loop1=1, loop2=2, load=3
  CHECK(w.tree.timestamp() == 3);
  w.tree.OnLoopHead(kLoop2);  // 4
  auto now = w.tree.CurrentLoadContext(kSite);
  CHECK(now.timestamp == 5);
  CHECK(w.tree.node(w.loop1).last_pass_timestamp == 1);
  CHECK(w.tree.node(w.loop2).last_pass_timestamp == 4);
  CHECK(ResolveScope({w.site, 3, now.handle, 5}, w.tree) == w.loop2);
}

TEST_CASE("outer-loop walkthrough resolves to the outermost loop") {
  Walkthrough w;
  w.tree.OnLoopHead(kLoop2);            // 4
  w.tree.CurrentLoadContext(kSite);     // 5
  w.tree.OnLoopHead(kLoop2);            // 6
  w.tree.CurrentLoadContext(kSite);     // 7
  w.tree.OnLoopHead(kLoop1);            // 8
  w.tree.OnLoopHead(kLoop2);            // 9
  auto now = w.tree.CurrentLoadContext(kSite);
  CHECK(now.timestamp == 10);
  CHECK(w.tree.node(w.loop1).last_pass_timestamp == 8);
  CHECK(w.tree.node(w.loop2).last_pass_timestamp == 9);
  CHECK(ResolveScope({w.site, 3, now.handle, 10}, w.tree) == w.loop1);
}

TEST_CASE("no loop passed between the loads gives no scope") {
  ContextTree t;
  t.OnCall(kMain);
  t.OnCall(2);
  auto a = t.CurrentLoadContext(kSite);
  t.OnReturn();
  t.OnCall(2);
  auto b = t.CurrentLoadContext(kSite);
  CHECK(a.handle == b.handle);
  CHECK_FALSE(ResolveScope({a.handle, a.timestamp, b.handle, b.timestamp}, t).valid());
  // Reversed or equal timestamps never qualify.
  CHECK_FALSE(ResolveScope({a.handle, 5, b.handle, 5}, t).valid());
}

TEST_CASE("differing contexts only search the common prefix") {
  ContextTree t;
  t.OnCall(kMain);
  ContextHandle outer = t.OnLoopHead(kLoop1);
  t.OnCall(3);
  t.OnLoopHead(kLoop2);
  auto a = t.CurrentLoadContext(kSite);
  t.OnReturn();
  t.OnLoopHead(kLoop1);
  t.OnCall(4);
  ContextHandle other = t.OnLoopHead(kLoop2);
  auto b = t.CurrentLoadContext(kSite);
  CHECK(t.LowestCommonAncestor(a.handle, b.handle) == outer);
  CHECK(t.node(other).last_pass_timestamp > a.timestamp);
  CHECK(ResolveScope({a.handle, a.timestamp, b.handle, b.timestamp}, t) == outer);
}

TEST_CASE("budget caps traversals per pair") {
  Walkthrough w;
  w.tree.OnLoopHead(kLoop2);
  auto b = w.tree.CurrentLoadContext(kSite);

  ScopeResolver one(w.tree, 1);
  ContextHandle first = one.Resolve({w.site, 3, b.handle, b.timestamp});
  CHECK(first == w.loop2);
  // A later instance where the outer loop would qualify reuses the cached
  // scope.
  CHECK(one.Resolve({w.site, 0, b.handle, b.timestamp}) == first);
  CHECK(one.traversals() == 1);

  ScopeResolver two(w.tree, 2);
  for (int i = 0; i < 5; ++i) two.Resolve({w.site, 3, b.handle, b.timestamp});
  CHECK(two.traversals() == 2);

  ScopeResolver per_pair(w.tree, 1);
  per_pair.Resolve({w.site, 3, b.handle, b.timestamp});
  per_pair.Resolve({w.loop1, 0, b.handle, b.timestamp});
  CHECK(per_pair.traversals() == 2);

  CHECK_THROWS_AS(ScopeResolver(w.tree, 0), ConfigError);
}

TEST_CASE("randomized nested loops match the brute-force scope search") {
  for (int seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    Scenario s{ScenarioName::kRandomMixed,
               {{"seed", std::to_string(seed)},
                {"loads", "2000"},
                {"functions", "5"},
                {"addresses", "16"}}};
    Trace trace = Generate(s);
    auto engine = testing::EngineVerdicts(trace, testing::FullMonitoring(~0u));
    auto oracle = ComputeOracle(trace).loads;
    CHECK(testing::DiffVerdicts(engine, oracle, testing::VerdictPart::kScope) == "");
  }
}

}  // namespace
}  // namespace redload
