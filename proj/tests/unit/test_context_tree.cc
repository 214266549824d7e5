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

#include <random>

#include "doctest.h"
#include "redload/context_tree.h"
#include "redload/errors.h"
#include "redload/trace.h"

namespace redload {
namespace {

constexpr uint32_t kF = 10;
constexpr uint32_t kG = 11;
constexpr uint32_t kL = 1;
constexpr uint32_t kL1 = 1;
constexpr uint32_t kL2 = 2;

TEST_CASE("call from root descends to a function node") {
  ContextTree t;
  ContextHandle f = t.OnCall(kF);
  CHECK(f != t.root());
  CHECK(t.node(f).kind == NodeKind::kFunction);
  CHECK(t.node(f).id == kF);
  CHECK(t.node(f).parent == t.root());
  CHECK(t.OnReturn() == t.root());
}

TEST_CASE("repeated loop head stays on the node and takes the newer count") {
  ContextTree t;
  t.OnCall(kF);
  ContextHandle a = t.OnLoopHead(kL);
  CHECK(t.node(a).last_pass_timestamp == 1);
  t.CurrentLoadContext(5);
  ContextHandle b = t.OnLoopHead(kL);
  CHECK(a == b);
  CHECK(t.node(b).last_pass_timestamp == 3);
}

TEST_CASE("loop, call, loop builds the expected path") {
  ContextTree t;
  ContextHandle f = t.OnCall(kF);
  ContextHandle l1 = t.OnLoopHead(kL1);
  ContextHandle g = t.OnCall(kG);
  ContextHandle l2 = t.OnLoopHead(kL2);
  CHECK(t.node(l1).last_pass_timestamp < t.node(l2).last_pass_timestamp);

  std::vector<ContextNode> path = t.PathToRoot(l2);
  REQUIRE(path.size() == 5);
  CHECK(path[0].kind == NodeKind::kLoop);
  CHECK(path[0].id == kL2);
  CHECK(path[1].id == kG);
  CHECK(path[2].id == kL1);
  CHECK(path[3].id == kF);
  CHECK(path[4].kind == NodeKind::kRoot);
  CHECK(t.HandlesFromRoot(l2) ==
        std::vector<ContextHandle>{t.root(), f, l1, g, l2});
}

TEST_CASE("root path and load-site leaves") {
  ContextTree t;
  std::vector<ContextNode> root = t.PathToRoot(t.root());
  REQUIRE(root.size() == 1);
  CHECK(root[0].kind == NodeKind::kRoot);

  t.OnCall(kF);
  auto [site, ts] = t.CurrentLoadContext(7);
  CHECK(ts == 1);
  CHECK(t.PathToRoot(site).front().kind == NodeKind::kLoadSite);
  CHECK(t.PathToRoot(site).size() == 3);
  CHECK_THROWS_AS(t.node(ContextHandle{999}), LookupError);
  CHECK_THROWS_AS(t.PathToRoot(kNoContext), LookupError);
}

TEST_CASE("inner and outer loop walkthrough timestamps") {
  ContextTree t;
  t.OnCall(kF);
  t.OnLoopHead(kL1);                                     // 1
  t.OnLoopHead(kL2);                                     // 2
  CHECK(t.CurrentLoadContext(5).timestamp == 3);
  t.OnLoopHead(kL2);                                     // 4
  CHECK(t.CurrentLoadContext(5).timestamp == 5);
  t.OnLoopHead(kL2);                                     // 6
  CHECK(t.CurrentLoadContext(5).timestamp == 7);
  t.OnLoopHead(kL1);                                     // 8
  t.OnLoopHead(kL2);                                     // 9
  CHECK(t.CurrentLoadContext(5).timestamp == 10);
}

TEST_CASE("return unwinds loops opened inside the frame") {
  ContextTree t;
  ContextHandle f = t.OnCall(kF);
  t.OnLoopHead(kL1);
  t.OnCall(kG);
  t.OnLoopHead(kL2);
  ContextHandle back = t.OnReturn();
  CHECK(back == t.current());
  CHECK(t.node(back).kind == NodeKind::kLoop);
  CHECK(t.node(t.current()).id == kL1);
  CHECK(t.OnReturn() == t.root());
  CHECK(t.frame_depth() == 0);
  CHECK_THROWS_AS(t.OnReturn(), StateError);
  CHECK(t.node(f).depth == 1);
}

TEST_CASE("sibling loop replaces the finished one") {
  SourceMap m;
  m.loops[1] = {"a.c", 1, kNoLoop};
  m.loops[2] = {"a.c", 5, kNoLoop};
  m.loops[3] = {"a.c", 6, 2};
  ContextTree t(&m);
  ContextHandle f = t.OnCall(kF);
  ContextHandle a = t.OnLoopHead(1);
  CHECK(t.node(a).parent == f);
  ContextHandle b = t.OnLoopHead(2);
  CHECK(t.node(b).parent == f);
  ContextHandle c = t.OnLoopHead(3);
  CHECK(t.node(c).parent == b);
  // A new pass of the outer loop pops the inner one.
  CHECK(t.OnLoopHead(2) == b);
  CHECK(t.OnLoopHead(3) == c);
}

TEST_CASE("identical paths intern to one handle") {
  ContextTree t;
  t.OnCall(kF);
  ContextHandle first = t.CurrentLoadContext(3).handle;
  t.OnReturn();
  t.OnCall(kF);
  CHECK(t.CurrentLoadContext(3).handle == first);
  CHECK(t.CurrentLoadContext(4).handle != first);
}

TEST_CASE("timestamps strictly increase and enclosing loops precede inner") {
  SourceMap m;
  for (uint32_t l = 1; l <= 6; ++l)
    m.loops[l] = {"r.c", l, l % 3 == 1 ? kNoLoop : l - 1};
  std::mt19937_64 rng(3);
  for (int seed = 0; seed < 20; ++seed) {
    ContextTree t(&m);
    uint64_t last = 0;
    for (int step = 0; step < 2000; ++step) {
      const uint64_t r = rng() % 10;
      if (r < 2) {
        t.OnCall(20 + static_cast<uint32_t>(rng() % 3));
      } else if (r < 4 && t.frame_depth() > 0) {
        t.OnReturn();
      } else if (r < 7) {
        ContextHandle h = t.OnLoopHead(1 + static_cast<uint32_t>(rng() % 6));
        CHECK(t.node(h).last_pass_timestamp > last);
        last = t.node(h).last_pass_timestamp;
      } else {
        auto lc = t.CurrentLoadContext(30);
        CHECK(lc.timestamp > last);
        last = lc.timestamp;
      }
      // Within the current frame, loops nearer the root were passed earlier.
      uint64_t outer = 0;
      for (ContextHandle h : t.HandlesFromRoot(t.current())) {
        const ContextNode& n = t.node(h);
        if (n.kind == NodeKind::kFunction) outer = 0;
        if (n.kind != NodeKind::kLoop) continue;
        CHECK(n.last_pass_timestamp > outer);
        outer = n.last_pass_timestamp;
      }
    }
  }
}

TEST_CASE("lowest common ancestor") {
  ContextTree t;
  ContextHandle f = t.OnCall(kF);
  ContextHandle l = t.OnLoopHead(kL1);
  ContextHandle a = t.CurrentLoadContext(1).handle;
  ContextHandle b = t.CurrentLoadContext(2).handle;
  CHECK(t.LowestCommonAncestor(a, b) == l);
  CHECK(t.LowestCommonAncestor(a, a) == a);
  CHECK(t.LowestCommonAncestor(a, f) == f);
  CHECK(t.LowestCommonAncestor(t.root(), b) == t.root());
}

}  // namespace
}  // namespace redload
