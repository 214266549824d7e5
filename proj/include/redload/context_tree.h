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

#ifndef REDLOAD_CONTEXT_TREE_H_
#define REDLOAD_CONTEXT_TREE_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace redload {

struct SourceMap;

// Dense per-thread identifier of a context tree node.
struct ContextHandle {
  uint32_t value = 0xFFFFFFFFu;

  constexpr bool valid() const { return value != 0xFFFFFFFFu; }
  auto operator<=>(const ContextHandle&) const = default;
};

inline constexpr ContextHandle kNoContext{};

enum class NodeKind : uint8_t { kRoot, kFunction, kLoop, kLoadSite };

const char* ToString(NodeKind kind);

struct ContextNode {
  NodeKind kind = NodeKind::kRoot;
  uint32_t id = 0;  // site id (Function, LoadSite) or loop id (Loop)
  ContextHandle parent;
  uint32_t depth = 0;
  uint64_t last_pass_timestamp = 0;  // Loop nodes only
};

// Loop-extended calling context tree of one thread, with its cursor and the
// thread's timestamp counter.
//
// Loops have no exit events. A LoopHead for a loop already on the current
// frame's path pops back to it and starts a new pass. Any other loop pops to
// its static parent (taken from the source map, when given) and descends.
// Return unwinds every loop opened inside the returning frame.
class ContextTree {
 public:
  explicit ContextTree(const SourceMap* source_map = nullptr);

  ContextHandle root() const { return ContextHandle{0}; }
  ContextHandle current() const { return path_.back(); }
  uint64_t timestamp() const { return counter_; }
  size_t size() const { return nodes_.size(); }
  size_t frame_depth() const { return frames_.size(); }

  ContextHandle OnCall(uint32_t site_id);
  // Throws StateError when no frame is open.
  ContextHandle OnReturn();
  ContextHandle OnLoopHead(uint32_t loop_id);

  struct LoadContext {
    ContextHandle handle;
    uint64_t timestamp = 0;
  };
  LoadContext CurrentLoadContext(uint32_t site_id);

  // Throws LookupError on an unknown handle.
  const ContextNode& node(ContextHandle handle) const;
  // Leaf first, Root last.
  std::vector<ContextNode> PathToRoot(ContextHandle handle) const;
  // Root first, `handle` last.
  std::vector<ContextHandle> HandlesFromRoot(ContextHandle handle) const;
  ContextHandle LowestCommonAncestor(ContextHandle a, ContextHandle b) const;

 private:
  struct ChildKey {
    uint32_t parent;
    uint32_t id;
    NodeKind kind;
    bool operator==(const ChildKey&) const = default;
  };
  struct ChildKeyHash {
    size_t operator()(const ChildKey& k) const {
      uint64_t h = (uint64_t{k.parent} << 32) ^ k.id;
      h ^= uint64_t{static_cast<uint8_t>(k.kind)} << 61;
      return std::hash<uint64_t>{}(h * 0x9E3779B97F4A7C15ull);
    }
  };

  ContextHandle Child(ContextHandle parent, NodeKind kind, uint32_t id);
  size_t FrameBase() const { return frames_.empty() ? 0 : frames_.back(); }

  const SourceMap* source_map_;
  std::vector<ContextNode> nodes_;
  std::unordered_map<ChildKey, ContextHandle, ChildKeyHash> children_;
  std::vector<ContextHandle> path_;  // root .. cursor
  std::vector<size_t> frames_;       // index in path_ of each open function
  uint64_t counter_ = 0;
};

}  // namespace redload

template <>
struct std::hash<redload::ContextHandle> {
  size_t operator()(redload::ContextHandle h) const noexcept {
    return std::hash<uint32_t>{}(h.value);
  }
};

#endif  // REDLOAD_CONTEXT_TREE_H_
