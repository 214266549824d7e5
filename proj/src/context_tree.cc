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

#include "redload/context_tree.h"

#include <algorithm>

#include "redload/errors.h"
#include "redload/trace.h"

namespace redload {

const char* ToString(NodeKind kind) {
  switch (kind) {
    case NodeKind::kRoot: return "root";
    case NodeKind::kFunction: return "function";
    case NodeKind::kLoop: return "loop";
    case NodeKind::kLoadSite: return "load";
  }
  return "?";
}

ContextTree::ContextTree(const SourceMap* source_map)
    : source_map_(source_map) {
  nodes_.push_back(ContextNode{});
  path_.push_back(root());
}

ContextHandle ContextTree::Child(ContextHandle parent, NodeKind kind,
                                 uint32_t id) {
  ChildKey key{parent.value, id, kind};
  auto [it, inserted] = children_.try_emplace(key);
  if (inserted) {
    ContextNode n;
    n.kind = kind;
    n.id = id;
    n.parent = parent;
    n.depth = nodes_[parent.value].depth + 1;
    it->second = ContextHandle{static_cast<uint32_t>(nodes_.size())};
    nodes_.push_back(n);
  }
  return it->second;
}

ContextHandle ContextTree::OnCall(uint32_t site_id) {
  path_.push_back(Child(current(), NodeKind::kFunction, site_id));
  frames_.push_back(path_.size() - 1);
  return current();
}

ContextHandle ContextTree::OnReturn() {
  if (frames_.empty()) throw StateError("return with no open frame");
  path_.resize(frames_.back());
  frames_.pop_back();
  return current();
}

ContextHandle ContextTree::OnLoopHead(uint32_t loop_id) {
  const size_t base = FrameBase();
  auto find_loop = [&](uint32_t id) -> size_t {
    for (size_t i = path_.size(); i-- > base + 1;) {
      const ContextNode& n = nodes_[path_[i].value];
      if (n.kind == NodeKind::kLoop && n.id == id) return i;
    }
    return 0;
  };

  if (size_t at = find_loop(loop_id)) {
    path_.resize(at + 1);
  } else {
    if (source_map_ != nullptr) {
      auto it = source_map_->loops.find(loop_id);
      if (it != source_map_->loops.end()) {
        uint32_t parent = it->second.parent;
        if (parent == kNoLoop) {
          path_.resize(base + 1);
        } else if (size_t p = find_loop(parent)) {
          path_.resize(p + 1);
        }
      }
    }
    path_.push_back(Child(current(), NodeKind::kLoop, loop_id));
  }
  nodes_[current().value].last_pass_timestamp = ++counter_;
  return current();
}

ContextTree::LoadContext ContextTree::CurrentLoadContext(uint32_t site_id) {
  return {Child(current(), NodeKind::kLoadSite, site_id), ++counter_};
}

const ContextNode& ContextTree::node(ContextHandle handle) const {
  if (!handle.valid() || handle.value >= nodes_.size())
    throw LookupError("unknown context handle " + std::to_string(handle.value));
  return nodes_[handle.value];
}

std::vector<ContextNode> ContextTree::PathToRoot(ContextHandle handle) const {
  std::vector<ContextNode> out;
  for (ContextHandle h = handle;;) {
    const ContextNode& n = node(h);
    out.push_back(n);
    if (n.kind == NodeKind::kRoot) break;
    h = n.parent;
  }
  return out;
}

std::vector<ContextHandle> ContextTree::HandlesFromRoot(
    ContextHandle handle) const {
  std::vector<ContextHandle> out(node(handle).depth + 1);
  ContextHandle h = handle;
  for (size_t i = out.size(); i-- > 0;) {
    out[i] = h;
    h = nodes_[h.value].parent;
  }
  return out;
}

ContextHandle ContextTree::LowestCommonAncestor(ContextHandle a,
                                                ContextHandle b) const {
  const ContextNode* na = &node(a);
  const ContextNode* nb = &node(b);
  while (na->depth > nb->depth) {
    a = na->parent;
    na = &nodes_[a.value];
  }
  while (nb->depth > na->depth) {
    b = nb->parent;
    nb = &nodes_[b.value];
  }
  while (a != b) {
    a = na->parent;
    b = nb->parent;
    na = &nodes_[a.value];
    nb = &nodes_[b.value];
  }
  return a;
}

}  // namespace redload
