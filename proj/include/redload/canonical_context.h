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

#ifndef REDLOAD_CANONICAL_CONTEXT_H_
#define REDLOAD_CANONICAL_CONTEXT_H_

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "redload/context_tree.h"

namespace redload {

struct SourceMap;

// A context frame named by source location instead of a thread-local handle.
struct Frame {
  NodeKind kind = NodeKind::kFunction;
  std::string name;
  std::string file;
  uint32_t line = 0;

  auto operator<=>(const Frame&) const = default;
};

// Root-to-leaf frames, Root excluded. Equal across threads for the same
// source path.
struct CanonicalContext {
  std::vector<Frame> frames;

  bool empty() const { return frames.empty(); }
  auto operator<=>(const CanonicalContext&) const = default;
};

// Resolves `handle` through the tree and the source map. Function and load
// frames take the site's function/file/line; loop frames are named "loop".
// Throws LookupError naming the handle when a site or loop is unmapped.
CanonicalContext Canonicalize(ContextHandle handle, const ContextTree& tree,
                              const SourceMap& source_map);

// Stable one-line form, e.g. "F:main@a.c:3/L:loop@a.c:5/S:main@a.c:6".
std::string Serialize(const CanonicalContext& ctx);

}  // namespace redload

#endif  // REDLOAD_CANONICAL_CONTEXT_H_
