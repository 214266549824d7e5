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

#include "redload/canonical_context.h"

#include "redload/errors.h"
#include "redload/trace.h"

namespace redload {

CanonicalContext Canonicalize(ContextHandle handle, const ContextTree& tree,
                              const SourceMap& source_map) {
  CanonicalContext out;
  try {
    for (ContextHandle h : tree.HandlesFromRoot(handle)) {
      const ContextNode& n = tree.node(h);
      Frame f;
      f.kind = n.kind;
      switch (n.kind) {
        case NodeKind::kRoot:
          continue;
        case NodeKind::kFunction:
        case NodeKind::kLoadSite: {
          const SiteInfo& s = source_map.site(n.id);
          f.name = s.function;
          f.file = s.file;
          f.line = s.line;
          break;
        }
        case NodeKind::kLoop: {
          const LoopInfo& l = source_map.loop(n.id);
          f.name = "loop";
          f.file = l.file;
          f.line = l.line;
          break;
        }
      }
      out.frames.push_back(std::move(f));
    }
  } catch (const LookupError& e) {
    throw LookupError("cannot canonicalize context handle " +
                      std::to_string(handle.value) + ": " + e.what());
  }
  return out;
}

std::string Serialize(const CanonicalContext& ctx) {
  std::string s;
  for (const Frame& f : ctx.frames) {
    if (!s.empty()) s += '/';
    switch (f.kind) {
      case NodeKind::kRoot: s += "R:"; break;
      case NodeKind::kFunction: s += "F:"; break;
      case NodeKind::kLoop: s += "L:"; break;
      case NodeKind::kLoadSite: s += "S:"; break;
    }
    s += f.name + '@' + f.file + ':' + std::to_string(f.line);
  }
  return s;
}

}  // namespace redload
