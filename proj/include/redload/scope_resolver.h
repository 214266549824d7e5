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

#ifndef REDLOAD_SCOPE_RESOLVER_H_
#define REDLOAD_SCOPE_RESOLVER_H_

#include <cstdint>
#include <unordered_map>

#include "redload/context_tree.h"

namespace redload {

struct ScopeQuery {
  ContextHandle old_ctx;
  uint64_t old_ts = 0;
  ContextHandle new_ctx;
  uint64_t new_ts = 0;
};

// Outermost loop on the common root path of both contexts whose last header
// pass lies strictly between the two load timestamps. Both contexts must be
// valid in `tree`. Returns kNoContext when no loop qualifies.
ContextHandle ResolveScope(const ScopeQuery& query, const ContextTree& tree);

// Caps scope traversals per <C_old, C_new> pair. The first `limit` instances
// of a pair are resolved; later instances reuse the first result.
class ScopeResolver {
 public:
  explicit ScopeResolver(const ContextTree& tree, uint32_t limit = 1);

  ContextHandle Resolve(const ScopeQuery& query);

  uint64_t traversals() const { return traversals_; }
  uint32_t limit() const { return limit_; }

 private:
  struct Entry {
    uint32_t resolved = 0;
    ContextHandle first;
  };

  const ContextTree& tree_;
  uint32_t limit_;
  uint64_t traversals_ = 0;
  std::unordered_map<uint64_t, Entry> cache_;
};

}  // namespace redload

#endif  // REDLOAD_SCOPE_RESOLVER_H_
