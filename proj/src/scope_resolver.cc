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

#include "redload/scope_resolver.h"

#include "redload/errors.h"

namespace redload {

ContextHandle ResolveScope(const ScopeQuery& q, const ContextTree& tree) {
  if (q.old_ts >= q.new_ts) return kNoContext;
  const ContextHandle bound = q.old_ctx == q.new_ctx
                                  ? q.new_ctx
                                  : tree.LowestCommonAncestor(q.old_ctx, q.new_ctx);
  for (ContextHandle h : tree.HandlesFromRoot(bound)) {
    const ContextNode& n = tree.node(h);
    if (n.kind == NodeKind::kLoop && q.old_ts < n.last_pass_timestamp &&
        n.last_pass_timestamp < q.new_ts)
      return h;
  }
  return kNoContext;
}

ScopeResolver::ScopeResolver(const ContextTree& tree, uint32_t limit)
    : tree_(tree), limit_(limit) {
  if (limit_ == 0) throw ConfigError("scope budget must be at least 1");
}

ContextHandle ScopeResolver::Resolve(const ScopeQuery& query) {
  const uint64_t key =
      (uint64_t{query.old_ctx.value} << 32) | query.new_ctx.value;
  Entry& e = cache_[key];
  if (e.resolved >= limit_) return e.first;
  ++traversals_;
  ContextHandle scope = ResolveScope(query, tree_);
  if (e.resolved++ == 0) e.first = scope;
  return scope;
}

}  // namespace redload
