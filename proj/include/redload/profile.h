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

#ifndef REDLOAD_PROFILE_H_
#define REDLOAD_PROFILE_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "redload/canonical_context.h"
#include "redload/redundancy.h"
#include "redload/spatial_detector.h"
#include "redload/temporal_detector.h"

namespace redload {

inline constexpr const char* kProfileFormat = "redload-profile";
inline constexpr int kProfileVersion = 1;

struct CanonicalPairKey {
  std::optional<CanonicalContext> old_ctx;  // none: first monitored load
  CanonicalContext new_ctx;
  std::optional<CanonicalContext> scope;

  auto operator<=>(const CanonicalPairKey&) const = default;
};

using CanonicalPairTable = std::map<CanonicalPairKey, RedundancyCounters>;

// Report identity of a data object: the symbol name of a static object, or
// the allocation context of a dynamic one.
struct ObjectKey {
  ObjectKind kind = ObjectKind::kStatic;
  std::string name;
  CanonicalContext alloc_context;

  auto operator<=>(const ObjectKey&) const = default;
};

std::string Describe(const ObjectKey& key);

struct ObjectRecord {
  RedundancyCounters counters;
  CanonicalPairTable pairs;

  bool operator==(const ObjectRecord&) const = default;
};

struct Profile {
  uint32_t threads = 0;
  CanonicalPairTable temporal;
  ProgramTotals temporal_totals;
  std::map<ObjectKey, ObjectRecord> objects;
  ProgramTotals spatial_totals;

  bool operator==(const Profile&) const = default;
};

// Replaces one thread's handles with source-level contexts. Rows whose
// handles canonicalize to the same key are summed.
Profile CanonicalizeThread(const TemporalDetector& temporal,
                           const SpatialDetector& spatial,
                           const ContextTree& tree,
                           const ObjectRegistry& registry,
                           const SourceMap& source_map);

// Sums rows with equal keys; distinct keys are kept side by side.
Profile Merge(const Profile& a, const Profile& b);
void MergeInto(Profile& into, const Profile& from);

// Pairwise reduction tree over `profiles`; empty input gives an empty
// profile.
Profile MergeAll(std::span<const Profile> profiles);

nlohmann::json ToJson(const CanonicalContext& ctx);
CanonicalContext ContextFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const RedundancyCounters& c);
nlohmann::json ToJson(const ProgramTotals& t);
nlohmann::json ToJson(const Fraction& f);
nlohmann::json ToJson(const FractionPair& f);

nlohmann::json ToJson(const Profile& profile);
// Throws Error on a malformed or foreign document.
Profile ProfileFromJson(const nlohmann::json& j);

void SaveProfile(const Profile& profile, const std::string& path);
Profile LoadProfile(const std::string& path);

}  // namespace redload

#endif  // REDLOAD_PROFILE_H_
