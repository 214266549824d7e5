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

#ifndef REDLOAD_ORACLE_H_
#define REDLOAD_ORACLE_H_

// Brute-force reference model of the whole analysis. Shares only data types
// with the engine: path bookkeeping, value comparison, object lookup and
// scope search are all reimplemented naively.

#include <cstdint>
#include <string>
#include <vector>

#include "redload/profile.h"
#include "redload/sampler.h"
#include "redload/trace.h"
#include "redload/workload.h"

namespace redload {

inline constexpr uint64_t kOracleMaxLoads = 1'000'000;

// Per-load ground truth. Contexts are serialized canonical paths; "" means
// none.
struct OracleVerdict {
  uint64_t event_index = 0;
  uint32_t thread_id = 0;
  std::string ctx;
  uint64_t ts = 0;
  bool monitored = false;

  bool temporal_redundant = false;
  bool temporal_has_prior = false;
  std::string temporal_prior;
  std::string temporal_scope;

  bool spatial_hit = false;
  std::string spatial_object;
  bool spatial_redundant = false;
  bool spatial_has_prior = false;
  std::string spatial_prior;
  std::string spatial_scope;
};

struct OracleResult {
  Profile profile;  // every scope computed exactly
  std::vector<OracleVerdict> loads;
};

OracleResult ComputeOracle(const Trace& trace,
                           double epsilon = kDefaultApproxEpsilon,
                           const SamplingConfig& sampling =
                               SamplingConfig::Disabled());

// Generates the scenario and runs the oracle over it with full monitoring.
// Throws SizeError when the scenario exceeds kOracleMaxLoads loads.
Profile ExpectedRedundancy(const Scenario& scenario,
                           double epsilon = kDefaultApproxEpsilon);

}  // namespace redload

#endif  // REDLOAD_ORACLE_H_
