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

#ifndef REDLOAD_WORKLOAD_H_
#define REDLOAD_WORKLOAD_H_

// Deterministic synthetic programs reproducing common redundant-load
// patterns, emitted directly as event streams.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "redload/trace.h"

namespace redload {

enum class ScenarioName {
  kAdjacentEqual,
  kLinearSearch,
  kHashCollision,
  kStencil,
  kForwardCopy,
  kCalleeSpill,
  kSparseZeros,
  kApproxDrift,
  kRandomMixed,
};

const char* ToString(ScenarioName name);
// Throws ConfigError on an unknown name.
ScenarioName ParseScenarioName(const std::string& name);
const std::vector<std::string>& ScenarioNames();

using ScenarioParams = std::map<std::string, std::string>;

struct Scenario {
  ScenarioName name = ScenarioName::kAdjacentEqual;
  ScenarioParams params;  // unset parameters take their defaults
};

// Parameters accepted by a scenario, with their defaults.
const ScenarioParams& DefaultParams(ScenarioName name);

// Throws ConfigError on unknown or unparsable parameters. Identical
// scenarios produce identical traces.
void Generate(const Scenario& scenario, TraceSink& sink);
Trace Generate(const Scenario& scenario);

}  // namespace redload

#endif  // REDLOAD_WORKLOAD_H_
