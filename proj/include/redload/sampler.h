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

#ifndef REDLOAD_SAMPLER_H_
#define REDLOAD_SAMPLER_H_

#include <cstdint>

namespace redload {

// Bursty sampling: monitor window_enable instructions, skip window_disable,
// repeat. The phase is anchored at ins_index 0 of each thread.
struct SamplingConfig {
  uint64_t window_enable = 1'000'000;
  uint64_t window_disable = 99'000'000;
  bool enabled = true;

  static SamplingConfig Disabled() { return {.enabled = false}; }
};

// Throws ConfigError when sampling is enabled with window_enable == 0.
void Validate(const SamplingConfig& config);

constexpr bool IsMonitored(uint64_t ins_index, const SamplingConfig& config) {
  if (!config.enabled) return true;
  return ins_index % (config.window_enable + config.window_disable) <
         config.window_enable;
}

}  // namespace redload

#endif  // REDLOAD_SAMPLER_H_
