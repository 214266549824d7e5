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

#ifndef REDLOAD_REDUNDANCY_H_
#define REDLOAD_REDUNDANCY_H_

// Value comparison and byte/instance accounting shared by the temporal and
// spatial detectors.

#include <cstdint>
#include <span>

#include "redload/trace.h"

namespace redload {

inline constexpr double kDefaultApproxEpsilon = 0.01;

// Precise redundancy is counted on non-FP loads, approximate on FP loads.
enum class RedundancyClass : uint8_t { kPrecise, kApprox };

constexpr RedundancyClass ClassOf(FpClass fp) {
  return fp == FpClass::kNonFp ? RedundancyClass::kPrecise
                               : RedundancyClass::kApprox;
}

const char* ToString(RedundancyClass cls);

// True iff bit-identical, or both finite and |a-b| <= epsilon*max(|a|,|b|).
bool ApproxEqual(double a, double b, double epsilon);
bool ApproxEqual(float a, float b, double epsilon);

struct ValueMatch {
  bool equal = false;      // redundant under the class rule
  bool bit_exact = false;  // all bytes identical
};

// Compares two loaded values of the same width and FP class. Non-FP values
// must match on every byte; FP values are split into elements of the FP width
// and every element pair must be approximately equal.
ValueMatch CompareValues(std::span<const uint8_t> old_value,
                         std::span<const uint8_t> new_value, FpClass fp,
                         double epsilon);

struct RedundancyCounters {
  uint64_t redundant_bytes_precise = 0;
  uint64_t redundant_bytes_approx = 0;
  uint64_t total_bytes_precise = 0;
  uint64_t total_bytes_approx = 0;
  uint64_t redundant_instances = 0;
  uint64_t total_instances = 0;
  uint64_t fp_exact_instances = 0;

  void Record(uint64_t bytes, RedundancyClass cls, bool redundant,
              bool fp_exact);
  uint64_t redundant_bytes() const {
    return redundant_bytes_precise + redundant_bytes_approx;
  }
  uint64_t total_bytes() const { return total_bytes_precise + total_bytes_approx; }

  RedundancyCounters& operator+=(const RedundancyCounters& other);
  bool operator==(const RedundancyCounters&) const = default;
};

struct ProgramTotals {
  uint64_t total_nonfp_bytes = 0;
  uint64_t total_fp_bytes = 0;
  uint64_t redundant_nonfp_bytes = 0;
  uint64_t redundant_fp_bytes = 0;

  void Record(uint64_t bytes, RedundancyClass cls, bool redundant);
  ProgramTotals& operator+=(const ProgramTotals& other);
  bool operator==(const ProgramTotals&) const = default;
};

// `defined` is false when the denominator class saw no loads; value is 0.
struct Fraction {
  double value = 0.0;
  bool defined = false;

  bool operator==(const Fraction&) const = default;
};

struct FractionPair {
  Fraction precise;
  Fraction approx;
};

Fraction Ratio(uint64_t numerator, uint64_t denominator);

// Whole-program redundancy fraction per class.
FractionPair ProgramFraction(const ProgramTotals& totals);

// One pair's redundant bytes over the program-wide loaded bytes of the class.
FractionPair PairFraction(const RedundancyCounters& record,
                          const ProgramTotals& totals);

}  // namespace redload

#endif  // REDLOAD_REDUNDANCY_H_
