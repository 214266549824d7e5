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

#include "redload/redundancy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace redload {

const char* ToString(RedundancyClass cls) {
  return cls == RedundancyClass::kPrecise ? "precise" : "approx";
}

namespace {

template <typename Float>
bool ApproxEqualImpl(Float a, Float b, double epsilon) {
  using Bits = std::conditional_t<sizeof(Float) == 4, uint32_t, uint64_t>;
  if (std::bit_cast<Bits>(a) == std::bit_cast<Bits>(b)) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double da = a;
  const double db = b;
  return std::fabs(da - db) <= epsilon * std::max(std::fabs(da), std::fabs(db));
}

template <typename Float>
Float ElementAt(std::span<const uint8_t> bytes, size_t i) {
  Float f;
  std::memcpy(&f, bytes.data() + i * sizeof(Float), sizeof(Float));
  return f;
}

}  // namespace

bool ApproxEqual(double a, double b, double epsilon) {
  return ApproxEqualImpl(a, b, epsilon);
}

bool ApproxEqual(float a, float b, double epsilon) {
  return ApproxEqualImpl(a, b, epsilon);
}

ValueMatch CompareValues(std::span<const uint8_t> old_value,
                         std::span<const uint8_t> new_value, FpClass fp,
                         double epsilon) {
  ValueMatch m;
  if (old_value.size() != new_value.size()) return m;
  m.bit_exact = std::equal(old_value.begin(), old_value.end(), new_value.begin());
  if (m.bit_exact || fp == FpClass::kNonFp) {
    m.equal = m.bit_exact;
    return m;
  }
  const size_t width = FpWidth(fp);
  const size_t n = new_value.size() / width;
  m.equal = true;
  for (size_t i = 0; i < n && m.equal; ++i) {
    m.equal = fp == FpClass::kF32
                  ? ApproxEqual(ElementAt<float>(old_value, i),
                                ElementAt<float>(new_value, i), epsilon)
                  : ApproxEqual(ElementAt<double>(old_value, i),
                                ElementAt<double>(new_value, i), epsilon);
  }
  return m;
}

void RedundancyCounters::Record(uint64_t bytes, RedundancyClass cls,
                                bool redundant, bool fp_exact) {
  ++total_instances;
  if (cls == RedundancyClass::kPrecise) {
    total_bytes_precise += bytes;
    if (redundant) redundant_bytes_precise += bytes;
  } else {
    total_bytes_approx += bytes;
    if (redundant) redundant_bytes_approx += bytes;
    if (redundant && fp_exact) ++fp_exact_instances;
  }
  if (redundant) ++redundant_instances;
}

RedundancyCounters& RedundancyCounters::operator+=(
    const RedundancyCounters& o) {
  redundant_bytes_precise += o.redundant_bytes_precise;
  redundant_bytes_approx += o.redundant_bytes_approx;
  total_bytes_precise += o.total_bytes_precise;
  total_bytes_approx += o.total_bytes_approx;
  redundant_instances += o.redundant_instances;
  total_instances += o.total_instances;
  fp_exact_instances += o.fp_exact_instances;
  return *this;
}

void ProgramTotals::Record(uint64_t bytes, RedundancyClass cls,
                           bool redundant) {
  if (cls == RedundancyClass::kPrecise) {
    total_nonfp_bytes += bytes;
    if (redundant) redundant_nonfp_bytes += bytes;
  } else {
    total_fp_bytes += bytes;
    if (redundant) redundant_fp_bytes += bytes;
  }
}

ProgramTotals& ProgramTotals::operator+=(const ProgramTotals& o) {
  total_nonfp_bytes += o.total_nonfp_bytes;
  total_fp_bytes += o.total_fp_bytes;
  redundant_nonfp_bytes += o.redundant_nonfp_bytes;
  redundant_fp_bytes += o.redundant_fp_bytes;
  return *this;
}

Fraction Ratio(uint64_t numerator, uint64_t denominator) {
  if (denominator == 0) return {};
  return {static_cast<double>(numerator) / static_cast<double>(denominator),
          true};
}

FractionPair ProgramFraction(const ProgramTotals& t) {
  return {Ratio(t.redundant_nonfp_bytes, t.total_nonfp_bytes),
          Ratio(t.redundant_fp_bytes, t.total_fp_bytes)};
}

FractionPair PairFraction(const RedundancyCounters& r, const ProgramTotals& t) {
  return {Ratio(r.redundant_bytes_precise, t.total_nonfp_bytes),
          Ratio(r.redundant_bytes_approx, t.total_fp_bytes)};
}

}  // namespace redload
