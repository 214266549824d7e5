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

#ifndef REDLOAD_SHADOW_MEMORY_H_
#define REDLOAD_SHADOW_MEMORY_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "redload/context_tree.h"

namespace redload {

struct ShadowCell {
  uint8_t value = 0;
  ContextHandle ctx;
  uint64_t ts = 0;
  bool present = false;

  bool operator==(const ShadowCell&) const = default;
};

// Byte-granular shadow of the last monitored load: a directory keyed by the
// high address bits pointing at 64Ki-cell pages allocated on first touch.
class ShadowTable {
 public:
  static constexpr unsigned kPageBits = 16;
  static constexpr uint64_t kPageCells = uint64_t{1} << kPageBits;

  ShadowTable() = default;
  ShadowTable(const ShadowTable&) = delete;
  ShadowTable& operator=(const ShadowTable&) = delete;
  ShadowTable(ShadowTable&&) = default;
  ShadowTable& operator=(ShadowTable&&) = default;

  // Reads never allocate pages.
  void ReadSpan(uint64_t addr, std::span<ShadowCell> out) const;
  std::vector<ShadowCell> ReadSpan(uint64_t addr, size_t size) const;
  ShadowCell ReadCell(uint64_t addr) const;

  void WriteSpan(uint64_t addr, std::span<const uint8_t> value,
                 ContextHandle ctx, uint64_t ts);

  size_t page_count() const { return pages_.size(); }

 private:
  struct Page {
    std::array<uint8_t, kPageCells> value{};
    std::array<ContextHandle, kPageCells> ctx{};
    std::array<uint64_t, kPageCells> ts{};
    std::array<uint64_t, kPageCells / 64> present{};
  };

  const Page* FindPage(uint64_t page_index) const;
  Page& TouchPage(uint64_t page_index);

  std::unordered_map<uint64_t, std::unique_ptr<Page>> pages_;
  mutable uint64_t cached_index_ = ~uint64_t{0};
  mutable Page* cached_page_ = nullptr;
};

}  // namespace redload

#endif  // REDLOAD_SHADOW_MEMORY_H_
