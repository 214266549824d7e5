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

#include "redload/shadow_memory.h"

namespace redload {

const ShadowTable::Page* ShadowTable::FindPage(uint64_t page_index) const {
  if (page_index == cached_index_) return cached_page_;
  auto it = pages_.find(page_index);
  if (it == pages_.end()) return nullptr;
  cached_index_ = page_index;
  cached_page_ = it->second.get();
  return cached_page_;
}

ShadowTable::Page& ShadowTable::TouchPage(uint64_t page_index) {
  if (page_index == cached_index_) return *cached_page_;
  auto& slot = pages_[page_index];
  if (!slot) slot = std::make_unique<Page>();
  cached_index_ = page_index;
  cached_page_ = slot.get();
  return *slot;
}

ShadowCell ShadowTable::ReadCell(uint64_t addr) const {
  const Page* page = FindPage(addr >> kPageBits);
  if (page == nullptr) return {};
  const size_t i = addr & (kPageCells - 1);
  if (!((page->present[i / 64] >> (i % 64)) & 1)) return {};
  return ShadowCell{page->value[i], page->ctx[i], page->ts[i], true};
}

void ShadowTable::ReadSpan(uint64_t addr, std::span<ShadowCell> out) const {
  for (size_t k = 0; k < out.size(); ++k) out[k] = ReadCell(addr + k);
}

std::vector<ShadowCell> ShadowTable::ReadSpan(uint64_t addr,
                                              size_t size) const {
  std::vector<ShadowCell> out(size);
  ReadSpan(addr, out);
  return out;
}

void ShadowTable::WriteSpan(uint64_t addr, std::span<const uint8_t> value,
                            ContextHandle ctx, uint64_t ts) {
  for (size_t k = 0; k < value.size(); ++k) {
    const uint64_t a = addr + k;
    Page& page = TouchPage(a >> kPageBits);
    const size_t i = a & (kPageCells - 1);
    page.value[i] = value[k];
    page.ctx[i] = ctx;
    page.ts[i] = ts;
    page.present[i / 64] |= uint64_t{1} << (i % 64);
  }
}

}  // namespace redload
