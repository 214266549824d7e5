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

#ifndef REDLOAD_TRACE_H_
#define REDLOAD_TRACE_H_

// Event model and encodings for memory-access traces.
//
// Binary layout (all integers little-endian):
//
//   "LRT1" u16 version
//   u32 n_sites  { u32 id, str function, str file, u32 line }*
//   u32 n_loops  { u32 id, str file, u32 line, u32 parent_loop }*
//   record*      u8 kind, u32 thread_id, u64 ins_index, payload
//   trailer      u8 0xFF, u64 record_count
//
// str is u32 length followed by raw bytes. Payloads:
//
//   Load        u64 addr, u8 size, u8 fp_class, u32 site, size value bytes
//   Call/Return u32 site
//   LoopHead    u32 loop, u32 site
//   Alloc       u64 base, u64 size
//   Free        u64 base
//   StaticImage u32 n { str name, u64 base, u64 size }*
//   ThreadStart (empty)

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace redload {

inline constexpr char kTraceMagic[4] = {'L', 'R', 'T', '1'};
inline constexpr uint16_t kTraceVersion = 1;
inline constexpr uint8_t kTrailerTag = 0xFF;
inline constexpr uint32_t kNoLoop = 0xFFFFFFFFu;
inline constexpr size_t kMaxLoadSize = 32;

enum class EventKind : uint8_t {
  kLoad = 1,
  kCall = 2,
  kReturn = 3,
  kLoopHead = 4,
  kAlloc = 5,
  kFree = 6,
  kStaticImage = 7,
  kThreadStart = 8,
};

enum class FpClass : uint8_t { kNonFp = 0, kF32 = 1, kF64 = 2 };

const char* ToString(EventKind kind);
const char* ToString(FpClass fp);

// Width of one FP element in bytes, 0 for kNonFp.
constexpr size_t FpWidth(FpClass fp) {
  return fp == FpClass::kF32 ? 4 : fp == FpClass::kF64 ? 8 : 0;
}

constexpr bool IsValidLoadSize(uint64_t size) {
  return size == 1 || size == 2 || size == 4 || size == 8 || size == 16 ||
         size == 32;
}

struct StaticObject {
  std::string name;
  uint64_t base = 0;
  uint64_t size = 0;

  bool operator==(const StaticObject&) const = default;
};

// One runtime occurrence. Fields not used by `kind` stay zero so that
// defaulted equality is structural.
struct TraceEvent {
  EventKind kind = EventKind::kThreadStart;
  uint32_t thread_id = 0;
  uint64_t ins_index = 0;

  uint64_t addr = 0;  // Load address, Alloc/Free base
  uint64_t size = 0;  // Load width, Alloc size
  FpClass fp_class = FpClass::kNonFp;
  uint32_t site_id = 0;
  uint32_t loop_id = 0;
  std::array<uint8_t, kMaxLoadSize> value{};
  std::vector<StaticObject> objects;

  std::span<const uint8_t> value_bytes() const {
    return {value.data(), std::min<size_t>(size, kMaxLoadSize)};
  }

  bool operator==(const TraceEvent&) const = default;

  static TraceEvent Load(uint32_t tid, uint64_t ins, uint64_t addr,
                         std::span<const uint8_t> bytes, FpClass fp,
                         uint32_t site);
  static TraceEvent Call(uint32_t tid, uint64_t ins, uint32_t site);
  static TraceEvent Return(uint32_t tid, uint64_t ins, uint32_t site);
  static TraceEvent LoopHead(uint32_t tid, uint64_t ins, uint32_t loop,
                             uint32_t site);
  static TraceEvent Alloc(uint32_t tid, uint64_t ins, uint64_t base,
                          uint64_t size);
  static TraceEvent Free(uint32_t tid, uint64_t ins, uint64_t base);
  static TraceEvent Image(uint32_t tid, uint64_t ins,
                          std::vector<StaticObject> objects);
  static TraceEvent ThreadStart(uint32_t tid, uint64_t ins);
};

struct SiteInfo {
  std::string function;
  std::string file;
  uint32_t line = 0;

  bool operator==(const SiteInfo&) const = default;
};

// parent is the statically enclosing loop within the same function, or
// kNoLoop for a loop at function top level.
struct LoopInfo {
  std::string file;
  uint32_t line = 0;
  uint32_t parent = kNoLoop;

  bool operator==(const LoopInfo&) const = default;
};

struct SourceMap {
  std::map<uint32_t, SiteInfo> sites;
  std::map<uint32_t, LoopInfo> loops;

  const SiteInfo& site(uint32_t id) const;
  const LoopInfo& loop(uint32_t id) const;

  bool operator==(const SourceMap&) const = default;
};

struct Trace {
  SourceMap source_map;
  std::vector<TraceEvent> events;
};

// Receiver of a trace: the source map first, then events in order.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void Begin(const SourceMap& source_map) = 0;
  virtual void Event(const TraceEvent& event) = 0;
  virtual void End() {}
};

class VectorSink : public TraceSink {
 public:
  void Begin(const SourceMap& source_map) override;
  void Event(const TraceEvent& event) override;

  Trace& trace() { return trace_; }
  Trace Take() { return std::move(trace_); }

 private:
  Trace trace_;
};

// Checks the event invariants incrementally: per-thread strictly increasing
// ins_index, load widths and FP alignment, balanced calls, resolvable ids.
class TraceValidator {
 public:
  explicit TraceValidator(const SourceMap& source_map)
      : source_map_(source_map) {}

  // Throws EncodeError naming `index`.
  void Check(const TraceEvent& event, uint64_t index);

 private:
  struct ThreadState {
    std::optional<uint64_t> last_ins;
    std::vector<uint32_t> open_calls;
  };
  const SourceMap& source_map_;
  std::map<uint32_t, ThreadState> threads_;
};

// Streaming binary writer. The sink interface lets generators write traces
// that never fit in memory.
class BinaryTraceWriter : public TraceSink {
 public:
  explicit BinaryTraceWriter(std::ostream& out);
  ~BinaryTraceWriter() override;

  void Begin(const SourceMap& source_map) override;
  void Event(const TraceEvent& event) override;
  void End() override;

  uint64_t bytes_written() const { return bytes_; }

 private:
  void Put(const void* data, size_t n);
  void PutU8(uint8_t v);
  void PutU16(uint16_t v);
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutStr(const std::string& s);

  std::ostream& out_;
  SourceMap source_map_;
  std::unique_ptr<TraceValidator> validator_;
  uint64_t bytes_ = 0;
  uint64_t count_ = 0;
  bool ended_ = false;
};

// Streaming binary reader: memory use is bounded by one record.
class BinaryTraceReader {
 public:
  // Reads the header and source map; throws DecodeError.
  explicit BinaryTraceReader(std::istream& in);

  const SourceMap& source_map() const { return source_map_; }

  // Next event, or nullopt after a valid trailer.
  std::optional<TraceEvent> Next();

  uint64_t offset() const { return offset_; }

 private:
  void Get(void* data, size_t n, uint64_t record_start);
  uint8_t GetU8(uint64_t record_start);
  uint16_t GetU16(uint64_t record_start);
  uint32_t GetU32(uint64_t record_start);
  uint64_t GetU64(uint64_t record_start);
  std::string GetStr(uint64_t record_start);

  std::istream& in_;
  SourceMap source_map_;
  uint64_t offset_ = 0;
  uint64_t count_ = 0;
  bool done_ = false;
};

uint64_t WriteTrace(std::span<const TraceEvent> events,
                    const SourceMap& source_map, std::ostream& out);
Trace ReadTrace(std::istream& in);

// Line-oriented debugging format. One record per line:
//
//   LRT1 text 1
//   site <id> <function> <file> <line>
//   loop <id> <file> <line> <parent|->
//   L <tid> <ins> <addr> <size> <hexbytes> <nonfp|f32|f64> <site>
//   C|R <tid> <ins> <site>
//   H <tid> <ins> <loop> <site>
//   A <tid> <ins> <base> <size>
//   F <tid> <ins> <base>
//   S <tid> <ins> <n> (<name> <base> <size>)*
//   T <tid> <ins>
//
// Addresses are hex with 0x prefix. Names must not contain whitespace.
void WriteTextTrace(std::span<const TraceEvent> events,
                    const SourceMap& source_map, std::ostream& out);
Trace ReadTextTrace(std::istream& in);

// Reads either encoding, chosen by the leading bytes.
Trace ReadAnyTrace(std::istream& in);

}  // namespace redload

#endif  // REDLOAD_TRACE_H_
