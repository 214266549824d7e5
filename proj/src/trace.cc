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

#include "redload/trace.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "redload/errors.h"

namespace redload {

const char* ToString(EventKind kind) {
  switch (kind) {
    case EventKind::kLoad: return "Load";
    case EventKind::kCall: return "Call";
    case EventKind::kReturn: return "Return";
    case EventKind::kLoopHead: return "LoopHead";
    case EventKind::kAlloc: return "Alloc";
    case EventKind::kFree: return "Free";
    case EventKind::kStaticImage: return "StaticImage";
    case EventKind::kThreadStart: return "ThreadStart";
  }
  return "?";
}

const char* ToString(FpClass fp) {
  switch (fp) {
    case FpClass::kNonFp: return "nonfp";
    case FpClass::kF32: return "f32";
    case FpClass::kF64: return "f64";
  }
  return "?";
}

TraceEvent TraceEvent::Load(uint32_t tid, uint64_t ins, uint64_t addr,
                            std::span<const uint8_t> bytes, FpClass fp,
                            uint32_t site) {
  TraceEvent e;
  e.kind = EventKind::kLoad;
  e.thread_id = tid;
  e.ins_index = ins;
  e.addr = addr;
  e.size = std::min(bytes.size(), kMaxLoadSize);
  e.fp_class = fp;
  e.site_id = site;
  std::copy_n(bytes.begin(), e.size, e.value.begin());
  if (bytes.size() > kMaxLoadSize) e.size = bytes.size();  // rejected later
  return e;
}

TraceEvent TraceEvent::Call(uint32_t tid, uint64_t ins, uint32_t site) {
  TraceEvent e;
  e.kind = EventKind::kCall;
  e.thread_id = tid;
  e.ins_index = ins;
  e.site_id = site;
  return e;
}

TraceEvent TraceEvent::Return(uint32_t tid, uint64_t ins, uint32_t site) {
  TraceEvent e = Call(tid, ins, site);
  e.kind = EventKind::kReturn;
  return e;
}

TraceEvent TraceEvent::LoopHead(uint32_t tid, uint64_t ins, uint32_t loop,
                                uint32_t site) {
  TraceEvent e;
  e.kind = EventKind::kLoopHead;
  e.thread_id = tid;
  e.ins_index = ins;
  e.loop_id = loop;
  e.site_id = site;
  return e;
}

TraceEvent TraceEvent::Alloc(uint32_t tid, uint64_t ins, uint64_t base,
                             uint64_t size) {
  TraceEvent e;
  e.kind = EventKind::kAlloc;
  e.thread_id = tid;
  e.ins_index = ins;
  e.addr = base;
  e.size = size;
  return e;
}

TraceEvent TraceEvent::Free(uint32_t tid, uint64_t ins, uint64_t base) {
  TraceEvent e;
  e.kind = EventKind::kFree;
  e.thread_id = tid;
  e.ins_index = ins;
  e.addr = base;
  return e;
}

TraceEvent TraceEvent::Image(uint32_t tid, uint64_t ins,
                             std::vector<StaticObject> objects) {
  TraceEvent e;
  e.kind = EventKind::kStaticImage;
  e.thread_id = tid;
  e.ins_index = ins;
  e.objects = std::move(objects);
  return e;
}

TraceEvent TraceEvent::ThreadStart(uint32_t tid, uint64_t ins) {
  TraceEvent e;
  e.kind = EventKind::kThreadStart;
  e.thread_id = tid;
  e.ins_index = ins;
  return e;
}

const SiteInfo& SourceMap::site(uint32_t id) const {
  auto it = sites.find(id);
  if (it == sites.end())
    throw LookupError("unknown site id " + std::to_string(id));
  return it->second;
}

const LoopInfo& SourceMap::loop(uint32_t id) const {
  auto it = loops.find(id);
  if (it == loops.end())
    throw LookupError("unknown loop id " + std::to_string(id));
  return it->second;
}

void VectorSink::Begin(const SourceMap& source_map) {
  trace_.source_map = source_map;
  trace_.events.clear();
}

void VectorSink::Event(const TraceEvent& event) {
  trace_.events.push_back(event);
}

void TraceValidator::Check(const TraceEvent& e, uint64_t index) {
  ThreadState& t = threads_[e.thread_id];
  if (t.last_ins && e.ins_index <= *t.last_ins)
    throw EncodeError("ins_index not strictly increasing for thread " +
                          std::to_string(e.thread_id),
                      index);
  t.last_ins = e.ins_index;

  auto need_site = [&](uint32_t site) {
    if (!source_map_.sites.contains(site))
      throw EncodeError("unresolved site id " + std::to_string(site), index);
  };

  switch (e.kind) {
    case EventKind::kLoad: {
      if (!IsValidLoadSize(e.size))
        throw EncodeError("invalid load size " + std::to_string(e.size), index);
      size_t width = FpWidth(e.fp_class);
      if (width != 0 && e.size % width != 0)
        throw EncodeError("load size not a multiple of its FP width", index);
      need_site(e.site_id);
      break;
    }
    case EventKind::kCall:
      need_site(e.site_id);
      t.open_calls.push_back(e.site_id);
      break;
    case EventKind::kReturn:
      if (t.open_calls.empty())
        throw EncodeError("return without an open call", index);
      if (t.open_calls.back() != e.site_id)
        throw EncodeError("return does not match the innermost call", index);
      t.open_calls.pop_back();
      break;
    case EventKind::kLoopHead:
      if (!source_map_.loops.contains(e.loop_id))
        throw EncodeError("unresolved loop id " + std::to_string(e.loop_id),
                          index);
      need_site(e.site_id);
      break;
    case EventKind::kStaticImage:
      for (const auto& obj : e.objects) {
        if (obj.name.empty() ||
            std::any_of(obj.name.begin(), obj.name.end(),
                        [](unsigned char c) { return std::isspace(c); }))
          throw EncodeError("static object name empty or has whitespace",
                            index);
      }
      break;
    case EventKind::kAlloc:
    case EventKind::kFree:
    case EventKind::kThreadStart:
      break;
    default:
      throw EncodeError("unknown event kind", index);
  }
}

// ---------------------------------------------------------------------------
// Binary writer

BinaryTraceWriter::BinaryTraceWriter(std::ostream& out) : out_(out) {}

BinaryTraceWriter::~BinaryTraceWriter() = default;

void BinaryTraceWriter::Put(const void* data, size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  bytes_ += n;
}

void BinaryTraceWriter::PutU8(uint8_t v) { Put(&v, 1); }

void BinaryTraceWriter::PutU16(uint16_t v) {
  uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
  Put(b, 2);
}

void BinaryTraceWriter::PutU32(uint32_t v) {
  uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
  Put(b, 4);
}

void BinaryTraceWriter::PutU64(uint64_t v) {
  uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
  Put(b, 8);
}

void BinaryTraceWriter::PutStr(const std::string& s) {
  PutU32(static_cast<uint32_t>(s.size()));
  Put(s.data(), s.size());
}

void BinaryTraceWriter::Begin(const SourceMap& source_map) {
  source_map_ = source_map;
  validator_ = std::make_unique<TraceValidator>(source_map_);
  Put(kTraceMagic, 4);
  PutU16(kTraceVersion);
  PutU32(static_cast<uint32_t>(source_map_.sites.size()));
  for (const auto& [id, site] : source_map_.sites) {
    PutU32(id);
    PutStr(site.function);
    PutStr(site.file);
    PutU32(site.line);
  }
  PutU32(static_cast<uint32_t>(source_map_.loops.size()));
  for (const auto& [id, loop] : source_map_.loops) {
    PutU32(id);
    PutStr(loop.file);
    PutU32(loop.line);
    PutU32(loop.parent);
  }
}

void BinaryTraceWriter::Event(const TraceEvent& e) {
  validator_->Check(e, count_);
  PutU8(static_cast<uint8_t>(e.kind));
  PutU32(e.thread_id);
  PutU64(e.ins_index);
  switch (e.kind) {
    case EventKind::kLoad:
      PutU64(e.addr);
      PutU8(static_cast<uint8_t>(e.size));
      PutU8(static_cast<uint8_t>(e.fp_class));
      PutU32(e.site_id);
      Put(e.value.data(), e.size);
      break;
    case EventKind::kCall:
    case EventKind::kReturn:
      PutU32(e.site_id);
      break;
    case EventKind::kLoopHead:
      PutU32(e.loop_id);
      PutU32(e.site_id);
      break;
    case EventKind::kAlloc:
      PutU64(e.addr);
      PutU64(e.size);
      break;
    case EventKind::kFree:
      PutU64(e.addr);
      break;
    case EventKind::kStaticImage:
      PutU32(static_cast<uint32_t>(e.objects.size()));
      for (const auto& obj : e.objects) {
        PutStr(obj.name);
        PutU64(obj.base);
        PutU64(obj.size);
      }
      break;
    case EventKind::kThreadStart:
      break;
  }
  ++count_;
}

void BinaryTraceWriter::End() {
  if (ended_) return;
  ended_ = true;
  PutU8(kTrailerTag);
  PutU64(count_);
  out_.flush();
}

// ---------------------------------------------------------------------------
// Binary reader

BinaryTraceReader::BinaryTraceReader(std::istream& in) : in_(in) {
  char magic[4] = {};
  in_.read(magic, 4);
  if (in_.gcount() != 4 || std::memcmp(magic, kTraceMagic, 4) != 0)
    throw DecodeError("bad magic", 0);
  offset_ = 4;
  uint16_t version = GetU16(0);
  if (version != kTraceVersion)
    throw DecodeError("unsupported version " + std::to_string(version), 4);

  uint64_t start = offset_;
  uint32_t n_sites = GetU32(start);
  for (uint32_t i = 0; i < n_sites; ++i) {
    start = offset_;
    uint32_t id = GetU32(start);
    SiteInfo site;
    site.function = GetStr(start);
    site.file = GetStr(start);
    site.line = GetU32(start);
    if (!source_map_.sites.emplace(id, std::move(site)).second)
      throw DecodeError("duplicate site id", start);
  }
  start = offset_;
  uint32_t n_loops = GetU32(start);
  for (uint32_t i = 0; i < n_loops; ++i) {
    start = offset_;
    uint32_t id = GetU32(start);
    LoopInfo loop;
    loop.file = GetStr(start);
    loop.line = GetU32(start);
    loop.parent = GetU32(start);
    if (!source_map_.loops.emplace(id, std::move(loop)).second)
      throw DecodeError("duplicate loop id", start);
  }
}

void BinaryTraceReader::Get(void* data, size_t n, uint64_t record_start) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in_.gcount()) != n)
    throw DecodeError("truncated record", record_start);
  offset_ += n;
}

uint8_t BinaryTraceReader::GetU8(uint64_t record_start) {
  uint8_t v;
  Get(&v, 1, record_start);
  return v;
}

uint16_t BinaryTraceReader::GetU16(uint64_t record_start) {
  uint8_t b[2];
  Get(b, 2, record_start);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t BinaryTraceReader::GetU32(uint64_t record_start) {
  uint8_t b[4];
  Get(b, 4, record_start);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint64_t BinaryTraceReader::GetU64(uint64_t record_start) {
  uint8_t b[8];
  Get(b, 8, record_start);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::string BinaryTraceReader::GetStr(uint64_t record_start) {
  uint32_t n = GetU32(record_start);
  // Strings are short identifiers; a huge length means corrupt input, and
  // reading it chunk-wise keeps memory bounded until the truncation shows.
  constexpr uint32_t kMaxString = 1u << 20;
  if (n > kMaxString) throw DecodeError("string too long", record_start);
  std::string s(n, '\0');
  Get(s.data(), n, record_start);
  return s;
}

std::optional<TraceEvent> BinaryTraceReader::Next() {
  if (done_) return std::nullopt;
  const uint64_t start = offset_;
  uint8_t tag = GetU8(start);
  if (tag == kTrailerTag) {
    uint64_t n = GetU64(start);
    if (n != count_)
      throw DecodeError("trailer count " + std::to_string(n) +
                            " does not match " + std::to_string(count_) +
                            " records",
                        start);
    if (in_.peek() != std::char_traits<char>::eof())
      throw DecodeError("trailing bytes after trailer", offset_);
    done_ = true;
    return std::nullopt;
  }
  if (tag < static_cast<uint8_t>(EventKind::kLoad) ||
      tag > static_cast<uint8_t>(EventKind::kThreadStart))
    throw DecodeError("unknown event kind " + std::to_string(tag), start);

  TraceEvent e;
  e.kind = static_cast<EventKind>(tag);
  e.thread_id = GetU32(start);
  e.ins_index = GetU64(start);
  switch (e.kind) {
    case EventKind::kLoad: {
      e.addr = GetU64(start);
      e.size = GetU8(start);
      uint8_t fp = GetU8(start);
      if (fp > static_cast<uint8_t>(FpClass::kF64))
        throw DecodeError("unknown fp class", start);
      e.fp_class = static_cast<FpClass>(fp);
      e.site_id = GetU32(start);
      if (!IsValidLoadSize(e.size))
        throw DecodeError("invalid load size", start);
      Get(e.value.data(), e.size, start);
      break;
    }
    case EventKind::kCall:
    case EventKind::kReturn:
      e.site_id = GetU32(start);
      break;
    case EventKind::kLoopHead:
      e.loop_id = GetU32(start);
      e.site_id = GetU32(start);
      break;
    case EventKind::kAlloc:
      e.addr = GetU64(start);
      e.size = GetU64(start);
      break;
    case EventKind::kFree:
      e.addr = GetU64(start);
      break;
    case EventKind::kStaticImage: {
      uint32_t n = GetU32(start);
      for (uint32_t i = 0; i < n; ++i) {
        StaticObject obj;
        obj.name = GetStr(start);
        obj.base = GetU64(start);
        obj.size = GetU64(start);
        e.objects.push_back(std::move(obj));
      }
      break;
    }
    case EventKind::kThreadStart:
      break;
  }
  ++count_;
  return e;
}

uint64_t WriteTrace(std::span<const TraceEvent> events,
                    const SourceMap& source_map, std::ostream& out) {
  BinaryTraceWriter writer(out);
  writer.Begin(source_map);
  for (const auto& e : events) writer.Event(e);
  writer.End();
  return writer.bytes_written();
}

Trace ReadTrace(std::istream& in) {
  BinaryTraceReader reader(in);
  Trace trace;
  trace.source_map = reader.source_map();
  while (auto e = reader.Next()) trace.events.push_back(std::move(*e));
  return trace;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string Hex(uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
  return "0x" + std::string(buf, p);
}

std::string HexBytes(std::span<const uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

class LineParser {
 public:
  LineParser(const std::string& line, uint64_t line_no)
      : in_(line), line_no_(line_no) {}

  std::string Word() {
    std::string w;
    if (!(in_ >> w)) throw DecodeError("missing field", line_no_);
    return w;
  }

  uint64_t Number() {
    std::string w = Word();
    int base = 10;
    const char* first = w.data();
    if (w.size() > 2 && w[0] == '0' && (w[1] == 'x' || w[1] == 'X')) {
      base = 16;
      first += 2;
    }
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(first, w.data() + w.size(), v, base);
    if (ec != std::errc() || p != w.data() + w.size())
      throw DecodeError("bad number '" + w + "'", line_no_);
    return v;
  }

  uint32_t Number32() {
    uint64_t v = Number();
    if (v > 0xFFFFFFFFu) throw DecodeError("value out of range", line_no_);
    return static_cast<uint32_t>(v);
  }

  void ExpectEnd() {
    std::string w;
    if (in_ >> w) throw DecodeError("unexpected field '" + w + "'", line_no_);
  }

 private:
  std::istringstream in_;
  uint64_t line_no_;
};

FpClass ParseFpClass(const std::string& w, uint64_t line_no) {
  if (w == "nonfp") return FpClass::kNonFp;
  if (w == "f32") return FpClass::kF32;
  if (w == "f64") return FpClass::kF64;
  throw DecodeError("unknown fp class '" + w + "'", line_no);
}

}  // namespace

void WriteTextTrace(std::span<const TraceEvent> events,
                    const SourceMap& source_map, std::ostream& out) {
  TraceValidator validator(source_map);
  out << "LRT1 text " << kTraceVersion << "\n";
  for (const auto& [id, s] : source_map.sites)
    out << "site " << id << ' ' << s.function << ' ' << s.file << ' ' << s.line
        << "\n";
  for (const auto& [id, l] : source_map.loops) {
    out << "loop " << id << ' ' << l.file << ' ' << l.line << ' ';
    if (l.parent == kNoLoop)
      out << '-';
    else
      out << l.parent;
    out << "\n";
  }
  uint64_t index = 0;
  for (const auto& e : events) {
    validator.Check(e, index++);
    const std::string head =
        std::to_string(e.thread_id) + ' ' + std::to_string(e.ins_index);
    switch (e.kind) {
      case EventKind::kLoad:
        out << "L " << head << ' ' << Hex(e.addr) << ' ' << e.size << ' '
            << HexBytes(e.value_bytes()) << ' ' << ToString(e.fp_class) << ' '
            << e.site_id;
        break;
      case EventKind::kCall:
        out << "C " << head << ' ' << e.site_id;
        break;
      case EventKind::kReturn:
        out << "R " << head << ' ' << e.site_id;
        break;
      case EventKind::kLoopHead:
        out << "H " << head << ' ' << e.loop_id << ' ' << e.site_id;
        break;
      case EventKind::kAlloc:
        out << "A " << head << ' ' << Hex(e.addr) << ' ' << e.size;
        break;
      case EventKind::kFree:
        out << "F " << head << ' ' << Hex(e.addr);
        break;
      case EventKind::kStaticImage:
        out << "S " << head << ' ' << e.objects.size();
        for (const auto& obj : e.objects)
          out << ' ' << obj.name << ' ' << Hex(obj.base) << ' ' << obj.size;
        break;
      case EventKind::kThreadStart:
        out << "T " << head;
        break;
    }
    out << "\n";
  }
}

Trace ReadTextTrace(std::istream& in) {
  Trace trace;
  std::string line;
  uint64_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    LineParser p(line, line_no);
    std::string tag = p.Word();
    if (!saw_header) {
      if (tag != "LRT1" || p.Word() != "text")
        throw DecodeError("bad magic", 0);
      if (p.Number() != kTraceVersion)
        throw DecodeError("unsupported version", line_no);
      saw_header = true;
      continue;
    }
    if (tag == "site") {
      uint32_t id = p.Number32();
      SiteInfo s;
      s.function = p.Word();
      s.file = p.Word();
      s.line = p.Number32();
      p.ExpectEnd();
      trace.source_map.sites[id] = std::move(s);
      continue;
    }
    if (tag == "loop") {
      uint32_t id = p.Number32();
      LoopInfo l;
      l.file = p.Word();
      l.line = p.Number32();
      std::string parent = p.Word();
      if (parent != "-") {
        LineParser pp(parent, line_no);
        l.parent = pp.Number32();
      }
      p.ExpectEnd();
      trace.source_map.loops[id] = std::move(l);
      continue;
    }
    if (tag.size() != 1) throw DecodeError("unknown record '" + tag + "'", line_no);

    TraceEvent e;
    e.thread_id = p.Number32();
    e.ins_index = p.Number();
    switch (tag[0]) {
      case 'L': {
        e.kind = EventKind::kLoad;
        e.addr = p.Number();
        e.size = p.Number();
        if (!IsValidLoadSize(e.size))
          throw DecodeError("invalid load size", line_no);
        std::string hex = p.Word();
        if (hex.size() != 2 * e.size)
          throw DecodeError("value length does not match size", line_no);
        for (size_t i = 0; i < e.size; ++i) {
          auto [ptr, ec] = std::from_chars(hex.data() + 2 * i,
                                           hex.data() + 2 * i + 2, e.value[i], 16);
          if (ec != std::errc() || ptr != hex.data() + 2 * i + 2)
            throw DecodeError("bad value bytes", line_no);
        }
        e.fp_class = ParseFpClass(p.Word(), line_no);
        e.site_id = p.Number32();
        break;
      }
      case 'C':
        e.kind = EventKind::kCall;
        e.site_id = p.Number32();
        break;
      case 'R':
        e.kind = EventKind::kReturn;
        e.site_id = p.Number32();
        break;
      case 'H':
        e.kind = EventKind::kLoopHead;
        e.loop_id = p.Number32();
        e.site_id = p.Number32();
        break;
      case 'A':
        e.kind = EventKind::kAlloc;
        e.addr = p.Number();
        e.size = p.Number();
        break;
      case 'F':
        e.kind = EventKind::kFree;
        e.addr = p.Number();
        break;
      case 'S': {
        e.kind = EventKind::kStaticImage;
        uint64_t n = p.Number();
        for (uint64_t i = 0; i < n; ++i) {
          StaticObject obj;
          obj.name = p.Word();
          obj.base = p.Number();
          obj.size = p.Number();
          e.objects.push_back(std::move(obj));
        }
        break;
      }
      case 'T':
        e.kind = EventKind::kThreadStart;
        break;
      default:
        throw DecodeError("unknown record '" + tag + "'", line_no);
    }
    p.ExpectEnd();
    trace.events.push_back(std::move(e));
  }
  if (!saw_header) throw DecodeError("bad magic", 0);
  return trace;
}

Trace ReadAnyTrace(std::istream& in) {
  char head[5] = {};
  in.read(head, 5);
  std::streamsize got = in.gcount();
  in.clear();
  in.seekg(0);
  if (got == 5 && std::memcmp(head, "LRT1 ", 5) == 0) return ReadTextTrace(in);
  return ReadTrace(in);
}

}  // namespace redload
