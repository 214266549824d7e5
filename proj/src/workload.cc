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

#include "redload/workload.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "redload/errors.h"

namespace redload {

namespace {

constexpr uint64_t kStaticBase = 0x601000;
constexpr uint64_t kHeapBase = 0x2000000;
constexpr uint64_t kStackBase = 0x7ffd0000;
// Per-thread displacement of heap and stack addresses.
constexpr uint64_t kThreadSpan = 0x10000000;

struct ScenarioInfo {
  ScenarioName name;
  const char* text;
  ScenarioParams defaults;
};

const std::vector<ScenarioInfo>& Scenarios() {
  static const std::vector<ScenarioInfo> kScenarios = {
      {ScenarioName::kAdjacentEqual, "adjacent_equal", {{"values", "1,1,1,15"}}},
      {ScenarioName::kLinearSearch,
       "linear_search",
       {{"n", "1000"}, {"queries", "1000"}, {"probe", "-1"}}},
      {ScenarioName::kHashCollision,
       "hash_collision",
       {{"items", "2000"},
        {"buckets", "1024"},
        {"used_buckets", "20"},
        {"queries", "2000"}}},
      {ScenarioName::kStencil, "stencil", {{"nx", "64"}, {"ny", "64"}}},
      {ScenarioName::kForwardCopy,
       "forward_copy",
       {{"len", "1000"}, {"reps", "100"}}},
      {ScenarioName::kCalleeSpill, "callee_spill", {{"max_pos", "64"}}},
      {ScenarioName::kSparseZeros,
       "sparse_zeros",
       {{"len", "1000"},
        {"inner", "16"},
        {"zero_density", "0.9"},
        {"shuffle", "0"}}},
      {ScenarioName::kApproxDrift,
       "approx_drift",
       {{"len", "256"}, {"sweeps", "200"}, {"step", "0.005"}}},
      {ScenarioName::kRandomMixed,
       "random_mixed",
       {{"loads", "20000"},
        {"addresses", "64"},
        {"values", "4"},
        {"functions", "6"},
        {"objects", "1"},
        {"fp", "1"},
        {"store_prob", "0.3"}}},
  };
  return kScenarios;
}

const ScenarioInfo& Info(ScenarioName name) {
  for (const auto& s : Scenarios())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario");
}

// Parameters common to every scenario.
const ScenarioParams& CommonDefaults() {
  static const ScenarioParams kCommon = {
      {"seed", "1"}, {"threads", "1"}, {"ins_stride", "1"}};
  return kCommon;
}

class Params {
 public:
  explicit Params(const Scenario& s) : values_(DefaultParams(s.name)) {
    for (const auto& [k, v] : s.params) {
      if (!values_.contains(k))
        throw ConfigError(std::string("scenario ") + ToString(s.name) +
                          " has no parameter '" + k + "'");
      values_[k] = v;
    }
  }

  int64_t Int(const std::string& key) const {
    const std::string& v = values_.at(key);
    int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      throw ConfigError("parameter '" + key + "' is not an integer: " + v);
    return out;
  }

  uint64_t Count(const std::string& key, uint64_t min = 1) const {
    int64_t v = Int(key);
    if (v < static_cast<int64_t>(min))
      throw ConfigError("parameter '" + key + "' must be at least " +
                        std::to_string(min));
    return static_cast<uint64_t>(v);
  }

  double Real(const std::string& key) const {
    const std::string& v = values_.at(key);
    std::istringstream in(v);
    double out = 0;
    in >> out;
    if (!in || !in.eof() || !std::isfinite(out))
      throw ConfigError("parameter '" + key + "' is not a number: " + v);
    return out;
  }

  const std::string& Text(const std::string& key) const {
    return values_.at(key);
  }

 private:
  ScenarioParams values_;
};

// Small deterministic RNG helpers; std distributions differ across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  uint64_t Next() { return engine_(); }
  uint64_t Below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool Chance(double p) { return Unit() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
std::array<uint8_t, sizeof(T)> Bytes(T v) {
  std::array<uint8_t, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  return b;
}

// Declares the static program (sites, loops) and emits events with
// per-thread instruction counters.
class Program {
 public:
  using Emit = std::function<void(const TraceEvent&)>;

  explicit Program(uint64_t stride) : stride_(stride) {}

  uint32_t Function(const std::string& name, const std::string& file,
                    uint32_t line) {
    return Site(name, file, line);
  }

  uint32_t Site(const std::string& function, const std::string& file,
                uint32_t line) {
    uint32_t id = next_site_++;
    map_.sites[id] = SiteInfo{function, file, line};
    return id;
  }

  uint32_t Loop(const std::string& function, const std::string& file,
                uint32_t line, uint32_t parent = kNoLoop) {
    uint32_t id = next_loop_++;
    map_.loops[id] = LoopInfo{file, line, parent};
    loop_site_[id] = Site(function, file, line);
    return id;
  }

  const SourceMap& source_map() const { return map_; }
  void set_emit(Emit emit) { emit_ = std::move(emit); }

  void ThreadStart(uint32_t tid) {
    emit_(TraceEvent::ThreadStart(tid, NextIns(tid)));
  }
  void Call(uint32_t tid, uint32_t fn) {
    emit_(TraceEvent::Call(tid, NextIns(tid), fn));
  }
  void Return(uint32_t tid, uint32_t fn) {
    emit_(TraceEvent::Return(tid, NextIns(tid), fn));
  }
  void Head(uint32_t tid, uint32_t loop) {
    emit_(TraceEvent::LoopHead(tid, NextIns(tid), loop, loop_site_.at(loop)));
  }
  void Load(uint32_t tid, uint32_t site, uint64_t addr,
            std::span<const uint8_t> bytes, FpClass fp) {
    emit_(TraceEvent::Load(tid, NextIns(tid), addr, bytes, fp, site));
    ++loads_;
  }
  void LoadI32(uint32_t tid, uint32_t site, uint64_t addr, int32_t v) {
    Load(tid, site, addr, Bytes(v), FpClass::kNonFp);
  }
  void LoadU64(uint32_t tid, uint32_t site, uint64_t addr, uint64_t v) {
    Load(tid, site, addr, Bytes(v), FpClass::kNonFp);
  }
  void LoadF64(uint32_t tid, uint32_t site, uint64_t addr, double v) {
    Load(tid, site, addr, Bytes(v), FpClass::kF64);
  }
  void Alloc(uint32_t tid, uint64_t base, uint64_t size) {
    emit_(TraceEvent::Alloc(tid, NextIns(tid), base, size));
  }
  void Free(uint32_t tid, uint64_t base) {
    emit_(TraceEvent::Free(tid, NextIns(tid), base));
  }
  void Image(uint32_t tid, std::vector<StaticObject> objects) {
    emit_(TraceEvent::Image(tid, NextIns(tid), std::move(objects)));
  }

  uint64_t loads() const { return loads_; }

 private:
  uint64_t NextIns(uint32_t tid) {
    uint64_t& next = ins_[tid];
    uint64_t v = next;
    next += stride_;
    return v;
  }

  uint64_t stride_;
  SourceMap map_;
  std::map<uint32_t, uint32_t> loop_site_;
  std::map<uint32_t, uint64_t> ins_;
  uint32_t next_site_ = 1;
  uint32_t next_loop_ = 1;
  uint64_t loads_ = 0;
  Emit emit_;
};

std::vector<int64_t> ParseList(const std::string& text) {
  std::vector<int64_t> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw ConfigError("bad list element '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

uint64_t HeapBase(uint32_t tid) { return kHeapBase + tid * kThreadSpan; }
uint64_t StackBase(uint32_t tid) { return kStackBase + tid * kThreadSpan; }

// Runs `body` once per thread, threads one after another.
void RunThreads(Program& p, TraceSink& sink, uint64_t threads,
                const std::function<void(uint32_t)>& body) {
  sink.Begin(p.source_map());
  p.set_emit([&sink](const TraceEvent& e) { sink.Event(e); });
  for (uint32_t tid = 0; tid < threads; ++tid) {
    p.ThreadStart(tid);
    body(tid);
  }
  sink.End();
}

// ---------------------------------------------------------------------------
// int A[N] = {1, 1, 1, 15}; for (i = 0; i < N; i++) t += func(A[i]);

void AdjacentEqual(const Params& params, Program& p, TraceSink& sink,
                   uint64_t threads) {
  const std::vector<int64_t> values = ParseList(params.Text("values"));
  const uint32_t main_fn = p.Function("main", "adjacent.c", 1);
  const uint32_t loop = p.Loop("main", "adjacent.c", 3);
  const uint32_t site = p.Site("main", "adjacent.c", 5);
  const uint64_t base = kStaticBase;

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    if (tid == 0) p.Image(tid, {{"A", base, 4 * values.size()}});
    p.Call(tid, main_fn);
    for (size_t i = 0; i < values.size(); ++i) {
      p.Head(tid, loop);
      p.LoadI32(tid, site, base + 4 * i, static_cast<int32_t>(values[i]));
    }
    p.Return(tid, main_fn);
  });
}

// for (j...) i = findIndex(CDF, n, u[j]); with a linear scan inside.

void LinearSearch(const Params& params, Program& p, TraceSink& sink,
                  uint64_t threads) {
  const uint64_t n = params.Count("n");
  const uint64_t queries = params.Count("queries");
  const int64_t probe = params.Int("probe");
  if (probe >= static_cast<int64_t>(n))
    throw ConfigError("probe must be below n");

  const uint32_t main_fn = p.Function("main", "linear_search.c", 9);
  const uint32_t query_loop = p.Loop("main", "linear_search.c", 10);
  const uint32_t u_site = p.Site("main", "linear_search.c", 11);
  const uint32_t find_fn = p.Function("findIndex", "linear_search.c", 11);
  const uint32_t scan_loop = p.Loop("findIndex", "linear_search.c", 2);
  const uint32_t cdf_site = p.Site("findIndex", "linear_search.c", 3);

  const uint64_t cdf = kStaticBase;
  const uint64_t u = cdf + 4 * n + 64;
  Rng rng(params.Count("seed", 0));
  std::vector<int32_t> probes(queries);
  for (auto& v : probes)
    v = static_cast<int32_t>(probe >= 0 ? probe : rng.Below(n));

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    if (tid == 0) p.Image(tid, {{"CDF", cdf, 4 * n}, {"u", u, 4 * queries}});
    p.Call(tid, main_fn);
    for (uint64_t j = 0; j < queries; ++j) {
      p.Head(tid, query_loop);
      p.LoadI32(tid, u_site, u + 4 * j, probes[j]);
      p.Call(tid, find_fn);
      for (uint64_t x = 0; x < n; ++x) {
        p.Head(tid, scan_loop);
        p.LoadI32(tid, cdf_site, cdf + 4 * x, static_cast<int32_t>(x));
        if (static_cast<int32_t>(x) >= probes[j]) break;
      }
      p.Return(tid, find_fn);
    }
    p.Return(tid, main_fn);
  });
}

// Chained hash table where almost every key lands in a few buckets.

void HashCollision(const Params& params, Program& p, TraceSink& sink,
                   uint64_t threads) {
  const uint64_t items = params.Count("items");
  const uint64_t buckets = params.Count("buckets");
  const uint64_t used = params.Count("used_buckets");
  const uint64_t queries = params.Count("queries");
  if (used > buckets) throw ConfigError("used_buckets exceeds buckets");

  const uint32_t main_fn = p.Function("main", "hashtable.c", 40);
  const uint32_t insert_loop = p.Loop("main", "hashtable.c", 42);
  const uint32_t insert_fn = p.Function("hashtable_insert", "hashtable.c", 43);
  const uint32_t query_loop = p.Loop("main", "hashtable.c", 45);
  const uint32_t search_fn = p.Function("hashtable_search", "hashtable.c", 46);
  const uint32_t table_site = p.Site("hashtable_search", "hashtable.c", 6);
  const uint32_t walk_loop = p.Loop("hashtable_search", "hashtable.c", 7);
  const uint32_t hash_site = p.Site("hashtable_search", "hashtable.c", 8);
  const uint32_t key_site = p.Site("hashtable_search", "hashtable.c", 8);
  const uint32_t next_site = p.Site("hashtable_search", "hashtable.c", 9);

  constexpr uint64_t kEntrySize = 24;  // u32 h, u32 k, u64 next, pad
  Rng rng(params.Count("seed", 0));
  std::vector<uint32_t> hash(items);
  std::vector<uint64_t> bucket_of(items);
  for (uint64_t i = 0; i < items; ++i) {
    hash[i] = static_cast<uint32_t>(rng.Next());
    bucket_of[i] = rng.Below(used) * (buckets / used);
  }
  std::vector<uint64_t> targets(queries);
  for (auto& t : targets) t = rng.Below(items);

  const uint64_t table = kStaticBase;
  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t heap = HeapBase(tid);
    auto entry_addr = [&](uint64_t i) { return heap + i * 32; };
    if (tid == 0) p.Image(tid, {{"table", table, 8 * buckets}});
    p.Call(tid, main_fn);
    // Inserts prepend, so a chain lists its items newest first.
    std::vector<std::vector<uint64_t>> chains(buckets);
    for (uint64_t i = 0; i < items; ++i) {
      p.Head(tid, insert_loop);
      p.Call(tid, insert_fn);
      p.Alloc(tid, entry_addr(i), kEntrySize);
      p.Return(tid, insert_fn);
      chains[bucket_of[i]].insert(chains[bucket_of[i]].begin(), i);
    }
    // Table slots are per thread in spirit; threads share the static table
    // image but each walks its own heap chains, so slot values differ.
    for (uint64_t q = 0; q < queries; ++q) {
      p.Head(tid, query_loop);
      p.Call(tid, search_fn);
      const uint64_t want = targets[q];
      const auto& chain = chains[bucket_of[want]];
      p.LoadU64(tid, table_site, table + 8 * bucket_of[want],
                entry_addr(chain.front()));
      for (size_t c = 0; c < chain.size(); ++c) {
        const uint64_t e = chain[c];
        p.Head(tid, walk_loop);
        p.LoadI32(tid, hash_site, entry_addr(e), static_cast<int32_t>(hash[e]));
        if (e == want) {
          p.LoadI32(tid, key_site, entry_addr(e) + 4, static_cast<int32_t>(e));
          break;
        }
        const uint64_t next = c + 1 < chain.size() ? entry_addr(chain[c + 1]) : 0;
        p.LoadU64(tid, next_site, entry_addr(e) + 8, next);
      }
      p.Return(tid, search_fn);
    }
    p.Return(tid, main_fn);
  });
}

// 2-D stencil reading tIn[c], tIn[w], tIn[e] without scalar replacement.

void Stencil(const Params& params, Program& p, TraceSink& sink,
             uint64_t threads) {
  const uint64_t nx = params.Count("nx");
  const uint64_t ny = params.Count("ny");
  const uint32_t main_fn = p.Function("main", "hotspot3d.c", 20);
  const uint32_t y_loop = p.Loop("main", "hotspot3d.c", 1);
  const uint32_t x_loop = p.Loop("main", "hotspot3d.c", 2, y_loop);
  const uint32_t c_site = p.Site("main", "hotspot3d.c", 8);
  const uint32_t w_site = p.Site("main", "hotspot3d.c", 8);
  const uint32_t e_site = p.Site("main", "hotspot3d.c", 8);

  Rng rng(params.Count("seed", 0));
  std::vector<double> t_in(nx * ny);
  for (auto& v : t_in) v = 300.0 + 100.0 * rng.Unit();

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t base = HeapBase(tid);
    p.Call(tid, main_fn);
    p.Alloc(tid, base, 8 * nx * ny);
    for (uint64_t y = 0; y < ny; ++y) {
      p.Head(tid, y_loop);
      for (uint64_t x = 0; x < nx; ++x) {
        p.Head(tid, x_loop);
        const uint64_t c = x + y * nx;
        const uint64_t w = x == 0 ? c : c - 1;
        const uint64_t e = x == nx - 1 ? c : c + 1;
        p.LoadF64(tid, c_site, base + 8 * c, t_in[c]);
        p.LoadF64(tid, w_site, base + 8 * w, t_in[w]);
        p.LoadF64(tid, e_site, base + 8 * e, t_in[e]);
      }
    }
    p.Return(tid, main_fn);
  });
}

// cache_buf[0] = 1; for (i = 1; i < len; ++i) cache_buf[i] = cache_buf[i-1];
// called from a loop.

void ForwardCopy(const Params& params, Program& p, TraceSink& sink,
                 uint64_t threads) {
  const uint64_t len = params.Count("len", 2);
  const uint64_t reps = params.Count("reps");
  const uint32_t main_fn = p.Function("main", "msgrate.c", 90);
  const uint32_t rep_loop = p.Loop("main", "msgrate.c", 95);
  const uint32_t inval_fn = p.Function("cache_invalidate", "msgrate.c", 96);
  const uint32_t copy_loop = p.Loop("cache_invalidate", "msgrate.c", 6);
  const uint32_t site = p.Site("cache_invalidate", "msgrate.c", 7);

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t buf = HeapBase(tid);
    p.Call(tid, main_fn);
    p.Alloc(tid, buf, 4 * len);
    for (uint64_t r = 0; r < reps; ++r) {
      p.Head(tid, rep_loop);
      p.Call(tid, inval_fn);
      for (uint64_t i = 1; i < len; ++i) {
        p.Head(tid, copy_loop);
        p.LoadI32(tid, site, buf + 4 * (i - 1), 1);
      }
      p.Return(tid, inval_fn);
    }
    p.Return(tid, main_fn);
  });
}

// A callee reached through a function pointer reloads unchanged arguments
// from the same stack slots on every call.

void CalleeSpill(const Params& params, Program& p, TraceSink& sink,
                 uint64_t threads) {
  const uint64_t max_pos = params.Count("max_pos");
  const uint32_t main_fn = p.Function("main", "h264ref.c", 100);
  const uint32_t pos_loop = p.Loop("main", "h264ref.c", 1);
  const uint32_t blk_loop = p.Loop("main", "h264ref.c", 6, pos_loop);
  const uint32_t y_loop = p.Loop("main", "h264ref.c", 7, blk_loop);
  const uint32_t callee = p.Function("PelYline_11", "h264ref.c", 8);
  const uint32_t ref_site = p.Site("PelYline_11", "h264ref.c", 201);
  const uint32_t y_site = p.Site("PelYline_11", "h264ref.c", 202);
  const uint32_t x_site = p.Site("PelYline_11", "h264ref.c", 203);
  const uint32_t h_site = p.Site("PelYline_11", "h264ref.c", 204);
  const uint32_t w_site = p.Site("PelYline_11", "h264ref.c", 205);

  Rng rng(params.Count("seed", 0));
  std::vector<int32_t> abs_x(max_pos);
  std::vector<int32_t> abs_y0(max_pos);
  for (uint64_t i = 0; i < max_pos; ++i) {
    abs_x[i] = static_cast<int32_t>(rng.Below(1920));
    abs_y0[i] = static_cast<int32_t>(rng.Below(1000));
  }

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t sp = StackBase(tid);
    const uint64_t ref_pic = HeapBase(tid);
    p.Call(tid, main_fn);
    for (uint64_t pos = 0; pos < max_pos; ++pos) {
      p.Head(tid, pos_loop);
      int32_t abs_y = abs_y0[pos];
      for (int blk = 0; blk < 4; ++blk) {
        p.Head(tid, blk_loop);
        for (int y = 0; y < 4; ++y) {
          p.Head(tid, y_loop);
          p.Call(tid, callee);
          p.LoadU64(tid, ref_site, sp, ref_pic);
          p.LoadI32(tid, y_site, sp + 8, abs_y++);
          p.LoadI32(tid, x_site, sp + 12, abs_x[pos]);
          p.LoadI32(tid, h_site, sp + 16, 1080);
          p.LoadI32(tid, w_site, sp + 20, 1920);
          p.Return(tid, callee);
        }
      }
    }
    p.Return(tid, main_fn);
  });
}

// Weight-update nest where most of delta[] and oldw[][] are zero.

void SparseZeros(const Params& params, Program& p, TraceSink& sink,
                 uint64_t threads) {
  const uint64_t len = params.Count("len");
  const uint64_t inner = params.Count("inner");
  const double density = params.Real("zero_density");
  const bool shuffle = params.Int("shuffle") != 0;
  if (density < 0 || density > 1)
    throw ConfigError("zero_density must be in [0, 1]");

  const uint32_t main_fn = p.Function("main", "backprop.c", 300);
  const uint32_t j_loop = p.Loop("main", "backprop.c", 1);
  const uint32_t k_loop = p.Loop("main", "backprop.c", 2, j_loop);
  const uint32_t delta_site = p.Site("main", "backprop.c", 3);
  const uint32_t oldw_site = p.Site("main", "backprop.c", 3);

  Rng rng(params.Count("seed", 0));
  auto draw = [&] { return rng.Chance(density) ? 0.0 : 0.01 + rng.Unit(); };
  std::vector<double> delta(len);
  for (auto& v : delta) v = draw();
  std::vector<double> oldw(inner * len);
  for (auto& v : oldw) v = draw();
  std::vector<uint64_t> order(len);
  for (uint64_t j = 0; j < len; ++j) order[j] = j;
  if (shuffle) rng.Shuffle(order);

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t delta_base = HeapBase(tid);
    const uint64_t oldw_base = delta_base + 8 * len + 64;
    p.Call(tid, main_fn);
    p.Alloc(tid, delta_base, 8 * len);
    p.Alloc(tid, oldw_base, 8 * inner * len);
    for (uint64_t j : order) {
      p.Head(tid, j_loop);
      for (uint64_t k = 0; k < inner; ++k) {
        p.Head(tid, k_loop);
        p.LoadF64(tid, delta_site, delta_base + 8 * j, delta[j]);
        p.LoadF64(tid, oldw_site, oldw_base + 8 * (k * len + j),
                  oldw[k * len + j]);
      }
    }
    p.Return(tid, main_fn);
  });
}

// Repeated sweeps over a field whose values drift by a small relative step
// between sweeps.

void ApproxDrift(const Params& params, Program& p, TraceSink& sink,
                 uint64_t threads) {
  const uint64_t len = params.Count("len");
  const uint64_t sweeps = params.Count("sweeps");
  const double step = params.Real("step");
  if (step < 0) throw ConfigError("step must be non-negative");

  const uint32_t main_fn = p.Function("main", "drift.c", 10);
  const uint32_t sweep_loop = p.Loop("main", "drift.c", 1);
  const uint32_t i_loop = p.Loop("main", "drift.c", 2, sweep_loop);
  const uint32_t site = p.Site("main", "drift.c", 3);

  Rng rng(params.Count("seed", 0));
  std::vector<double> init(len);
  for (auto& v : init) v = 1.0 + rng.Unit();

  RunThreads(p, sink, threads, [&](uint32_t tid) {
    const uint64_t base = HeapBase(tid);
    std::vector<double> field = init;
    p.Call(tid, main_fn);
    p.Alloc(tid, base, 8 * len);
    for (uint64_t s = 0; s < sweeps; ++s) {
      p.Head(tid, sweep_loop);
      for (uint64_t i = 0; i < len; ++i) {
        p.Head(tid, i_loop);
        p.LoadF64(tid, site, base + 8 * i, field[i]);
        field[i] *= 1.0 + step;
      }
    }
    p.Return(tid, main_fn);
  });
}

// ---------------------------------------------------------------------------
// random_mixed: a random static program of functions, loops and load sites,
// executed until a load budget is reached.

struct RandomStmt {
  enum Kind { kLoad, kCall, kLoop } kind = kLoad;
  uint32_t id = 0;  // site, callee index or loop id
  std::vector<RandomStmt> body;
};

struct RandomSite {
  FpClass fp = FpClass::kNonFp;
  uint64_t size = 4;
  std::array<uint64_t, 2> home{};
};

class RandomMixed {
 public:
  RandomMixed(const Params& params, Program& p)
      : p_(p),
        rng_(params.Count("seed", 0)),
        budget_(params.Count("loads")),
        slots_(params.Count("addresses", 8)),
        value_count_(params.Count("values")),
        fp_(params.Int("fp") != 0),
        objects_(params.Int("objects") != 0),
        store_prob_(params.Real("store_prob")),
        threads_(params.Count("threads")) {
    const uint64_t functions = params.Count("functions");
    main_fn_ = p_.Function("main", "random.c", 1);
    top_loop_ = p_.Loop("main", "random.c", 2);
    for (uint64_t f = 0; f < functions; ++f) {
      const std::string name = "f" + std::to_string(f);
      call_site_.push_back(p_.Function(name, "random.c", 1000 + 100 * f));
      names_.push_back(name);
    }
    bodies_.resize(functions);
    for (uint64_t f = functions; f-- > 0;) {
      next_line_ = 1000 + 100 * f + 1;
      bodies_[f] = Block(f, kNoLoop, 0);
    }
    for (uint64_t f = 0; f < functions; ++f) top_callable_.push_back(f);
  }

  void Run(TraceSink& sink) {
    // Events carry placeholder values until the global order is fixed.
    std::vector<std::vector<TraceEvent>> per_thread(threads_);
    for (uint32_t tid = 0; tid < threads_; ++tid) {
      p_.set_emit([&, tid](const TraceEvent& e) { per_thread[tid].push_back(e); });
      RunThread(tid);
    }

    sink.Begin(p_.source_map());
    std::vector<size_t> cursor(threads_, 0);
    std::vector<uint32_t> active;
    for (uint32_t t = 0; t < threads_; ++t) active.push_back(t);
    InitMemory();
    while (!active.empty()) {
      const size_t pick = rng_.Below(active.size());
      const uint32_t tid = active[pick];
      TraceEvent& e = per_thread[tid][cursor[tid]++];
      if (e.kind == EventKind::kLoad) FillValue(e);
      sink.Event(e);
      if (cursor[tid] == per_thread[tid].size())
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    sink.End();
  }

 private:
  static constexpr uint64_t kIntRegion = 0x30000000;
  static constexpr uint64_t kFpRegion = 0x38000000;
  static constexpr int kMaxDepth = 3;

  uint64_t RegionBytes() const { return 8 * slots_; }

  std::vector<RandomStmt> Block(uint64_t fn, uint32_t parent_loop, int depth) {
    std::vector<RandomStmt> out;
    const uint64_t n = 1 + rng_.Below(3);
    for (uint64_t i = 0; i < n; ++i) {
      const uint64_t roll = rng_.Below(10);
      RandomStmt s;
      if (roll < 2 && fn + 1 < bodies_.size()) {
        s.kind = RandomStmt::kCall;
        s.id = static_cast<uint32_t>(fn + 1 + rng_.Below(bodies_.size() - fn - 1));
      } else if (roll < 5 && depth < kMaxDepth) {
        s.kind = RandomStmt::kLoop;
        s.id = p_.Loop(names_[fn], "random.c", next_line_++, parent_loop);
        s.body = Block(fn, s.id, depth + 1);
      } else {
        s.kind = RandomStmt::kLoad;
        s.id = NewSite(fn);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  uint32_t NewSite(uint64_t fn) {
    RandomSite site;
    const uint64_t roll = fp_ ? rng_.Below(20) : 0;
    if (roll >= 15) {
      site.fp = FpClass::kF32;
      static constexpr uint64_t kSizes[] = {4, 4, 8, 16};
      site.size = kSizes[rng_.Below(4)];
    } else if (roll >= 10) {
      site.fp = FpClass::kF64;
      static constexpr uint64_t kSizes[] = {8, 8, 8, 16, 32};
      site.size = kSizes[rng_.Below(5)];
    } else {
      static constexpr uint64_t kSizes[] = {1, 2, 4, 4, 4, 8, 8, 16};
      site.size = kSizes[rng_.Below(8)];
    }
    for (auto& h : site.home) h = RandomAddress(site);
    const uint32_t id = p_.Site(names_[fn], "random.c", next_line_++);
    sites_[id] = site;
    return id;
  }

  uint64_t RandomAddress(const RandomSite& site) {
    const uint64_t base = site.fp == FpClass::kNonFp ? kIntRegion : kFpRegion;
    const uint64_t count = std::max<uint64_t>(1, RegionBytes() / site.size);
    return base + rng_.Below(count) * site.size;
  }

  void RunThread(uint32_t tid) {
    p_.ThreadStart(tid);
    p_.Call(tid, main_fn_);
    const uint64_t start = p_.loads();
    const uint64_t chunk = RegionBytes() / 4;
    // Dynamic objects cover the upper halves of both regions in 4 chunks
    // each; the lower halves are static symbols.
    if (tid == 0 && objects_) {
      p_.Image(tid, {{"g_ints", kIntRegion, RegionBytes() / 2},
                     {"g_fp", kFpRegion, RegionBytes() / 2}});
    }
    std::vector<uint64_t> chunks;
    for (uint64_t c = 0; c < 2 && chunk > 0; ++c) {
      chunks.push_back(kIntRegion + RegionBytes() / 2 + c * chunk);
      chunks.push_back(kFpRegion + RegionBytes() / 2 + c * chunk);
    }
    std::set<uint64_t> live;
    while (p_.loads() - start < budget_) {
      p_.Head(tid, top_loop_);
      if (tid == 0 && objects_ && !chunks.empty() && rng_.Chance(0.2)) {
        const uint64_t c = chunks[rng_.Below(chunks.size())];
        if (live.erase(c))
          p_.Free(tid, c);
        else {
          p_.Alloc(tid, c, chunk);
          live.insert(c);
        }
      }
      Invoke(tid, top_callable_[rng_.Below(top_callable_.size())]);
    }
    for (uint64_t c : live) p_.Free(tid, c);
    p_.Return(tid, main_fn_);
  }

  void Invoke(uint32_t tid, uint64_t fn) {
    p_.Call(tid, call_site_[fn]);
    Exec(tid, bodies_[fn]);
    p_.Return(tid, call_site_[fn]);
  }

  void Exec(uint32_t tid, const std::vector<RandomStmt>& block) {
    for (const RandomStmt& s : block) {
      switch (s.kind) {
        case RandomStmt::kLoad: {
          const RandomSite& site = sites_.at(s.id);
          const uint64_t addr =
              rng_.Chance(0.6) ? site.home[rng_.Below(2)] : RandomAddress(site);
          std::array<uint8_t, kMaxLoadSize> zeros{};
          p_.Load(tid, s.id, addr, std::span(zeros.data(), site.size), site.fp);
          break;
        }
        case RandomStmt::kCall:
          Invoke(tid, s.id);
          break;
        case RandomStmt::kLoop: {
          const uint64_t trips = 1 + rng_.Below(3);
          for (uint64_t i = 0; i < trips; ++i) {
            p_.Head(tid, s.id);
            Exec(tid, s.body);
          }
          break;
        }
      }
    }
  }

  void InitMemory() {
    for (uint64_t a = 0; a < RegionBytes(); a += 8) {
      WriteInt(kIntRegion + a, 8, rng_.Below(value_count_));
      WriteDouble(kFpRegion + a, FpValue());
    }
  }

  double FpValue() {
    static constexpr double kValues[] = {1.0, 1.003, 1.03, 2.5, -4.0, 0.0};
    const uint64_t roll = rng_.Below(40);
    if (roll == 0) return std::numeric_limits<double>::quiet_NaN();
    if (roll == 1) return std::numeric_limits<double>::infinity();
    return kValues[rng_.Below(std::min<uint64_t>(value_count_ + 2, 6))];
  }

  void WriteInt(uint64_t addr, uint64_t size, uint64_t v) {
    for (uint64_t i = 0; i < size; ++i)
      memory_[addr + i] = i < 8 ? static_cast<uint8_t>(v >> (8 * i)) : 0;
  }

  void WriteDouble(uint64_t addr, double v) {
    auto b = Bytes(v);
    for (size_t i = 0; i < 8; ++i) memory_[addr + i] = b[i];
  }

  void WriteFloat(uint64_t addr, float v) {
    auto b = Bytes(v);
    for (size_t i = 0; i < 4; ++i) memory_[addr + i] = b[i];
  }

  // Optionally stores a fresh value over the span (the store itself is not
  // traced), then reads memory.
  void FillValue(TraceEvent& e) {
    if (rng_.Chance(store_prob_)) {
      switch (e.fp_class) {
        case FpClass::kNonFp:
          WriteInt(e.addr, e.size, rng_.Below(value_count_));
          break;
        case FpClass::kF64:
          for (uint64_t i = 0; i < e.size; i += 8) WriteDouble(e.addr + i, FpValue());
          break;
        case FpClass::kF32:
          for (uint64_t i = 0; i < e.size; i += 4)
            WriteFloat(e.addr + i, static_cast<float>(FpValue()));
          break;
      }
    }
    for (uint64_t i = 0; i < e.size; ++i) {
      auto it = memory_.find(e.addr + i);
      e.value[i] = it == memory_.end() ? 0 : it->second;
    }
  }

  Program& p_;
  Rng rng_;
  uint64_t budget_;
  uint64_t slots_;
  uint64_t value_count_;
  bool fp_;
  bool objects_;
  double store_prob_;
  uint64_t threads_;
  uint32_t main_fn_ = 0;
  uint32_t top_loop_ = 0;
  uint32_t next_line_ = 0;
  std::vector<uint32_t> call_site_;
  std::vector<std::string> names_;
  std::vector<std::vector<RandomStmt>> bodies_;
  std::vector<uint64_t> top_callable_;
  std::map<uint32_t, RandomSite> sites_;
  std::map<uint64_t, uint8_t> memory_;
};

}  // namespace

const char* ToString(ScenarioName name) { return Info(name).text; }

ScenarioName ParseScenarioName(const std::string& name) {
  for (const auto& s : Scenarios())
    if (name == s.text) return s.name;
  throw ConfigError("unknown scenario '" + name + "'");
}

const std::vector<std::string>& ScenarioNames() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> out;
    for (const auto& s : Scenarios()) out.push_back(s.text);
    return out;
  }();
  return kNames;
}

const ScenarioParams& DefaultParams(ScenarioName name) {
  static const std::map<ScenarioName, ScenarioParams> kAll = [] {
    std::map<ScenarioName, ScenarioParams> out;
    for (const auto& s : Scenarios()) {
      ScenarioParams p = CommonDefaults();
      p.insert(s.defaults.begin(), s.defaults.end());
      out[s.name] = std::move(p);
    }
    return out;
  }();
  return kAll.at(name);
}

void Generate(const Scenario& scenario, TraceSink& sink) {
  const Params params(scenario);
  const uint64_t threads = params.Count("threads");
  if (threads > 64) throw ConfigError("at most 64 threads");
  Program p(params.Count("ins_stride"));
  switch (scenario.name) {
    case ScenarioName::kAdjacentEqual:
      return AdjacentEqual(params, p, sink, threads);
    case ScenarioName::kLinearSearch:
      return LinearSearch(params, p, sink, threads);
    case ScenarioName::kHashCollision:
      return HashCollision(params, p, sink, threads);
    case ScenarioName::kStencil:
      return Stencil(params, p, sink, threads);
    case ScenarioName::kForwardCopy:
      return ForwardCopy(params, p, sink, threads);
    case ScenarioName::kCalleeSpill:
      return CalleeSpill(params, p, sink, threads);
    case ScenarioName::kSparseZeros:
      return SparseZeros(params, p, sink, threads);
    case ScenarioName::kApproxDrift:
      return ApproxDrift(params, p, sink, threads);
    case ScenarioName::kRandomMixed: {
      RandomMixed gen(params, p);
      return gen.Run(sink);
    }
  }
}

Trace Generate(const Scenario& scenario) {
  VectorSink sink;
  Generate(scenario, sink);
  return sink.Take();
}

}  // namespace redload
