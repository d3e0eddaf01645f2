#include <doctest.h>

#include <random>

#include "sttcache/cache.hpp"
#include "sttcache/error.hpp"

using namespace sttcache;

namespace {

TraceEvent read(std::uint64_t addr, std::uint64_t ts = 0) { return {ts, AccessKind::Read, addr, 0}; }
TraceEvent wb(std::uint64_t addr, std::uint64_t ts = 0) { return {ts, AccessKind::Writeback, addr, 0}; }

// Address of block `tag` in `set` for the default geometry.
std::uint64_t addr(std::uint64_t tag, std::uint32_t set = 0) { return (tag << 16) | (std::uint64_t(set) << 6); }

}  // namespace

TEST_CASE("decompose") {
  CacheGeometry g;
  CHECK(decompose(0, g) == AddressParts{0, 0, 0});
  const auto p = decompose(0x1A40, g);
  CHECK(p.set_index == 0x69);
  CHECK(p.block_offset == 0);
  CHECK(p.tag == 0);
  CHECK(decompose(0x12345678ABCDull, g) ==
        AddressParts{0x12345678ABCDull >> 16, std::uint32_t((0x12345678ABCDull >> 6) & 1023), 0xCD & 63});
}

TEST_CASE("decompose and reassemble round trip") {
  std::mt19937_64 rng(7);
  for (const CacheGeometry g : {CacheGeometry{}, CacheGeometry{1, 4, 8}, CacheGeometry{65536, 16, 128}}) {
    for (int i = 0; i < 1000000 / 3; ++i) {
      const auto a = rng();
      const auto p = decompose(a, g);
      CHECK_LT(p.set_index, g.num_sets);
      CHECK_LT(p.block_offset, g.block_bytes);
      if (reassemble(p, g) != a) {
        CHECK(reassemble(p, g) == a);
        break;
      }
    }
  }
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS((CacheGeometry{1000, 8, 64}.validate()), ConfigError);
  CHECK_THROWS_AS((CacheGeometry{1024, 1, 64}.validate()), ConfigError);
  CHECK_THROWS_AS((CacheGeometry{1024, 8, 48}.validate()), ConfigError);
  CHECK_NOTHROW((CacheGeometry{1, 2, 8}.validate()));
  CHECK(CacheGeometry{}.blocks() == 8192);
}

TEST_CASE("write distance") {
  CHECK(write_distance(2, 7, 8) == 5);
  CHECK(write_distance(7, 2, 8) == 5);
  for (std::uint32_t k = 0; k < 8; ++k) CHECK(write_distance(k, k, 8) == 0);
  CHECK_THROWS_AS(write_distance(8, 0, 8), ConfigError);
}

TEST_CASE("policy names") {
  CHECK(parse_policy("lru") == PolicyKind::LRU);
  CHECK(parse_policy("fifo") == PolicyKind::FIFO);
  CHECK(parse_policy("ta-lrw") == PolicyKind::TALRW);
  CHECK(policy_name(parse_policy("talrw")) == "talrw");
  CHECK_THROWS_AS(parse_policy("mru"), ConfigError);
}

TEST_CASE("cold read misses and fills with no distance") {
  Cache cache(CacheGeometry{}, make_policy(PolicyKind::LRU, CacheGeometry{}));
  const auto out = cache.access(read(0));
  CHECK_FALSE(out.hit);
  CHECK(out.write_kind == WriteKind::Fill);
  CHECK(out.way_written == 0u);
  CHECK_FALSE(out.write_distance.has_value());
  CHECK(out.victim_age == 7u);
  CHECK_FALSE(out.evicted_valid);
}

TEST_CASE("read hit writes nothing") {
  Cache cache(CacheGeometry{}, make_policy(PolicyKind::LRU, CacheGeometry{}));
  cache.access(read(addr(1)));
  const auto out = cache.access(read(addr(1)));
  CHECK(out.hit);
  CHECK(out.hit_way == 0u);
  CHECK(out.write_kind == WriteKind::None);
  CHECK_FALSE(out.way_written.has_value());
  CHECK_FALSE(out.write_distance.has_value());
  CHECK(cache.hits() == 1);
  CHECK(cache.misses() == 1);
}

TEST_CASE("fills in ways 2 then 7 are five apart") {
  CacheGeometry g{1, 8, 64};
  auto order = WritePermutation::from_order({2, 7, 4, 1, 6, 3, 0, 5});
  Cache cache(g, make_policy(PolicyKind::TALRW, g, order));
  const auto first = cache.access(read(0));
  CHECK(first.way_written == 2u);
  CHECK_FALSE(first.write_distance.has_value());
  const auto second = cache.access(read(64));
  CHECK(second.way_written == 7u);
  CHECK(second.write_distance == 5u);
}

TEST_CASE("writeback miss allocates dirty and later evicts dirty") {
  CacheGeometry g{1, 2, 64};
  Cache cache(g, make_policy(PolicyKind::LRU, g));
  auto out = cache.access(wb(0));
  CHECK_FALSE(out.hit);
  CHECK(out.write_kind == WriteKind::Fill);
  CHECK(cache.set(0).ways[0].dirty);
  cache.access(read(64));
  out = cache.access(read(128));
  CHECK(out.evicted_valid);
  CHECK(out.evicted_dirty);
  CHECK(out.victim_age == 1u);
}

TEST_CASE("writeback hit under LRU overwrites in place") {
  CacheGeometry g{1, 8, 64};
  Cache cache(g, make_policy(PolicyKind::LRU, g));
  cache.access(read(0));
  cache.access(read(64));
  const auto out = cache.access(wb(0));
  CHECK(out.hit);
  CHECK(out.write_kind == WriteKind::InPlace);
  CHECK(out.way_written == 0u);
  CHECK(out.write_distance == 1u);
  CHECK(cache.set(0).ways[0].dirty);
  CHECK(cache.set(0).ways[0].age == 0);
}

TEST_CASE("ages stay a permutation of ranks") {
  CacheGeometry g{4, 8, 64};
  for (auto kind : {PolicyKind::LRU, PolicyKind::FIFO, PolicyKind::TALRW}) {
    Cache cache(g, make_policy(kind, g));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20000; ++i) {
      const auto a = (rng() % 64) * 64;
      cache.access(rng() % 3 ? read(a) : wb(a));
      for (std::uint32_t s = 0; s < g.num_sets; ++s) {
        std::vector<int> seen(g.ways, 0);
        std::uint32_t valid = 0;
        for (const auto& w : cache.set(s).ways) {
          ++seen[w.age];
          valid += w.valid;
        }
        for (auto n : seen) REQUIRE(n == 1);
        for (const auto& w : cache.set(s).ways) {
          if (w.valid) REQUIRE(w.age < valid);
        }
      }
    }
  }
}
