#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sttcache/cache_types.hpp"
#include "sttcache/policy.hpp"
#include "sttcache/trace.hpp"

namespace sttcache {

enum class WriteKind : std::uint8_t {
  None,      // read hit
  Fill,      // allocation on a read or writeback miss
  InPlace,   // writeback hit overwritten where it was found
  Redirect,  // writeback hit moved to another way (TA-LRW)
};

struct AccessOutcome {
  bool hit = false;
  std::uint32_t set_index = 0;
  // Way holding the requested block on a hit (before any redirect).
  std::optional<std::uint32_t> hit_way;
  WriteKind write_kind = WriteKind::None;
  std::optional<std::uint32_t> way_written;
  // Recency rank of the replaced block; ways-1 when the way was invalid.
  std::optional<std::uint32_t> victim_age;
  std::optional<std::uint32_t> write_distance;
  std::optional<std::uint32_t> invalidated_way;
  bool evicted_valid = false;
  bool evicted_dirty = false;
};

/// One set-associative write-back cache. Read misses allocate a block
/// (a physical write); writeback misses allocate too.
class Cache {
 public:
  Cache(CacheGeometry geometry, std::unique_ptr<ReplacementPolicy> policy);

  AccessOutcome access(const TraceEvent& event);

  const CacheGeometry& geometry() const noexcept { return geometry_; }
  const ReplacementPolicy& policy() const noexcept { return *policy_; }
  const SetState& set(std::uint32_t index) const { return sets_.at(index); }

  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  std::optional<std::uint32_t> find(const SetState& set, std::uint64_t tag) const;
  void promote(SetState& set, std::uint32_t way);
  void demote(SetState& set, std::uint32_t way);
  // Replaces whatever occupies `way` and records victim info in `out`.
  void install(SetState& set, std::uint32_t way, std::uint64_t tag, bool dirty, std::uint64_t now,
               AccessOutcome& out);
  void record_write(SetState& set, std::uint32_t way, AccessOutcome& out);

  CacheGeometry geometry_;
  std::unique_ptr<ReplacementPolicy> policy_;
  std::vector<SetState> sets_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace sttcache
