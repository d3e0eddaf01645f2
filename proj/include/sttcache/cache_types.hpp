#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sttcache {

struct CacheGeometry {
  std::uint32_t num_sets = 1024;
  std::uint32_t ways = 8;
  std::uint32_t block_bytes = 64;

  // Power-of-two sets and block size, ways >= 2, block >= 8 bytes.
  void validate() const;
  std::uint32_t offset_bits() const noexcept;
  std::uint32_t index_bits() const noexcept;
  std::uint64_t blocks() const noexcept { return std::uint64_t(num_sets) * ways; }

  friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

struct AddressParts {
  std::uint64_t tag = 0;
  std::uint32_t set_index = 0;
  std::uint32_t block_offset = 0;

  friend bool operator==(const AddressParts&, const AddressParts&) = default;
};

AddressParts decompose(std::uint64_t address, const CacheGeometry& geometry) noexcept;
std::uint64_t reassemble(const AddressParts& parts, const CacheGeometry& geometry) noexcept;

// |cur - prev|; throws ConfigError if either index is outside [0, ways).
std::uint32_t write_distance(std::uint32_t prev_way, std::uint32_t cur_way, std::uint32_t ways);

struct WayState {
  bool valid = false;
  bool dirty = false;
  std::uint64_t tag = 0;
  // Read/write recency rank, 0 = most recent. Kept for every policy; valid
  // ways always hold ranks [0, valid_count).
  std::uint32_t age = 0;
  std::uint64_t last_write_time = 0;
};

struct SetState {
  std::vector<WayState> ways;
  std::optional<std::uint32_t> last_written_way;
};

enum class PolicyKind { LRU, FIFO, TALRW };

std::string_view policy_name(PolicyKind kind) noexcept;  // "lru", "fifo", "talrw"
PolicyKind parse_policy(std::string_view name);           // throws ConfigError

}  // namespace sttcache
