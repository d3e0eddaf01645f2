#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sttcache/cache_types.hpp"
#include "sttcache/permutation.hpp"

namespace sttcache {

// Where an incoming writeback that hit `found_way` lands.
struct WritePlan {
  std::uint32_t write_way = 0;
  std::optional<std::uint32_t> invalidated_way;

  friend bool operator==(const WritePlan&, const WritePlan&) = default;
};

class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;

  virtual PolicyKind kind() const noexcept = 0;

  // Way to allocate on a miss.
  virtual std::uint32_t select_victim(std::uint32_t set, const SetState& state) const = 0;

  // Default: overwrite the found block in place.
  virtual WritePlan plan_writeback_hit(std::uint32_t set, const SetState& state, std::uint32_t found_way) const;

  virtual void on_read_hit(std::uint32_t /*set*/, std::uint32_t /*way*/) {}
  // After every physical write. `fill` is false for in-place overwrites.
  virtual void on_write(std::uint32_t /*set*/, std::uint32_t /*way*/, bool /*fill*/) {}

  // Replacement metadata the policy needs per set, in bits.
  virtual std::uint32_t state_bits_per_set() const noexcept = 0;
};

// Evicts the oldest block by read/write recency (the set's age ranks);
// invalid ways first, lowest index.
class LruPolicy final : public ReplacementPolicy {
 public:
  explicit LruPolicy(std::uint32_t ways) : ways_(ways) {}
  PolicyKind kind() const noexcept override { return PolicyKind::LRU; }
  std::uint32_t select_victim(std::uint32_t set, const SetState& state) const override;
  std::uint32_t state_bits_per_set() const noexcept override;

 private:
  std::uint32_t ways_;
};

// Round-robin fill pointer per set; hits leave it untouched.
class FifoPolicy final : public ReplacementPolicy {
 public:
  FifoPolicy(std::uint32_t num_sets, std::uint32_t ways);
  PolicyKind kind() const noexcept override { return PolicyKind::FIFO; }
  std::uint32_t select_victim(std::uint32_t set, const SetState& state) const override;
  void on_write(std::uint32_t set, std::uint32_t way, bool fill) override;
  std::uint32_t state_bits_per_set() const noexcept override;

  std::uint32_t fill_pointer(std::uint32_t set) const { return pointers_[set]; }

 private:
  std::uint32_t ways_;
  std::vector<std::uint8_t> pointers_;
};

/// Thermal-aware least-recently-written replacement.
///
/// Every physical write in a set goes to the way named by the set's write
/// pointer, which then steps to the next entry of a fixed write order. All
/// writes therefore follow the order cyclically: consecutive writes are as
/// far apart as the order's adjacent distances, and any `ways` consecutive
/// writes cover every way once. A writeback that hits a block elsewhere in
/// the set invalidates that block and is written at the pointer instead.
class TaLrwPolicy final : public ReplacementPolicy {
 public:
  // The only per-set state: an index into the write order.
  struct SetPointer {
    std::uint8_t perm_index = 0;
  };

  TaLrwPolicy(std::uint32_t num_sets, WritePermutation order);

  PolicyKind kind() const noexcept override { return PolicyKind::TALRW; }
  std::uint32_t select_victim(std::uint32_t set, const SetState& state) const override;
  WritePlan plan_writeback_hit(std::uint32_t set, const SetState& state, std::uint32_t found_way) const override;
  void on_write(std::uint32_t set, std::uint32_t way, bool fill) override;
  std::uint32_t state_bits_per_set() const noexcept override;

  std::uint32_t write_pointer(std::uint32_t set) const { return order_.order[pointers_[set].perm_index]; }
  std::uint32_t perm_index(std::uint32_t set) const { return pointers_[set].perm_index; }
  const WritePermutation& order() const noexcept { return order_; }

 private:
  WritePermutation order_;
  std::vector<SetPointer> pointers_;
};

// ceil(log2(n)) for n >= 1.
std::uint32_t ceil_log2(std::uint32_t n) noexcept;

// `talrw_order` overrides the minimum-heat default for TA-LRW.
std::unique_ptr<ReplacementPolicy> make_policy(PolicyKind kind, const CacheGeometry& geometry,
                                               const std::optional<WritePermutation>& talrw_order = std::nullopt);

}  // namespace sttcache
