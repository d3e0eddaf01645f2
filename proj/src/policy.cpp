#include "sttcache/policy.hpp"

#include <bit>

#include <fmt/format.h>

#include "sttcache/error.hpp"
#include "sttcache/thermal.hpp"

namespace sttcache {

std::uint32_t ceil_log2(std::uint32_t n) noexcept {
  return n <= 1 ? 0 : 32 - static_cast<std::uint32_t>(std::countl_zero(n - 1));
}

WritePlan ReplacementPolicy::plan_writeback_hit(std::uint32_t, const SetState&, std::uint32_t found_way) const {
  return {found_way, std::nullopt};
}

std::uint32_t LruPolicy::select_victim(std::uint32_t, const SetState& state) const {
  std::uint32_t victim = 0;
  std::uint32_t oldest = 0;
  for (std::uint32_t w = 0; w < state.ways.size(); ++w) {
    const auto& way = state.ways[w];
    if (!way.valid) return w;
    if (way.age >= oldest) {
      oldest = way.age;
      victim = w;
    }
  }
  return victim;
}

std::uint32_t LruPolicy::state_bits_per_set() const noexcept { return ways_ * ceil_log2(ways_); }

FifoPolicy::FifoPolicy(std::uint32_t num_sets, std::uint32_t ways) : ways_(ways), pointers_(num_sets, 0) {
  if (ways > 256) throw ConfigError("FIFO supports at most 256 ways");
}

std::uint32_t FifoPolicy::select_victim(std::uint32_t set, const SetState&) const { return pointers_[set]; }

void FifoPolicy::on_write(std::uint32_t set, std::uint32_t, bool fill) {
  if (fill) pointers_[set] = static_cast<std::uint8_t>((pointers_[set] + 1) % ways_);
}

std::uint32_t FifoPolicy::state_bits_per_set() const noexcept { return ceil_log2(ways_); }

TaLrwPolicy::TaLrwPolicy(std::uint32_t num_sets, WritePermutation order)
    : order_(std::move(order)), pointers_(num_sets) {
  const auto ways = order_.ways();
  if (ways < 2 || ways > 256) throw ConfigError(fmt::format("TA-LRW write order must cover 2..256 ways (got {})", ways));
  // Re-derive from the order so a hand-built WritePermutation is checked too.
  order_ = WritePermutation::from_order(order_.order);
  if (ways >= 7 && order_.min_distance() < 3) {
    throw ConfigError(fmt::format("TA-LRW write order needs adjacent distance >= 3 (got {})", order_.min_distance()));
  }
}

std::uint32_t TaLrwPolicy::select_victim(std::uint32_t set, const SetState&) const { return write_pointer(set); }

WritePlan TaLrwPolicy::plan_writeback_hit(std::uint32_t set, const SetState&, std::uint32_t found_way) const {
  const auto target = write_pointer(set);
  if (found_way == target) return {found_way, std::nullopt};
  return {target, found_way};
}

void TaLrwPolicy::on_write(std::uint32_t set, std::uint32_t way, bool) {
  auto& p = pointers_[set];
  if (way != order_.order[p.perm_index]) {
    throw Error(fmt::format("TA-LRW: write to way {} bypassed pointer way {} in set {}", way,
                            order_.order[p.perm_index], set));
  }
  p.perm_index = static_cast<std::uint8_t>((p.perm_index + 1) % order_.ways());
}

std::uint32_t TaLrwPolicy::state_bits_per_set() const noexcept { return ceil_log2(order_.ways()); }

std::unique_ptr<ReplacementPolicy> make_policy(PolicyKind kind, const CacheGeometry& geometry,
                                               const std::optional<WritePermutation>& talrw_order) {
  switch (kind) {
    case PolicyKind::LRU: return std::make_unique<LruPolicy>(geometry.ways);
    case PolicyKind::FIFO: return std::make_unique<FifoPolicy>(geometry.num_sets, geometry.ways);
    case PolicyKind::TALRW: {
      auto order = talrw_order ? *talrw_order : select_default(geometry.ways, HeatKernel::inverse_square());
      if (order.ways() != geometry.ways) {
        throw ConfigError(fmt::format("TA-LRW write order has {} ways, cache has {}", order.ways(), geometry.ways));
      }
      return std::make_unique<TaLrwPolicy>(geometry.num_sets, std::move(order));
    }
  }
  throw ConfigError("unknown policy");
}

}  // namespace sttcache
