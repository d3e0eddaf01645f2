#include "sttcache/cache.hpp"

#include <bit>

#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

void CacheGeometry::validate() const {
  if (num_sets < 1 || !std::has_single_bit(num_sets)) {
    throw ConfigError(fmt::format("sets must be a power of two (got {})", num_sets));
  }
  if (ways < 2 || ways > 256) throw ConfigError(fmt::format("ways must be in [2, 256] (got {})", ways));
  if (block_bytes < 8 || !std::has_single_bit(block_bytes)) {
    throw ConfigError(fmt::format("block_bytes must be a power of two >= 8 (got {})", block_bytes));
  }
}

std::uint32_t CacheGeometry::offset_bits() const noexcept { return std::countr_zero(block_bytes); }
std::uint32_t CacheGeometry::index_bits() const noexcept { return std::countr_zero(num_sets); }

AddressParts decompose(std::uint64_t address, const CacheGeometry& g) noexcept {
  const auto ob = g.offset_bits();
  const auto ib = g.index_bits();
  AddressParts p;
  p.block_offset = static_cast<std::uint32_t>(address & (std::uint64_t(g.block_bytes) - 1));
  p.set_index = static_cast<std::uint32_t>((address >> ob) & (std::uint64_t(g.num_sets) - 1));
  p.tag = (ob + ib) >= 64 ? 0 : address >> (ob + ib);
  return p;
}

std::uint64_t reassemble(const AddressParts& p, const CacheGeometry& g) noexcept {
  const auto ob = g.offset_bits();
  const auto ib = g.index_bits();
  const std::uint64_t high = (ob + ib) >= 64 ? 0 : p.tag << (ob + ib);
  return high | (std::uint64_t(p.set_index) << ob) | p.block_offset;
}

std::uint32_t write_distance(std::uint32_t prev_way, std::uint32_t cur_way, std::uint32_t ways) {
  if (prev_way >= ways || cur_way >= ways) {
    throw ConfigError(fmt::format("way index out of range: ({}, {}) for {} ways", prev_way, cur_way, ways));
  }
  return prev_way > cur_way ? prev_way - cur_way : cur_way - prev_way;
}

std::string_view policy_name(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::LRU: return "lru";
    case PolicyKind::FIFO: return "fifo";
    case PolicyKind::TALRW: return "talrw";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "lru") return PolicyKind::LRU;
  if (name == "fifo") return PolicyKind::FIFO;
  if (name == "talrw" || name == "ta-lrw") return PolicyKind::TALRW;
  throw ConfigError(fmt::format("unknown policy '{}' (expected lru, fifo or talrw)", name));
}

Cache::Cache(CacheGeometry geometry, std::unique_ptr<ReplacementPolicy> policy)
    : geometry_(geometry), policy_(std::move(policy)) {
  geometry_.validate();
  if (!policy_) throw ConfigError("cache needs a replacement policy");
  sets_.resize(geometry_.num_sets);
  for (auto& s : sets_) {
    s.ways.resize(geometry_.ways);
    for (std::uint32_t w = 0; w < geometry_.ways; ++w) s.ways[w].age = w;
  }
}

std::optional<std::uint32_t> Cache::find(const SetState& set, std::uint64_t tag) const {
  for (std::uint32_t w = 0; w < set.ways.size(); ++w) {
    if (set.ways[w].valid && set.ways[w].tag == tag) return w;
  }
  return std::nullopt;
}

void Cache::promote(SetState& set, std::uint32_t way) {
  const auto old = set.ways[way].age;
  for (auto& w : set.ways) {
    if (w.age < old) ++w.age;
  }
  set.ways[way].age = 0;
}

void Cache::demote(SetState& set, std::uint32_t way) {
  const auto old = set.ways[way].age;
  for (auto& w : set.ways) {
    if (w.age > old) --w.age;
  }
  set.ways[way].age = geometry_.ways - 1;
}

void Cache::install(SetState& set, std::uint32_t way, std::uint64_t tag, bool dirty, std::uint64_t now,
                    AccessOutcome& out) {
  auto& slot = set.ways[way];
  out.evicted_valid = slot.valid;
  out.evicted_dirty = slot.valid && slot.dirty;
  out.victim_age = slot.valid ? slot.age : geometry_.ways - 1;
  slot.valid = true;
  slot.dirty = dirty;
  slot.tag = tag;
  slot.last_write_time = now;
  promote(set, way);
}

void Cache::record_write(SetState& set, std::uint32_t way, AccessOutcome& out) {
  out.way_written = way;
  if (set.last_written_way) out.write_distance = write_distance(*set.last_written_way, way, geometry_.ways);
  set.last_written_way = way;
}

AccessOutcome Cache::access(const TraceEvent& event) {
  const auto parts = decompose(event.address, geometry_);
  auto& set = sets_[parts.set_index];
  AccessOutcome out;
  out.set_index = parts.set_index;

  const auto found = find(set, parts.tag);
  out.hit = found.has_value();
  out.hit_way = found;
  if (out.hit) {
    ++hits_;
  } else {
    ++misses_;
  }

  if (event.kind == AccessKind::Read) {
    if (found) {
      promote(set, *found);
      policy_->on_read_hit(parts.set_index, *found);
      return out;
    }
    const auto victim = policy_->select_victim(parts.set_index, set);
    install(set, victim, parts.tag, false, event.timestamp_ns, out);
    out.write_kind = WriteKind::Fill;
    record_write(set, victim, out);
    policy_->on_write(parts.set_index, victim, true);
    return out;
  }

  if (!found) {
    const auto victim = policy_->select_victim(parts.set_index, set);
    install(set, victim, parts.tag, true, event.timestamp_ns, out);
    out.write_kind = WriteKind::Fill;
    record_write(set, victim, out);
    policy_->on_write(parts.set_index, victim, true);
    return out;
  }

  const auto plan = policy_->plan_writeback_hit(parts.set_index, set, *found);
  if (plan.write_way == *found) {
    auto& slot = set.ways[*found];
    slot.dirty = true;
    slot.last_write_time = event.timestamp_ns;
    promote(set, *found);
    out.write_kind = WriteKind::InPlace;
    record_write(set, *found, out);
    policy_->on_write(parts.set_index, *found, false);
    return out;
  }

  // Redirect: the stale copy is dropped (the incoming data supersedes it)
  // and the pointer way's occupant is evicted.
  const auto target = plan.write_way;
  const auto victim_rank = set.ways[target].valid ? set.ways[target].age : geometry_.ways - 1;
  set.ways[*found].valid = false;
  set.ways[*found].dirty = false;
  demote(set, *found);
  install(set, target, parts.tag, true, event.timestamp_ns, out);
  out.victim_age = victim_rank;
  out.invalidated_way = *found;
  out.write_kind = WriteKind::Redirect;
  record_write(set, target, out);
  policy_->on_write(parts.set_index, target, true);
  return out;
}

}  // namespace sttcache
