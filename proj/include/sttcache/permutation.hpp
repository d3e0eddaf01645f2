#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sttcache {

class HeatKernel;

/// A write order over the ways of one set.
///
/// `distance_multiset` holds the `ways` cyclic-adjacent distances
/// |order[(i+1) mod ways] - order[i]|, sorted ascending. The wrap-around
/// distance is included because the order is replayed round after round.
struct WritePermutation {
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> distance_multiset;
  double heat_score = 0.0;

  std::uint32_t ways() const noexcept { return static_cast<std::uint32_t>(order.size()); }
  std::uint32_t min_distance() const;

  // Builds the multiset from `order`; throws ConfigError if `order` is not a
  // bijection on [0, order.size()).
  static WritePermutation from_order(std::vector<std::uint32_t> order);

  friend bool operator==(const WritePermutation&, const WritePermutation&) = default;
};

// Cyclic-adjacent distances in sequence order (unsorted).
std::vector<std::uint32_t> cyclic_distances(std::span<const std::uint32_t> order);

// Every permutation of 0..ways-1 whose cyclic-adjacent distances are all
// >= min_dist, in lexicographic order. Requires ways >= 2 and
// 1 <= min_dist < ways.
std::vector<WritePermutation> enumerate_valid(std::uint32_t ways, std::uint32_t min_dist);

// Same filter without the wrap-around pair; reported for comparison only.
std::uint64_t count_valid_linear(std::uint32_t ways, std::uint32_t min_dist);

std::uint32_t max_feasible_min_distance(std::uint32_t ways);

// Sum of kernel.way_increment(d) over the cyclic-adjacent distances.
double heat_score(const WritePermutation& perm, const HeatKernel& kernel);

// Minimum heat score among permutations at the largest feasible minimum
// distance; ties go to the lexicographically smallest order.
WritePermutation select_default(std::uint32_t ways, const HeatKernel& kernel);

}  // namespace sttcache
