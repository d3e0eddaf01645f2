#include "sttcache/permutation.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "sttcache/error.hpp"
#include "sttcache/thermal.hpp"

namespace sttcache {

namespace {

std::uint32_t absdiff(std::uint32_t a, std::uint32_t b) { return a > b ? a - b : b - a; }

// Lexicographic walk over all orders; `keep` sees each one.
template <typename Fn>
void for_each_order(std::uint32_t ways, Fn&& keep) {
  std::vector<std::uint32_t> order(ways);
  std::iota(order.begin(), order.end(), 0U);
  do {
    keep(order);
  } while (std::next_permutation(order.begin(), order.end()));
}

void check_args(std::uint32_t ways, std::uint32_t min_dist) {
  if (ways < 2) throw ConfigError(fmt::format("ways must be >= 2 (got {})", ways));
  if (min_dist < 1 || min_dist >= ways) {
    throw ConfigError(fmt::format("min_dist must be in [1, {}) (got {})", ways, min_dist));
  }
  // 13! already overflows a practical enumeration budget.
  if (ways > 11) throw ConfigError(fmt::format("exhaustive search limited to 11 ways (got {})", ways));
}

}  // namespace

std::vector<std::uint32_t> cyclic_distances(std::span<const std::uint32_t> order) {
  std::vector<std::uint32_t> d(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    d[i] = absdiff(order[(i + 1) % order.size()], order[i]);
  }
  return d;
}

std::uint32_t WritePermutation::min_distance() const {
  return distance_multiset.empty() ? 0 : distance_multiset.front();
}

WritePermutation WritePermutation::from_order(std::vector<std::uint32_t> order) {
  std::vector<bool> seen(order.size(), false);
  for (auto w : order) {
    if (w >= order.size() || seen[w]) {
      throw ConfigError(fmt::format("write order is not a permutation of 0..{}", order.size() - 1));
    }
    seen[w] = true;
  }
  WritePermutation p;
  p.distance_multiset = cyclic_distances(order);
  std::sort(p.distance_multiset.begin(), p.distance_multiset.end());
  p.order = std::move(order);
  return p;
}

std::vector<WritePermutation> enumerate_valid(std::uint32_t ways, std::uint32_t min_dist) {
  check_args(ways, min_dist);
  std::vector<WritePermutation> out;
  for_each_order(ways, [&](const std::vector<std::uint32_t>& order) {
    for (std::uint32_t i = 0; i < ways; ++i) {
      if (absdiff(order[(i + 1) % ways], order[i]) < min_dist) return;
    }
    out.push_back(WritePermutation::from_order(order));
  });
  return out;
}

std::uint64_t count_valid_linear(std::uint32_t ways, std::uint32_t min_dist) {
  check_args(ways, min_dist);
  std::uint64_t n = 0;
  for_each_order(ways, [&](const std::vector<std::uint32_t>& order) {
    for (std::uint32_t i = 0; i + 1 < ways; ++i) {
      if (absdiff(order[i + 1], order[i]) < min_dist) return;
    }
    ++n;
  });
  return n;
}

std::uint32_t max_feasible_min_distance(std::uint32_t ways) {
  if (ways < 2) throw ConfigError(fmt::format("ways must be >= 2 (got {})", ways));
  // Distance 1 is always feasible (the identity order).
  std::uint32_t best = 1;
  for (std::uint32_t d = 2; d < ways; ++d) {
    if (enumerate_valid(ways, d).empty()) break;
    best = d;
  }
  return best;
}

double heat_score(const WritePermutation& perm, const HeatKernel& kernel) {
  double total = 0.0;
  for (auto d : cyclic_distances(perm.order)) total += kernel.way_increment(d);
  return total;
}

WritePermutation select_default(std::uint32_t ways, const HeatKernel& kernel) {
  auto candidates = enumerate_valid(ways, max_feasible_min_distance(ways));
  if (candidates.empty()) throw ConfigError("no admissible write permutation");
  for (auto& p : candidates) p.heat_score = heat_score(p, kernel);
  // Candidates are already lexicographic, so the first minimum wins ties.
  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const auto& a, const auto& b) { return a.heat_score < b.heat_score; });
  return *best;
}

}  // namespace sttcache
