#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sttcache/cache_types.hpp"
#include "sttcache/metrics.hpp"
#include "sttcache/permutation.hpp"
#include "sttcache/reliability.hpp"
#include "sttcache/thermal.hpp"
#include "sttcache/trace.hpp"

namespace sttcache {

struct SimulationConfig {
  CacheGeometry geometry;
  ThermalParams thermal;
  // Way-distance increments overriding the analytic kernel (entry 0 = self).
  std::optional<std::vector<double>> kernel_table;
  DeviceParams device;
  TimingParams timing;
  HazardIntegration hazard = HazardIntegration::SampleAndHold;
  // Leading fraction of events that only warms state up.
  double warmup_fraction = 0.5;
  std::uint32_t temp_samples_per_set = 200;
  std::uint32_t distance_window = 1000;
  bool keep_raw_temps = false;
  std::optional<WritePermutation> talrw_order;

  HeatKernel kernel() const;
  void validate() const;
};

// Replays `events` through one cache + thermal field. Events before the
// warmup boundary mutate state but are excluded from every statistic.
RunReport simulate(std::span<const TraceEvent> events, PolicyKind policy, const SimulationConfig& config);

// One report per policy, all on the same events; runs policies on separate
// threads when `parallel`. Normalizes CPI to LRU when LRU is present.
std::vector<RunReport> simulate_all(std::span<const TraceEvent> events, std::span<const PolicyKind> policies,
                                    const SimulationConfig& config, bool parallel = true);

}  // namespace sttcache
