#include "sttcache/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

#include "sttcache/cache.hpp"
#include "sttcache/error.hpp"

namespace sttcache {

HeatKernel SimulationConfig::kernel() const {
  if (kernel_table) return HeatKernel::from_table(*kernel_table);
  return HeatKernel::inverse_square(thermal.write_heat_k);
}

void SimulationConfig::validate() const {
  geometry.validate();
  device.validate();
  timing.validate();
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ConfigError("warmup_fraction must be in [0, 1)");
  if (distance_window == 0) throw ConfigError("distance_window must be positive");
}

namespace {

class SetSeries {
 public:
  explicit SetSeries(std::uint32_t num_sets) : raw_(num_sets) {}

  void push(std::uint32_t set, double v) { raw_[set].push_back(v); }

  const std::vector<std::vector<double>>& raw() const noexcept { return raw_; }

  // Exactly `samples` values per set, picked at evenly spaced write indices.
  std::vector<double> downsample(std::uint32_t samples) const {
    std::vector<double> out;
    out.reserve(raw_.size() * samples);
    for (const auto& series : raw_) {
      for (std::uint32_t k = 0; k < samples; ++k) {
        if (series.empty()) {
          out.push_back(0.0);
        } else {
          out.push_back(series[static_cast<std::size_t>(std::uint64_t(k) * series.size() / samples)]);
        }
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<double>> raw_;
};

}  // namespace

RunReport simulate(std::span<const TraceEvent> events, PolicyKind policy, const SimulationConfig& config) {
  config.validate();
  const auto& g = config.geometry;
  auto kernel = config.kernel();

  std::optional<WritePermutation> order = config.talrw_order;
  if (policy == PolicyKind::TALRW && !order) order = select_default(g.ways, kernel);
  Cache cache(g, make_policy(policy, g, order));
  ThermalField field(g.num_sets, g.ways, kernel, config.thermal);
  const double base = config.thermal.base_temp_k;
  ErrorRateAccumulator errors(config.device, base, g.block_bytes * 8, config.hazard, config.thermal.cool_tau_ns);

  RunReport report;
  report.policy = policy;
  report.geometry = g;
  report.write_distance_hist.assign(g.ways, 0);
  report.victim_age_hist.assign(g.ways, 0);
  report.distance_window = config.distance_window;
  report.temp_samples_per_set = config.temp_samples_per_set;

  const auto warm = static_cast<std::size_t>(std::floor(config.warmup_fraction * double(events.size())));
  const std::uint64_t window_start = warm < events.size() ? events[warm].timestamp_ns : 0;
  const std::uint64_t window_end = events.empty() ? 0 : events.back().timestamp_ns;

  const double tau = config.thermal.cool_tau_ns;
  const bool quadrature = config.hazard == HazardIntegration::Quadrature;
  field.set_interval_observer([&](std::uint32_t, std::uint32_t, double held, std::uint64_t from, std::uint64_t to) {
    const auto start = std::max(from, window_start);
    if (to <= start || warm >= events.size()) return;
    if (quadrature && start > from) held *= std::exp(-double(start - from) / tau);
    errors.add_retention_interval(held, double(to - start));
  });

  SetSeries series(g.num_sets);
  std::vector<std::uint64_t> window_counts(g.ways, 0);
  std::uint64_t window_total = 0;
  std::vector<bool> set_written(g.num_sets, false);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const bool measuring = i >= warm;
    const auto out = cache.access(ev);
    const auto now = ev.timestamp_ns;

    if (ev.kind == AccessKind::Read && out.hit) {
      const double t = base + field.decay(out.set_index, *out.hit_way, now);
      if (measuring) errors.add_read(t);
    }
    if (out.way_written) {
      const auto way = *out.way_written;
      const double t = base + field.decay(out.set_index, way, now);
      field.inject_write_heat(out.set_index, way, now);
      if (measuring) errors.add_write(t);
    }
    if (!measuring) {
      if (out.way_written) set_written[out.set_index] = true;
      continue;
    }

    auto& c = report.events;
    if (ev.kind == AccessKind::Read) {
      ++c.reads;
    } else {
      ++c.writebacks;
    }
    if (out.hit) {
      ++c.hits;
    } else {
      ++c.misses;
    }
    if (ev.kind == AccessKind::Read && !out.hit) ++c.fills;
    if (out.write_kind == WriteKind::Redirect) ++c.redirects;
    if (out.evicted_valid) ++c.evictions;
    if (out.evicted_dirty) ++c.dirty_evictions;
    if (out.victim_age) ++report.victim_age_hist[*out.victim_age];

    if (out.way_written) {
      ++c.physical_writes;
      if (!set_written[out.set_index]) ++c.first_writes;
      set_written[out.set_index] = true;

      double peak = 0.0;
      for (std::uint32_t w = 0; w < g.ways; ++w) peak = std::max(peak, field.elevation_at(out.set_index, w, now));
      series.push(out.set_index, peak);
      report.peak_delta_t_k = std::max(report.peak_delta_t_k, peak);
    }
    if (out.write_distance) {
      ++report.write_distance_hist[*out.write_distance];
      ++window_counts[*out.write_distance];
      if (++window_total == config.distance_window) {
        std::vector<double> shares(g.ways);
        for (std::uint32_t d = 0; d < g.ways; ++d) shares[d] = double(window_counts[d]) / double(window_total);
        report.sliding_distance_series.push_back(std::move(shares));
        std::fill(window_counts.begin(), window_counts.end(), 0);
        window_total = 0;
      }
    }
  }

  field.advance_all(window_end);
  report.temp_series = series.downsample(config.temp_samples_per_set);
  if (config.keep_raw_temps) report.raw_temp_series = series.raw();
  report.error_report = errors.finish(g.blocks(), double(window_end - window_start));
  if (report.events.reads + report.events.writebacks > 0) report.cpi = cpi(report, config.timing);
  return report;
}

std::vector<RunReport> simulate_all(std::span<const TraceEvent> events, std::span<const PolicyKind> policies,
                                    const SimulationConfig& config, bool parallel) {
  if (policies.empty()) throw ConfigError("at least one policy is required");
  std::vector<RunReport> reports;
  if (parallel && policies.size() > 1) {
    std::vector<std::future<RunReport>> jobs;
    for (auto p : policies) {
      jobs.push_back(std::async(std::launch::async, [&, p] { return simulate(events, p, config); }));
    }
    for (auto& j : jobs) reports.push_back(j.get());
  } else {
    for (auto p : policies) reports.push_back(simulate(events, p, config));
  }
  const bool has_lru = std::any_of(policies.begin(), policies.end(), [](auto p) { return p == PolicyKind::LRU; });
  const bool measured = std::all_of(reports.begin(), reports.end(), [](const RunReport& r) {
    return r.events.reads + r.events.writebacks > 0;
  });
  if (has_lru && measured) normalize_cpi_to_lru(reports);
  return reports;
}

}  // namespace sttcache
