#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sttcache/cache_types.hpp"
#include "sttcache/reliability.hpp"

namespace sttcache {

struct EventCounts {
  std::uint64_t reads = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t fills = 0;  // read-miss allocations
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t physical_writes = 0;
  // Writes with no earlier write in their set, hence no distance.
  std::uint64_t first_writes = 0;
  std::uint64_t redirects = 0;
  std::uint64_t evictions = 0;
  std::uint64_t dirty_evictions = 0;

  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

struct TimingParams {
  double base_cpi = 1.0;
  double mem_refs_per_instr = 0.05;
  double hit_cycles = 20.0;
  double miss_penalty_cycles = 200.0;

  void validate() const;
};

/// Statistics of one policy over the measured part of one trace.
struct RunReport {
  PolicyKind policy = PolicyKind::LRU;
  CacheGeometry geometry;
  EventCounts events;
  std::vector<std::uint64_t> write_distance_hist;  // [ways]
  std::uint32_t distance_window = 1000;
  // Distance shares per full window of `distance_window` writes.
  std::vector<std::vector<double>> sliding_distance_series;
  std::vector<std::uint64_t> victim_age_hist;  // [ways], rank ways-1 = oldest
  std::uint32_t temp_samples_per_set = 0;
  // Peak set elevation (K) after writes, row-major [set][sample].
  std::vector<double> temp_series;
  // Full-resolution per-set series; only filled on request.
  std::vector<std::vector<double>> raw_temp_series;
  double peak_delta_t_k = 0.0;
  ErrorRateReport error_report;
  double cpi = 0.0;
  std::optional<double> cpi_norm_lru;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Throws DomainError on a run with no measured accesses.
double miss_rate(const RunReport& report);

double cpi(const RunReport& report, const TimingParams& timing);

// Fills cpi_norm_lru from the LRU report among `reports`; throws ConfigError
// when there is none.
void normalize_cpi_to_lru(std::span<RunReport> reports);

// Normalized write_distance_hist; empty when no distance was recorded.
std::vector<double> distance_distribution(const RunReport& report);

// Fixed CSV schemas, one row group per report.
std::string distances_csv(std::span<const RunReport> reports);
std::string temps_csv(std::span<const RunReport> reports);
std::string errors_csv(std::span<const RunReport> reports);
std::string summary_csv(std::span<const RunReport> reports);
std::string victims_csv(std::span<const RunReport> reports);
// policy,set,write_idx,delta_t_k over raw_temp_series.
std::string raw_temps_csv(std::span<const RunReport> reports);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

enum class EmitFormat { Csv, Json };

// Writes distances/temps/errors/summary/victims CSVs (plus temps_raw.csv
// when raw series are present), or report.json.
// Each file is written to a temporary name first and renamed into place.
void emit(std::span<const RunReport> reports, EmitFormat format, const std::filesystem::path& dir);

// Shared helpers.
std::string format_real(double v);  // 9 significant digits
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace sttcache
