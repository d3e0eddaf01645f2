#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sttcache/error.hpp"
#include "sttcache/metrics.hpp"
#include "sttcache/simulator.hpp"

using namespace sttcache;

namespace {

RunReport counted(std::uint64_t hits, std::uint64_t misses, PolicyKind policy = PolicyKind::LRU) {
  RunReport r;
  r.policy = policy;
  r.events.reads = hits + misses;
  r.events.hits = hits;
  r.events.misses = misses;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sttcache_metrics_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<RunReport> small_run() {
  SyntheticTraceSpec spec;
  spec.event_count = 20000;
  spec.working_set_blocks = 4096;
  const auto events = generate_trace(spec);
  SimulationConfig cfg;
  cfg.geometry = {64, 8, 64};
  cfg.temp_samples_per_set = 10;
  const std::vector<PolicyKind> policies{PolicyKind::LRU, PolicyKind::FIFO, PolicyKind::TALRW};
  return simulate_all(events, policies, cfg);
}

}  // namespace

TEST_CASE("miss rate") {
  CHECK(miss_rate(counted(10, 0)) == 0.0);
  CHECK(miss_rate(counted(0, 10)) == 1.0);
  CHECK(miss_rate(counted(3, 1)) == 0.25);
  CHECK_THROWS_AS(miss_rate(RunReport{}), DomainError);
}

TEST_CASE("cpi") {
  TimingParams t;
  CHECK(cpi(counted(10, 0), t) == doctest::Approx(t.base_cpi + t.mem_refs_per_instr * t.hit_cycles));
  CHECK(cpi(counted(0, 10), t) == doctest::Approx(t.base_cpi + t.mem_refs_per_instr * t.miss_penalty_cycles));
  TimingParams bad;
  bad.hit_cycles = 0;
  CHECK_THROWS_AS(cpi(counted(1, 1), bad), ConfigError);
}

TEST_CASE("cpi normalization") {
  std::vector<RunReport> reports{counted(5, 5), counted(5, 5, PolicyKind::FIFO)};
  for (auto& r : reports) r.cpi = cpi(r, TimingParams{});
  normalize_cpi_to_lru(reports);
  CHECK(reports[0].cpi_norm_lru == 1.0);
  CHECK(reports[1].cpi_norm_lru == 1.0);
  std::vector<RunReport> no_lru{counted(1, 1, PolicyKind::FIFO)};
  CHECK_THROWS_AS(normalize_cpi_to_lru(no_lru), ConfigError);
}

TEST_CASE("distance distribution") {
  RunReport r;
  r.write_distance_hist = {0, 0, 0, 3, 2, 3, 0, 0};
  const auto d = distance_distribution(r);
  CHECK(d[3] == 0.375);
  CHECK(d[4] == 0.25);
  CHECK(d[5] == 0.375);
  r.write_distance_hist.assign(8, 0);
  CHECK(distance_distribution(r).empty());
}

TEST_CASE("JSON round trip is exact") {
  for (const auto& r : small_run()) {
    const auto back = report_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(back == r);
  }
  CHECK_THROWS_AS(report_from_json(nlohmann::json::object()), ConfigError);
}

TEST_CASE("emit is deterministic and complete") {
  const auto reports = small_run();
  const auto a = scratch("a"), b = scratch("b"), j = scratch("j");
  emit(reports, EmitFormat::Csv, a);
  emit(reports, EmitFormat::Csv, b);
  emit(reports, EmitFormat::Json, j);
  for (const char* name : {"distances.csv", "temps.csv", "errors.csv", "summary.csv", "victims.csv"}) {
    REQUIRE(std::filesystem::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK_FALSE(std::filesystem::exists(a / (std::string(name) + ".tmp")));
  }
  CHECK_FALSE(std::filesystem::exists(a / "temps_raw.csv"));

  const auto parsed = nlohmann::json::parse(slurp(j / "report.json"));
  REQUIRE(parsed.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(report_from_json(parsed[i]) == reports[i]);

  // Header plus sets * samples rows per policy.
  const auto temps = slurp(a / "temps.csv");
  CHECK(std::count(temps.begin(), temps.end(), '\n') == 1 + 3 * 64 * 10);
  CHECK(temps.rfind("policy,set,sample_idx,delta_t_k\n", 0) == 0);
  const auto errors = slurp(a / "errors.csv");
  CHECK(std::count(errors.begin(), errors.end(), '\n') == 1 + 3 * 4);
  const auto summary = slurp(a / "summary.csv");
  CHECK(summary.find("lru,") != std::string::npos);
  CHECK(summary.find(",1\n") != std::string::npos);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  std::filesystem::remove_all(j);
}

TEST_CASE("csv number formatting") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.333333333");
  CHECK(format_real(2.5e-20) == "2.5e-20");
}

TEST_CASE("atomic write reports I/O failures") {
  CHECK_THROWS_AS(write_file_atomic("/nonexistent-dir/x/y.csv", "data"), IoError);
}
