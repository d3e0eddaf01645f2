#include "sttcache/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

void TimingParams::validate() const {
  if (!(base_cpi > 0.0 && mem_refs_per_instr > 0.0 && hit_cycles > 0.0 && miss_penalty_cycles > 0.0)) {
    throw ConfigError("timing parameters must be positive");
  }
}

double miss_rate(const RunReport& report) {
  const auto accesses = report.events.reads + report.events.writebacks;
  if (accesses == 0) throw DomainError("miss rate of an empty run");
  return double(report.events.misses) / double(accesses);
}

double cpi(const RunReport& report, const TimingParams& timing) {
  timing.validate();
  const double mr = miss_rate(report);
  return timing.base_cpi +
         timing.mem_refs_per_instr * ((1.0 - mr) * timing.hit_cycles + mr * timing.miss_penalty_cycles);
}

void normalize_cpi_to_lru(std::span<RunReport> reports) {
  const RunReport* lru = nullptr;
  for (const auto& r : reports) {
    if (r.policy == PolicyKind::LRU) lru = &r;
  }
  if (lru == nullptr) throw ConfigError("CPI normalization needs an LRU run");
  const double baseline = lru->cpi;
  for (auto& r : reports) r.cpi_norm_lru = r.cpi / baseline;
}

std::vector<double> distance_distribution(const RunReport& report) {
  const auto total = std::accumulate(report.write_distance_hist.begin(), report.write_distance_hist.end(),
                                     std::uint64_t{0});
  std::vector<double> shares;
  if (total == 0) return shares;
  shares.reserve(report.write_distance_hist.size());
  for (auto c : report.write_distance_hist) shares.push_back(double(c) / double(total));
  return shares;
}

std::string format_real(double v) { return fmt::format("{:.9g}", v); }

namespace {

using Buffer = fmt::memory_buffer;

template <typename... Args>
void line(Buffer& buf, fmt::format_string<Args...> f, Args&&... args) {
  fmt::format_to(std::back_inserter(buf), f, std::forward<Args>(args)...);
  buf.push_back('\n');
}

std::string shares_or_zero(std::uint64_t count, std::uint64_t total) {
  return format_real(total == 0 ? 0.0 : double(count) / double(total));
}

}  // namespace

std::string distances_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,distance,count,share");
  for (const auto& r : reports) {
    const auto total = std::accumulate(r.write_distance_hist.begin(), r.write_distance_hist.end(), std::uint64_t{0});
    for (std::size_t d = 0; d < r.write_distance_hist.size(); ++d) {
      line(buf, "{},{},{},{}", policy_name(r.policy), d, r.write_distance_hist[d],
           shares_or_zero(r.write_distance_hist[d], total));
    }
  }
  return fmt::to_string(buf);
}

std::string temps_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,set,sample_idx,delta_t_k");
  for (const auto& r : reports) {
    const auto n = r.temp_samples_per_set;
    for (std::uint32_t s = 0; s < r.geometry.num_sets && n > 0; ++s) {
      for (std::uint32_t k = 0; k < n; ++k) {
        line(buf, "{},{},{},{}", policy_name(r.policy), s, k,
             format_real(r.temp_series[static_cast<std::size_t>(s) * n + k]));
      }
    }
  }
  return fmt::to_string(buf);
}

std::string errors_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,type,intrinsic,total,induced,induced_over_intrinsic");
  for (const auto& r : reports) {
    const auto& e = r.error_report;
    const auto total = e.total();
    auto row = [&](const char* type, double intrinsic, double tot, double induced) {
      line(buf, "{},{},{},{},{},{}", policy_name(r.policy), type, format_real(intrinsic), format_real(tot),
           format_real(induced), format_real(intrinsic > 0.0 ? induced / intrinsic : 0.0));
    };
    row("retention", e.intrinsic.retention, total.retention, e.induced.retention);
    row("read_disturb", e.intrinsic.read_disturb, total.read_disturb, e.induced.read_disturb);
    row("write_fail", e.intrinsic.write_fail, total.write_fail, e.induced.write_fail);
    row("all", e.intrinsic_rate(), e.total_rate(), e.temperature_induced_rate());
  }
  return fmt::to_string(buf);
}

std::string summary_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,miss_rate,cpi,cpi_norm_lru");
  for (const auto& r : reports) {
    line(buf, "{},{},{},{}", policy_name(r.policy), format_real(miss_rate(r)), format_real(r.cpi),
         r.cpi_norm_lru ? format_real(*r.cpi_norm_lru) : std::string{});
  }
  return fmt::to_string(buf);
}

std::string victims_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,age_rank,count,share");
  for (const auto& r : reports) {
    const auto total = std::accumulate(r.victim_age_hist.begin(), r.victim_age_hist.end(), std::uint64_t{0});
    for (std::size_t a = 0; a < r.victim_age_hist.size(); ++a) {
      line(buf, "{},{},{},{}", policy_name(r.policy), a, r.victim_age_hist[a],
           shares_or_zero(r.victim_age_hist[a], total));
    }
  }
  return fmt::to_string(buf);
}

std::string raw_temps_csv(std::span<const RunReport> reports) {
  Buffer buf;
  line(buf, "policy,set,write_idx,delta_t_k");
  for (const auto& r : reports) {
    for (std::size_t s = 0; s < r.raw_temp_series.size(); ++s) {
      for (std::size_t k = 0; k < r.raw_temp_series[s].size(); ++k) {
        line(buf, "{},{},{},{}", policy_name(r.policy), s, k, format_real(r.raw_temp_series[s][k]));
      }
    }
  }
  return fmt::to_string(buf);
}

namespace {

nlohmann::json components_json(const ErrorComponents& c) {
  return {{"retention", c.retention}, {"read_disturb", c.read_disturb}, {"write_fail", c.write_fail}};
}

ErrorComponents components_from(const nlohmann::json& j) {
  return {j.at("retention").get<double>(), j.at("read_disturb").get<double>(), j.at("write_fail").get<double>()};
}

}  // namespace

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["policy"] = std::string(policy_name(r.policy));
  j["geometry"] = {{"sets", r.geometry.num_sets}, {"ways", r.geometry.ways}, {"block_bytes", r.geometry.block_bytes}};
  const auto& e = r.events;
  j["events"] = {{"reads", e.reads},
                 {"writebacks", e.writebacks},
                 {"fills", e.fills},
                 {"hits", e.hits},
                 {"misses", e.misses},
                 {"physical_writes", e.physical_writes},
                 {"first_writes", e.first_writes},
                 {"redirects", e.redirects},
                 {"evictions", e.evictions},
                 {"dirty_evictions", e.dirty_evictions}};
  j["write_distance_hist"] = r.write_distance_hist;
  j["distance_window"] = r.distance_window;
  j["sliding_distance_series"] = r.sliding_distance_series;
  j["victim_age_hist"] = r.victim_age_hist;
  j["temp_samples_per_set"] = r.temp_samples_per_set;
  j["temp_series"] = r.temp_series;
  j["peak_delta_t_k"] = r.peak_delta_t_k;
  if (!r.raw_temp_series.empty()) j["raw_temp_series"] = r.raw_temp_series;
  const auto& er = r.error_report;
  j["errors"] = {{"intrinsic", components_json(er.intrinsic)},
                 {"induced", components_json(er.induced)},
                 {"total", components_json(er.total())},
                 {"intrinsic_rate", er.intrinsic_rate()},
                 {"temperature_induced_rate", er.temperature_induced_rate()},
                 {"total_rate", er.total_rate()},
                 {"induced_over_intrinsic", er.induced_over_intrinsic()}};
  j["miss_rate"] = (e.reads + e.writebacks) > 0 ? miss_rate(r) : 0.0;
  j["cpi"] = r.cpi;
  j["cpi_norm_lru"] = r.cpi_norm_lru ? nlohmann::json(*r.cpi_norm_lru) : nlohmann::json(nullptr);
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.policy = parse_policy(j.at("policy").get<std::string>());
    const auto& g = j.at("geometry");
    r.geometry = {g.at("sets").get<std::uint32_t>(), g.at("ways").get<std::uint32_t>(),
                  g.at("block_bytes").get<std::uint32_t>()};
    const auto& e = j.at("events");
    r.events.reads = e.at("reads");
    r.events.writebacks = e.at("writebacks");
    r.events.fills = e.at("fills");
    r.events.hits = e.at("hits");
    r.events.misses = e.at("misses");
    r.events.physical_writes = e.at("physical_writes");
    r.events.first_writes = e.at("first_writes");
    r.events.redirects = e.at("redirects");
    r.events.evictions = e.at("evictions");
    r.events.dirty_evictions = e.at("dirty_evictions");
    r.write_distance_hist = j.at("write_distance_hist").get<std::vector<std::uint64_t>>();
    r.distance_window = j.at("distance_window");
    r.sliding_distance_series = j.at("sliding_distance_series").get<std::vector<std::vector<double>>>();
    r.victim_age_hist = j.at("victim_age_hist").get<std::vector<std::uint64_t>>();
    r.temp_samples_per_set = j.at("temp_samples_per_set");
    r.temp_series = j.at("temp_series").get<std::vector<double>>();
    r.peak_delta_t_k = j.at("peak_delta_t_k");
    if (j.contains("raw_temp_series")) {
      r.raw_temp_series = j.at("raw_temp_series").get<std::vector<std::vector<double>>>();
    }
    r.error_report.intrinsic = components_from(j.at("errors").at("intrinsic"));
    r.error_report.induced = components_from(j.at("errors").at("induced"));
    r.cpi = j.at("cpi");
    if (!j.at("cpi_norm_lru").is_null()) r.cpi_norm_lru = j.at("cpi_norm_lru").get<double>();
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(fmt::format("malformed run report: {}", ex.what()));
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
    out << contents;
    out.flush();
    if (!out) throw IoError(fmt::format("failed writing {}", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot rename {} into place: {}", path.string(), ec.message()));
}

void emit(std::span<const RunReport> reports, EmitFormat format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));

  if (format == EmitFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    write_file_atomic(dir / "report.json", arr.dump(2) + "\n");
    return;
  }
  write_file_atomic(dir / "distances.csv", distances_csv(reports));
  write_file_atomic(dir / "temps.csv", temps_csv(reports));
  write_file_atomic(dir / "errors.csv", errors_csv(reports));
  write_file_atomic(dir / "summary.csv", summary_csv(reports));
  write_file_atomic(dir / "victims.csv", victims_csv(reports));
  const bool raw = std::any_of(reports.begin(), reports.end(), [](const RunReport& r) { return !r.raw_temp_series.empty(); });
  if (raw) write_file_atomic(dir / "temps_raw.csv", raw_temps_csv(reports));
}

}  // namespace sttcache
