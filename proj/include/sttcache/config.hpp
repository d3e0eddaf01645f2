#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sttcache/cache_types.hpp"
#include "sttcache/metrics.hpp"
#include "sttcache/simulator.hpp"
#include "sttcache/trace.hpp"

namespace sttcache {

/// Everything one `simulate` invocation needs.
///
/// The file form is INI-style:
///
///     [cache]    sets, ways, block_bytes, policy (comma list), talrw_order
///     [thermal]  base_temp_k, write_heat_k, cool_tau_ns, kernel_cutoff_k,
///                kernel_table (CSV path), hazard_integration
///     [device]   delta_nominal, reference_temp_k, tau_attempt_ns, i_read_a,
///                i_write_a, i_c0_a, t_read_ns, t_write_ns, polarization,
///                moment, write_current_derating_a_per_k, write_fail_grouping,
///                mu_bohr, euler_c, e_charge, k_boltzmann
///     [timing]   base_cpi, mem_refs_per_instr, hit_cycles, miss_penalty_cycles
///     [trace]    file | events, read_fraction, working_set_blocks,
///                reuse_locality, window_size, seed, interarrival_ns,
///                address_stride, writeback_affinity,
///                stream_fraction
///     [run]      warmup_fraction, output_dir, samples_per_set,
///                distance_window, raw_temps, format (csv|json|both)
///
/// Unknown sections or keys are rejected. Relative paths resolve against
/// the config file's directory.
struct RunConfig {
  SimulationConfig sim;
  std::vector<PolicyKind> policies{PolicyKind::LRU, PolicyKind::FIFO, PolicyKind::TALRW};
  // Trace file path ("-" for stdin); synthetic generation when empty.
  std::optional<std::string> trace_file;
  SyntheticTraceSpec synthetic;
  std::filesystem::path output_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;

  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
// Overlays `text` (INI) onto `config`; `base_dir` anchors relative paths.
void apply_config_text(RunConfig& config, const std::string& text, const std::filesystem::path& base_dir = {});

// Reads only the [device] section (other sections are ignored).
DeviceParams load_device_params(const std::filesystem::path& path);

// "1,2,3" -> {1,2,3}; throws ConfigError naming `what`.
std::vector<std::uint32_t> parse_uint_list(const std::string& text, const char* what);

}  // namespace sttcache
