#include "sttcache/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string v) {
  const auto first = v.find_first_not_of(" \t");
  const auto last = v.find_last_not_of(" \t");
  v = first == std::string::npos ? std::string{} : v.substr(first, last - first + 1);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
  return v;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("config key {}: expected a number, got '{}'", key, v));
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const auto n = std::stoull(v, &used, 0);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("config key {}: expected a non-negative integer, got '{}'", key, v));
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("config key {}: expected a boolean, got '{}'", key, v));
}

std::uint32_t to_u32(const std::string& key, const std::string& v) {
  const auto n = to_uint(key, v);
  if (n > UINT32_MAX) throw ConfigError(fmt::format("config key {}: value too large", key));
  return static_cast<std::uint32_t>(n);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_relative() && !base.empty() ? base / p : p;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value,
                                  const std::filesystem::path& base)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
    auto& cache = t["cache"];
    cache["sets"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.geometry.num_sets = to_u32(k, v); };
    cache["ways"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.geometry.ways = to_u32(k, v); };
    cache["block_bytes"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.geometry.block_bytes = to_u32(k, v); };
    cache["policy"] = [](RunConfig& c, auto&, auto& v, auto&) {
      c.policies.clear();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) c.policies.push_back(parse_policy(unquote(item)));
    };
    cache["talrw_order"] = [](RunConfig& c, auto&, auto& v, auto&) {
      c.sim.talrw_order = WritePermutation::from_order(parse_uint_list(v, "talrw_order"));
    };

    auto& thermal = t["thermal"];
    thermal["base_temp_k"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.thermal.base_temp_k = to_real(k, v); };
    thermal["write_heat_k"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.thermal.write_heat_k = to_real(k, v); };
    thermal["cool_tau_ns"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.thermal.cool_tau_ns = to_real(k, v); };
    thermal["kernel_cutoff_k"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.sim.thermal.kernel_cutoff_k = to_real(k, v);
    };
    thermal["kernel_table"] = [](RunConfig& c, auto&, auto& v, auto& base) {
      const auto path = resolve(base, v);
      std::ifstream in(path);
      if (!in) throw ConfigError(fmt::format("cannot open kernel table {}", path.string()));
      std::vector<double> table;
      // Reuse the kernel CSV reader, then keep its tabulated values.
      const auto kernel = HeatKernel::load_csv(in);
      for (std::uint32_t d = 0; d < 256; ++d) table.push_back(kernel.way_increment(d));
      while (table.size() > 1 && table.back() == 0.0) table.pop_back();
      c.sim.kernel_table = std::move(table);
    };
    thermal["hazard_integration"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      if (v == "sample_hold") {
        c.sim.hazard = HazardIntegration::SampleAndHold;
      } else if (v == "quadrature") {
        c.sim.hazard = HazardIntegration::Quadrature;
      } else {
        throw ConfigError(fmt::format("config key {}: expected sample_hold or quadrature", k));
      }
    };

    auto& device = t["device"];
    auto real_field = [](double DeviceParams::*field) {
      return Setter([field](RunConfig& c, auto& k, auto& v, auto&) { c.sim.device.*field = to_real(k, v); });
    };
    device["delta_nominal"] = real_field(&DeviceParams::delta_nominal);
    device["reference_temp_k"] = real_field(&DeviceParams::reference_temp_k);
    device["tau_attempt_ns"] = real_field(&DeviceParams::tau_attempt_ns);
    device["i_read_a"] = real_field(&DeviceParams::i_read_a);
    device["i_write_a"] = real_field(&DeviceParams::i_write_nominal_a);
    device["i_c0_a"] = real_field(&DeviceParams::i_c0_a);
    device["t_read_ns"] = real_field(&DeviceParams::t_read_ns);
    device["t_write_ns"] = real_field(&DeviceParams::t_write_ns);
    device["polarization"] = real_field(&DeviceParams::polarization);
    device["moment"] = real_field(&DeviceParams::moment);
    device["write_current_derating_a_per_k"] = real_field(&DeviceParams::write_current_derating_a_per_k);
    device["mu_bohr"] = real_field(&DeviceParams::mu_bohr);
    device["euler_c"] = real_field(&DeviceParams::euler_c);
    device["e_charge"] = real_field(&DeviceParams::e_charge);
    device["k_boltzmann"] = real_field(&DeviceParams::k_boltzmann);
    device["write_fail_grouping"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      if (v == "product") {
        c.sim.device.grouping = WriteFailGrouping::Product;
      } else if (v == "ln_only") {
        c.sim.device.grouping = WriteFailGrouping::LnOnly;
      } else {
        throw ConfigError(fmt::format("config key {}: expected product or ln_only", k));
      }
    };

    auto& timing = t["timing"];
    timing["base_cpi"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.timing.base_cpi = to_real(k, v); };
    timing["mem_refs_per_instr"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.sim.timing.mem_refs_per_instr = to_real(k, v);
    };
    timing["hit_cycles"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.timing.hit_cycles = to_real(k, v); };
    timing["miss_penalty_cycles"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.sim.timing.miss_penalty_cycles = to_real(k, v);
    };

    auto& trace = t["trace"];
    trace["file"] = [](RunConfig& c, auto&, auto& v, auto& base) {
      c.trace_file = v == "-" ? v : resolve(base, v).string();
    };
    trace["events"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.event_count = to_uint(k, v); };
    trace["read_fraction"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.read_fraction = to_real(k, v); };
    trace["working_set_blocks"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.synthetic.working_set_blocks = to_uint(k, v);
    };
    trace["reuse_locality"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.reuse_locality = to_real(k, v); };
    trace["window_size"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.window_size = to_u32(k, v); };
    trace["seed"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.seed = to_uint(k, v); };
    trace["interarrival_ns"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.synthetic.mean_interarrival_ns = to_real(k, v);
    };
    trace["writeback_affinity"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.synthetic.writeback_affinity = to_real(k, v);
    };
    trace["stream_fraction"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      c.synthetic.stream_fraction = to_real(k, v);
    };
    trace["address_stride"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.synthetic.address_stride = to_u32(k, v); };

    auto& run = t["run"];
    run["warmup_fraction"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.warmup_fraction = to_real(k, v); };
    run["output_dir"] = [](RunConfig& c, auto&, auto& v, auto& base) { c.output_dir = resolve(base, v); };
    run["samples_per_set"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.temp_samples_per_set = to_u32(k, v); };
    run["distance_window"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.distance_window = to_u32(k, v); };
    run["raw_temps"] = [](RunConfig& c, auto& k, auto& v, auto&) { c.sim.keep_raw_temps = to_bool(k, v); };
    run["format"] = [](RunConfig& c, auto& k, auto& v, auto&) {
      if (v == "csv" || v == "json" || v == "both") {
        c.emit_csv = v != "json";
        c.emit_json = v != "csv";
      } else {
        throw ConfigError(fmt::format("config key {}: expected csv, json or both", k));
      }
    };
    return t;
  }();
  return table;
}

pt::ptree parse_ini(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& ex) {
    throw ConfigError(fmt::format("config parse error: {}", ex.what()));
  }
  return tree;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::uint32_t> parse_uint_list(const std::string& text, const char* what) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_u32(what, unquote(item)));
  if (out.empty()) throw ConfigError(fmt::format("config key {}: empty list", what));
  return out;
}

void apply_config_text(RunConfig& config, const std::string& text, const std::filesystem::path& base_dir) {
  const auto tree = parse_ini(text);
  const auto& table = setters();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError(fmt::format("config key {} is outside any section", section));
    }
    const auto sec = table.find(section);
    if (sec == table.end()) throw ConfigError(fmt::format("unknown config section [{}]", section));
    for (const auto& [key, node] : keys) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) throw ConfigError(fmt::format("unknown config key {}.{}", section, key));
      setter->second(config, section + "." + key, unquote(node.data()), base_dir);
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig config;
  apply_config_text(config, read_text(path), path.parent_path());
  return config;
}

DeviceParams load_device_params(const std::filesystem::path& path) {
  const auto tree = parse_ini(read_text(path));
  RunConfig scratch;
  if (const auto device = tree.get_child_optional("device")) {
    const auto& keys = setters().at("device");
    for (const auto& [key, node] : *device) {
      const auto setter = keys.find(key);
      if (setter == keys.end()) throw ConfigError(fmt::format("unknown config key device.{}", key));
      setter->second(scratch, "device." + key, unquote(node.data()), path.parent_path());
    }
  }
  scratch.sim.device.validate();
  return scratch.sim.device;
}

void RunConfig::validate() const {
  sim.validate();
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (!trace_file) synthetic.validate();
  if (!emit_csv && !emit_json) throw ConfigError("no output format selected");
}

}  // namespace sttcache
