// Command-line front end: simulate, perm search, reliability curve,
// trace gen, compare.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sttcache/config.hpp"
#include "sttcache/error.hpp"
#include "sttcache/metrics.hpp"
#include "sttcache/permutation.hpp"
#include "sttcache/reliability.hpp"
#include "sttcache/simulator.hpp"
#include "sttcache/thermal.hpp"
#include "sttcache/trace.hpp"

namespace {

using namespace sttcache;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTrace = 3;
constexpr int kExitIo = 4;

constexpr const char* kOutputDirEnv = "STTCACHE_OUTPUT_DIR";

// Trace source could not be opened; reported with the trace exit code.
struct TraceSourceError : Error {
  using Error::Error;
};

std::vector<TraceEvent> read_trace_source(const std::string& source) {
  if (source == "-") return parse_trace(std::cin);
  std::ifstream in(source);
  if (!in) throw TraceSourceError(fmt::format("cannot open trace file {}", source));
  return parse_trace(in);
}

void write_output(const std::string& dest, const std::string& text) {
  if (dest.empty() || dest == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  write_file_atomic(dest, text);
}

HeatKernel kernel_from_flag(const std::string& name, double write_heat) {
  if (name == "inverse-square") return HeatKernel::inverse_square(write_heat);
  if (name == "zero") return HeatKernel::zero();
  if (name == "inverse") {
    return HeatKernel(
        write_heat, [write_heat](std::uint32_t d) { return write_heat / (1.0 + d); },
        [](std::uint32_t s) { return 1.0 / (1.0 + double(s) * s); });
  }
  std::ifstream in(name);
  if (!in) throw ConfigError(fmt::format("unknown kernel '{}' (inverse-square, inverse, zero or a CSV path)", name));
  return HeatKernel::load_csv(in);
}

std::string join(const std::vector<std::uint32_t>& v, const char* sep) {
  return fmt::format("{}", fmt::join(v, sep));
}

struct SimulateOpts {
  std::string config;
  std::string trace;
  std::string out;
  std::string policies;
  std::string format;
  std::uint32_t sets = 0, ways = 0, block_bytes = 0;
  std::uint64_t seed = 0, events = 0;
  double warmup = -1.0;
  bool raw_temps = false;
};

int run_simulate(const SimulateOpts& o, const CLI::App& cmd) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = load_run_config(o.config);
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.trace.empty()) cfg.trace_file = o.trace;
  if (!o.policies.empty()) {
    std::string text = "[cache]\npolicy = " + o.policies + "\n";
    apply_config_text(cfg, text);
  }
  if (o.sets) cfg.sim.geometry.num_sets = o.sets;
  if (o.ways) cfg.sim.geometry.ways = o.ways;
  if (o.block_bytes) cfg.sim.geometry.block_bytes = o.block_bytes;
  if (cmd.count("--seed")) cfg.synthetic.seed = o.seed;
  if (o.events) cfg.synthetic.event_count = o.events;
  if (o.warmup >= 0.0) cfg.sim.warmup_fraction = o.warmup;
  if (o.raw_temps) cfg.sim.keep_raw_temps = true;
  if (!o.format.empty()) apply_config_text(cfg, "[run]\nformat = " + o.format + "\n");
  cfg.validate();

  // Everything is loaded and validated before the first output byte.
  const auto events = cfg.trace_file ? read_trace_source(*cfg.trace_file) : generate_trace(cfg.synthetic);
  auto reports = simulate_all(events, cfg.policies, cfg.sim);

  if (cfg.emit_csv) emit(reports, EmitFormat::Csv, cfg.output_dir);
  if (cfg.emit_json) emit(reports, EmitFormat::Json, cfg.output_dir);
  for (const auto& r : reports) {
    std::cerr << fmt::format("{:6} miss_rate={} cpi={} induced/intrinsic={}\n", policy_name(r.policy),
                             format_real(miss_rate(r)), format_real(r.cpi),
                             format_real(r.error_report.induced_over_intrinsic()));
  }
  return kExitOk;
}

struct PermOpts {
  std::uint32_t ways = 8;
  std::uint32_t min_dist = 0;
  std::string kernel = "inverse-square";
  double write_heat = 9.0;
  bool select_only = false;
};

int run_perm_search(const PermOpts& o) {
  const auto kernel = kernel_from_flag(o.kernel, o.write_heat);
  const auto min_dist = o.min_dist ? o.min_dist : max_feasible_min_distance(o.ways);
  if (o.select_only) {
    const auto best = select_default(o.ways, kernel);
    std::cout << fmt::format("{} | {} | {}\n", join(best.order, " "), join(best.distance_multiset, " "),
                             format_real(best.heat_score));
    return kExitOk;
  }
  auto perms = enumerate_valid(o.ways, min_dist);
  std::uint64_t total = 1;
  for (std::uint32_t i = 2; i <= o.ways; ++i) total *= i;
  fmt::memory_buffer buf;
  for (auto& p : perms) {
    p.heat_score = heat_score(p, kernel);
    fmt::format_to(std::back_inserter(buf), "{} | {} | {}\n", join(p.order, " "), join(p.distance_multiset, " "),
                   format_real(p.heat_score));
  }
  fmt::format_to(std::back_inserter(buf), "# {} of {} permutations have cyclic adjacent distance >= {} ({} without wrap-around)\n",
                 perms.size(), total, min_dist, count_valid_linear(o.ways, min_dist));
  std::cout << fmt::to_string(buf);
  return kExitOk;
}

struct CurveOpts {
  std::string sweep = "temp=300:400:5";
  std::string metric = "mttf";
  std::string config;
  std::string out;
  double duration_ns = 1e9;
};

std::vector<double> parse_sweep(const std::string& spec) {
  const std::string prefix = "temp=";
  if (spec.rfind(prefix, 0) != 0) throw ConfigError("sweep must look like temp=LO:HI:STEP");
  std::stringstream ss(spec.substr(prefix.size()));
  std::vector<double> parts;
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("bad sweep value '{}'", item));
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ConfigError("sweep must look like temp=LO:HI:STEP with STEP > 0 and HI >= LO");
  }
  const auto steps = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  std::vector<double> temps;
  for (std::size_t i = 0; i <= steps; ++i) temps.push_back(parts[0] + double(i) * parts[2]);
  return temps;
}

int run_reliability_curve(const CurveOpts& o) {
  const auto params = o.config.empty() ? DeviceParams{} : load_device_params(o.config);
  params.validate();
  const auto temps = parse_sweep(o.sweep);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "T,value\n");
  for (double t : temps) {
    double v = 0.0;
    if (o.metric == "mttf") {
      v = mttf(delta_at(t, params), params).ns;
    } else if (o.metric == "retention") {
      v = retention_failure_prob(o.duration_ns, delta_at(t, params), params);
    } else if (o.metric == "read") {
      v = read_disturbance_prob(t, params);
    } else if (o.metric == "write") {
      v = write_failure_prob(t, params);
    } else {
      throw ConfigError(fmt::format("unknown metric '{}' (mttf, retention, read, write)", o.metric));
    }
    fmt::format_to(std::back_inserter(buf), "{},{}\n", format_real(t), format_real(v));
  }
  write_output(o.out, fmt::to_string(buf));
  return kExitOk;
}

struct TraceGenOpts {
  std::string config;
  std::string out;
  SyntheticTraceSpec spec;
};

int run_trace_gen(TraceGenOpts o, const CLI::App& cmd) {
  if (!o.config.empty()) {
    const auto cfg = load_run_config(o.config);
    // Flags given explicitly win over the file.
    auto merged = cfg.synthetic;
    if (cmd.count("--events")) merged.event_count = o.spec.event_count;
    if (cmd.count("--read-fraction")) merged.read_fraction = o.spec.read_fraction;
    if (cmd.count("--working-set")) merged.working_set_blocks = o.spec.working_set_blocks;
    if (cmd.count("--reuse")) merged.reuse_locality = o.spec.reuse_locality;
    if (cmd.count("--window")) merged.window_size = o.spec.window_size;
    if (cmd.count("--seed")) merged.seed = o.spec.seed;
    if (cmd.count("--interarrival")) merged.mean_interarrival_ns = o.spec.mean_interarrival_ns;
    if (cmd.count("--stride")) merged.address_stride = o.spec.address_stride;
    if (cmd.count("--writeback-affinity")) merged.writeback_affinity = o.spec.writeback_affinity;
    if (cmd.count("--stream-fraction")) merged.stream_fraction = o.spec.stream_fraction;
    o.spec = merged;
  }
  const auto events = generate_trace(o.spec);
  write_output(o.out, format_trace(events));
  return kExitOk;
}

struct CompareOpts {
  std::vector<std::string> dirs;
  std::string out;
};

int run_compare(const CompareOpts& o) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "run,policy,miss_rate,cpi,cpi_norm_lru\n");
  for (const auto& dir : o.dirs) {
    const auto path = std::filesystem::path(dir) / "summary.csv";
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
    std::string line;
    if (!std::getline(in, line) || line != "policy,miss_rate,cpi,cpi_norm_lru") {
      throw IoError(fmt::format("{} is not a summary.csv", path.string()));
    }
    while (std::getline(in, line)) {
      if (!line.empty()) fmt::format_to(std::back_inserter(buf), "{},{}\n", dir, line);
    }
  }
  write_output(o.out, fmt::to_string(buf));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STT-MRAM last-level cache simulator with thermal-aware replacement"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Replay a trace through LRU / FIFO / TA-LRW and write reports");
  simulate->add_option("--config,-c", sim.config, "INI config file");
  simulate->add_option("--trace,-t", sim.trace, "Trace file, or - for stdin (default: synthetic from config)");
  simulate->add_option("--out,-o", sim.out, "Output directory (env " + std::string(kOutputDirEnv) + ")");
  simulate->add_option("--policy", sim.policies, "Comma list of lru,fifo,talrw");
  simulate->add_option("--sets", sim.sets, "Number of sets");
  simulate->add_option("--ways", sim.ways, "Associativity");
  simulate->add_option("--block-bytes", sim.block_bytes, "Block size in bytes");
  simulate->add_option("--seed", sim.seed, "Synthetic trace seed");
  simulate->add_option("--events", sim.events, "Synthetic trace length");
  simulate->add_option("--warmup", sim.warmup, "Warmup fraction of events in [0,1)");
  simulate->add_option("--format", sim.format, "csv, json or both");
  simulate->add_flag("--raw-temps", sim.raw_temps, "Also dump full-resolution temperature series");

  auto* perm = app.add_subcommand("perm", "Write-order permutations");
  perm->require_subcommand(1);
  PermOpts po;
  auto* search = perm->add_subcommand("search", "Enumerate write orders meeting a minimum adjacent distance");
  search->add_option("--ways", po.ways, "Associativity")->check(CLI::Range(2, 11));
  search->add_option("--min-dist", po.min_dist, "Minimum cyclic adjacent distance (default: largest feasible)");
  search->add_option("--kernel", po.kernel, "inverse-square, inverse, zero, or a dist,increment_k CSV");
  search->add_option("--write-heat", po.write_heat, "Self-heating step in K for analytic kernels");
  search->add_flag("--select", po.select_only, "Print only the minimum-heat order");

  auto* rel = app.add_subcommand("reliability", "Device failure models");
  rel->require_subcommand(1);
  CurveOpts co;
  auto* curve = rel->add_subcommand("curve", "Sweep a failure metric over temperature (CSV T,value)");
  curve->add_option("--sweep", co.sweep, "temp=LO:HI:STEP in K");
  curve->add_option("--metric", co.metric, "mttf (ns), retention, read, write");
  curve->add_option("--config,-c", co.config, "INI file with a [device] section");
  curve->add_option("--duration-ns", co.duration_ns, "Interval for the retention metric");
  curve->add_option("--out,-o", co.out, "Output file (default stdout)");

  auto* trace = app.add_subcommand("trace", "Trace utilities");
  trace->require_subcommand(1);
  TraceGenOpts tg;
  auto* gen = trace->add_subcommand("gen", "Write a synthetic trace");
  gen->add_option("--config,-c", tg.config, "INI file with a [trace] section");
  gen->add_option("--events", tg.spec.event_count, "Number of events");
  gen->add_option("--read-fraction", tg.spec.read_fraction, "Fraction of reads");
  gen->add_option("--working-set", tg.spec.working_set_blocks, "Distinct blocks");
  gen->add_option("--reuse", tg.spec.reuse_locality, "Probability of reusing a recent block");
  gen->add_option("--window", tg.spec.window_size, "Recent-block window size");
  gen->add_option("--seed", tg.spec.seed, "Seed");
  gen->add_option("--interarrival", tg.spec.mean_interarrival_ns, "Mean gap between events in ns");
  gen->add_option("--stride", tg.spec.address_stride, "Bytes between consecutive block addresses");
  gen->add_option("--writeback-affinity", tg.spec.writeback_affinity, "Steer writebacks to reused blocks, 0..1");
  gen->add_option("--stream-fraction", tg.spec.stream_fraction, "Share of sequential streaming reads");
  gen->add_option("--out,-o", tg.out, "Output file (default stdout)");

  CompareOpts cmp;
  auto* compare = app.add_subcommand("compare", "Tabulate summary.csv from several run directories");
  compare->add_option("dirs", cmp.dirs, "Run directories")->required();
  compare->add_option("--out,-o", cmp.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim, *simulate);
    if (*search) return run_perm_search(po);
    if (*curve) return run_reliability_curve(co);
    if (*gen) return run_trace_gen(tg, *gen);
    if (*compare) return run_compare(cmp);
  } catch (const TraceSourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTrace;
  } catch (const TraceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTrace;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return kExitConfig;
}
