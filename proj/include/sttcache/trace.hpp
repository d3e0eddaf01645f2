#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sttcache {

// Traces carry reads and writebacks only. Fills caused by read misses are
// produced inside the cache model.
enum class AccessKind : std::uint8_t { Read, Writeback };

struct TraceEvent {
  std::uint64_t timestamp_ns = 0;
  AccessKind kind = AccessKind::Read;
  std::uint64_t address = 0;
  // Provenance: 1-based source line for parsed traces, sequence number for
  // synthetic ones.
  std::uint64_t origin = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Parameters of the recent-address-window generator.
///
/// With probability `reuse_locality` the next block is drawn uniformly from
/// the last `window_size` emitted blocks, otherwise uniformly from
/// [0, working_set_blocks). Inter-arrival gaps are exponential with mean
/// `mean_interarrival_ns`, rounded to whole nanoseconds.
///
/// `writeback_affinity` steers writebacks toward reused blocks, the way L1
/// writebacks only ever return blocks fetched earlier. At 0 the access kind
/// is independent of where the block came from; at 1 writebacks come from
/// reuse draws as far as `read_fraction` allows. The expected read fraction
/// is `read_fraction` either way.
///
/// `stream_fraction` mixes in a sequential scan of blocks past the working set.
/// Stream events are reads and never enter the reuse window; the remaining
/// events carry all writebacks so the overall read fraction is unchanged.
struct SyntheticTraceSpec {
  std::uint64_t event_count = 100000;
  double read_fraction = 0.7;
  std::uint64_t working_set_blocks = 65536;
  double reuse_locality = 0.8;
  std::uint32_t window_size = 16;
  std::uint64_t seed = 1;
  double mean_interarrival_ns = 10.0;
  std::uint32_t address_stride = 64;
  double writeback_affinity = 0.0;
  double stream_fraction = 0.0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Rejects the whole stream on the first bad line (TraceError).
std::vector<TraceEvent> parse_trace(std::istream& in);
std::vector<TraceEvent> parse_trace(std::string_view text);

std::vector<TraceEvent> generate_trace(const SyntheticTraceSpec& spec);

// Canonical text form: "<ts> <R|W> 0x<lowercase hex>\n" per event.
void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);
std::string format_trace(const std::vector<TraceEvent>& events);

char kind_code(AccessKind kind) noexcept;

}  // namespace sttcache
