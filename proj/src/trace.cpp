#include "sttcache/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

namespace {

const char* trace_kind_name(TraceError::Kind kind) {
  switch (kind) {
    case TraceError::Kind::MalformedLine: return "malformed line";
    case TraceError::Kind::NonMonotoneTimestamp: return "non-monotone timestamp";
    case TraceError::Kind::UnknownKind: return "unknown access kind";
  }
  return "trace error";
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Splits on runs of blanks; at most `max_fields + 1` pieces so that
// trailing garbage is detectable.
std::vector<std::string_view> split_fields(std::string_view s, std::size_t max_fields) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size() && out.size() <= max_fields) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

template <typename T>
bool parse_uint(std::string_view s, T& out, int base) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out, base);
  return ec == std::errc{} && ptr == last;
}

// Portable uniform/exponential draws on top of mt19937_64; the standard
// distributions are implementation-defined and would break cross-platform
// byte-identical traces.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

TraceError::TraceError(Kind kind, std::uint64_t line_no, const std::string& detail)
    : Error(fmt::format("trace line {}: {}{}{}", line_no, trace_kind_name(kind),
                        detail.empty() ? "" : ": ", detail)),
      kind_(kind),
      line_(line_no) {}

char kind_code(AccessKind kind) noexcept { return kind == AccessKind::Read ? 'R' : 'W'; }

std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string raw;
  std::uint64_t line_no = 0;
  std::uint64_t last_ts = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_fields(line, 3);
    if (fields.size() != 3) {
      throw TraceError(TraceError::Kind::MalformedLine, line_no, "expected 3 fields");
    }
    TraceEvent ev;
    if (!parse_uint(fields[0], ev.timestamp_ns, 10)) {
      throw TraceError(TraceError::Kind::MalformedLine, line_no, "bad timestamp");
    }
    if (fields[1] == "R") {
      ev.kind = AccessKind::Read;
    } else if (fields[1] == "W") {
      ev.kind = AccessKind::Writeback;
    } else {
      throw TraceError(TraceError::Kind::UnknownKind, line_no, std::string(fields[1]));
    }
    const auto addr = fields[2];
    if (addr.size() < 3 || addr[0] != '0' || (addr[1] != 'x' && addr[1] != 'X') ||
        !parse_uint(addr.substr(2), ev.address, 16)) {
      throw TraceError(TraceError::Kind::MalformedLine, line_no, "bad address");
    }
    if (!events.empty() && ev.timestamp_ns < last_ts) {
      throw TraceError(TraceError::Kind::NonMonotoneTimestamp, line_no,
                       fmt::format("{} < {}", ev.timestamp_ns, last_ts));
    }
    last_ts = ev.timestamp_ns;
    ev.origin = line_no;
    events.push_back(ev);
  }
  if (in.bad()) throw IoError("failed reading trace stream");
  return events;
}

std::vector<TraceEvent> parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

void SyntheticTraceSpec::validate() const {
  auto bad = [](const char* field) {
    throw ConfigError(fmt::format("invalid synthetic trace spec: {}", field));
  };
  if (event_count < 1) bad("event_count");
  if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) bad("read_fraction");
  if (working_set_blocks < 1) bad("working_set_blocks");
  if (!(reuse_locality >= 0.0 && reuse_locality <= 1.0)) bad("reuse_locality");
  if (window_size < 1) bad("window_size");
  if (!(mean_interarrival_ns >= 0.0) || !std::isfinite(mean_interarrival_ns)) {
    bad("mean_interarrival_ns");
  }
  if (address_stride < 1) bad("address_stride");
  if (!(writeback_affinity >= 0.0 && writeback_affinity <= 1.0)) bad("writeback_affinity");
  if (!(stream_fraction >= 0.0 && stream_fraction < 1.0) ||
      1.0 - read_fraction > 1.0 - stream_fraction) {
    bad("stream_fraction");
  }
}

std::vector<TraceEvent> generate_trace(const SyntheticTraceSpec& spec) {
  spec.validate();
  PortableRng rng(spec.seed);

  std::vector<TraceEvent> events;
  events.reserve(spec.event_count);
  std::vector<std::uint64_t> window(spec.window_size);
  std::size_t window_fill = 0;
  std::size_t window_head = 0;
  std::uint64_t now = 0;

  // Writeback probability conditioned on the draw source. With affinity a,
  // P(W | reuse) = (1-a) w + a min(1, w / r) and P(W | fresh) is whatever
  // keeps r P(W | reuse) + (1-r) P(W | fresh) = w.
  const double w = (1.0 - spec.read_fraction) / (1.0 - spec.stream_fraction);
  const double r = spec.reuse_locality;
  const double wb_reuse = (1.0 - spec.writeback_affinity) * w +
                          spec.writeback_affinity * (r > 0.0 ? std::min(1.0, w / r) : w);
  const double wb_fresh = r < 1.0 ? std::clamp((w - r * wb_reuse) / (1.0 - r), 0.0, 1.0) : w;

  std::uint64_t stream_block = spec.working_set_blocks;

  for (std::uint64_t i = 0; i < spec.event_count; ++i) {
    if (i > 0) now += static_cast<std::uint64_t>(std::llround(rng.exponential(spec.mean_interarrival_ns)));

    if (spec.stream_fraction > 0.0 && rng.uniform01() < spec.stream_fraction) {
      events.push_back(TraceEvent{now, AccessKind::Read, stream_block++ * spec.address_stride, i});
      continue;
    }

    const bool reuse = window_fill > 0 && rng.uniform01() < spec.reuse_locality;
    const std::uint64_t block =
        reuse ? window[rng.below(window_fill)] : rng.below(spec.working_set_blocks);
    const bool read = rng.uniform01() >= (reuse ? wb_reuse : wb_fresh);

    window[window_head] = block;
    window_head = (window_head + 1) % window.size();
    window_fill = std::min(window_fill + 1, window.size());

    events.push_back(TraceEvent{now, read ? AccessKind::Read : AccessKind::Writeback,
                                block * spec.address_stride, i});
  }
  return events;
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  out << format_trace(events);
  if (!out) throw IoError("failed writing trace");
}

std::string format_trace(const std::vector<TraceEvent>& events) {
  fmt::memory_buffer buf;
  for (const auto& ev : events) {
    fmt::format_to(std::back_inserter(buf), "{} {} 0x{:x}\n", ev.timestamp_ns, kind_code(ev.kind),
                   ev.address);
  }
  return fmt::to_string(buf);
}

}  // namespace sttcache
