#include "sttcache/thermal.hpp"

#include <cmath>
#include <istream>
#include <string>

#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

HeatKernel::HeatKernel(double write_self_increment_k, Profile way_increment, Profile set_attenuation)
    : self_(write_self_increment_k), way_(std::move(way_increment)), set_(std::move(set_attenuation)) {}

HeatKernel HeatKernel::inverse_square(double write_heat_k) {
  return HeatKernel(
      write_heat_k,
      [write_heat_k](std::uint32_t d) { return write_heat_k / (1.0 + double(d) * double(d)); },
      [](std::uint32_t s) { return 1.0 / (1.0 + double(s) * double(s)); });
}

HeatKernel HeatKernel::zero() {
  return HeatKernel(
      0.0, [](std::uint32_t) { return 0.0; }, [](std::uint32_t) { return 0.0; });
}

HeatKernel HeatKernel::from_table(std::vector<double> increments) {
  if (increments.empty()) throw ConfigError("heat kernel table is empty");
  const double self = increments.front();
  return HeatKernel(
      self,
      [table = std::move(increments)](std::uint32_t d) { return d < table.size() ? table[d] : 0.0; },
      [](std::uint32_t s) { return 1.0 / (1.0 + double(s) * double(s)); });
}

HeatKernel HeatKernel::load_csv(std::istream& in) {
  std::vector<double> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(fmt::format("kernel table line {}: expected dist,increment_k", line_no));
    const auto dist_s = line.substr(0, comma);
    if (line_no == 1 && dist_s.find_first_not_of("0123456789 ") != std::string::npos) continue;  // header
    try {
      const auto d = std::stoul(dist_s);
      const double inc = std::stod(line.substr(comma + 1));
      if (d >= table.size()) table.resize(d + 1, 0.0);
      table[d] = inc;
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("kernel table line {}: bad number", line_no));
    }
  }
  return from_table(std::move(table));
}

void HeatKernel::validate(std::uint32_t max_way_distance, std::uint32_t max_set_distance) const {
  if (way_increment(0) != self_) throw ConfigError("heat kernel: way_increment(0) must equal the self increment");
  double prev = self_;
  for (std::uint32_t d = 0; d <= max_way_distance; ++d) {
    const double v = way_increment(d);
    if (!(v >= 0.0) || v > prev) throw ConfigError(fmt::format("heat kernel: way increment at distance {} is negative or increasing", d));
    prev = v;
  }
  prev = 1.0;
  for (std::uint32_t s = 0; s <= max_set_distance; ++s) {
    const double v = set_attenuation(s);
    if (!(v >= 0.0) || v > prev) throw ConfigError(fmt::format("heat kernel: set attenuation at distance {} is negative or increasing", s));
    prev = v;
  }
}

ThermalField::ThermalField(std::uint32_t num_sets, std::uint32_t ways, HeatKernel kernel, ThermalParams params)
    : num_sets_(num_sets), ways_(ways), kernel_(std::move(kernel)), params_(params) {
  if (num_sets == 0 || ways == 0) throw ConfigError("thermal field needs at least one block");
  if (!(params_.cool_tau_ns > 0.0)) throw ConfigError("cool_tau_ns must be positive");
  if (!(params_.kernel_cutoff_k >= 0.0)) throw ConfigError("kernel_cutoff_k must be non-negative");
  if (!(params_.base_temp_k > 0.0)) throw ConfigError("base_temp_k must be positive");
  kernel_.validate(ways - 1, std::min<std::uint32_t>(num_sets - 1, 64));

  const double peak = kernel_.write_self_increment();
  while (set_reach_ + 1 < num_sets_ && peak * kernel_.set_attenuation(set_reach_ + 1) >= params_.kernel_cutoff_k &&
         peak * kernel_.set_attenuation(set_reach_ + 1) > 0.0) {
    ++set_reach_;
  }
  increments_.assign(static_cast<std::size_t>(set_reach_ + 1) * ways_, 0.0);
  for (std::uint32_t s = 0; s <= set_reach_; ++s) {
    for (std::uint32_t d = 0; d < ways_; ++d) {
      const double inc = kernel_.increment(s, d);
      increments_[s * ways_ + d] = inc >= params_.kernel_cutoff_k ? inc : 0.0;
    }
  }
  delta_.assign(static_cast<std::size_t>(num_sets_) * ways_, 0.0);
  last_.assign(delta_.size(), 0);
}

double ThermalField::decay_index(std::size_t i, std::uint64_t now) {
  const std::uint64_t last = last_[i];
  if (now < last) {
    throw DomainError(fmt::format("thermal field: time reversal at block {} ({} < {})", i, now, last));
  }
  if (now == last) return delta_[i];
  if (observer_) {
    observer_(static_cast<std::uint32_t>(i / ways_), static_cast<std::uint32_t>(i % ways_), delta_[i], last, now);
  }
  if (delta_[i] != 0.0) delta_[i] *= std::exp(-double(now - last) / params_.cool_tau_ns);
  last_[i] = now;
  return delta_[i];
}

double ThermalField::decay(std::uint32_t set, std::uint32_t way, std::uint64_t now) {
  return decay_index(index(set, way), now);
}

void ThermalField::inject_write_heat(std::uint32_t set, std::uint32_t way, std::uint64_t now) {
  const std::int64_t lo = std::max<std::int64_t>(0, std::int64_t(set) - set_reach_);
  const std::int64_t hi = std::min<std::int64_t>(num_sets_ - 1, std::int64_t(set) + set_reach_);
  for (std::int64_t s = lo; s <= hi; ++s) {
    const auto dset = static_cast<std::uint32_t>(s > set ? s - set : set - s);
    const double* row = &increments_[static_cast<std::size_t>(dset) * ways_];
    for (std::uint32_t w = 0; w < ways_; ++w) {
      const double inc = row[w > way ? w - way : way - w];
      if (inc == 0.0) continue;
      const auto i = index(static_cast<std::uint32_t>(s), w);
      decay_index(i, now);
      delta_[i] += inc;
    }
  }
}

double ThermalField::elevation_at(std::uint32_t set, std::uint32_t way, std::uint64_t now) const {
  const auto i = index(set, way);
  if (now < last_[i]) {
    throw DomainError(fmt::format("thermal field: time reversal at block ({}, {})", set, way));
  }
  if (delta_[i] == 0.0 || now == last_[i]) return delta_[i];
  return delta_[i] * std::exp(-double(now - last_[i]) / params_.cool_tau_ns);
}

double ThermalField::temperature_at(std::uint32_t set, std::uint32_t way, std::uint64_t now) const {
  return params_.base_temp_k + elevation_at(set, way, now);
}

void ThermalField::advance_all(std::uint64_t now) {
  for (std::size_t i = 0; i < delta_.size(); ++i) decay_index(i, now);
}

}  // namespace sttcache
