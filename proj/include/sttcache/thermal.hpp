#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace sttcache {

/// Temperature rise caused by one write, as a function of distance from the
/// written block.
///
/// A block `dway` ways and `dset` sets away gains
/// way_increment(dway) * set_attenuation(dset). way_increment(0) is the
/// self-heating step of the written block; set_attenuation(0) is 1.
class HeatKernel {
 public:
  using Profile = std::function<double(std::uint32_t)>;

  HeatKernel(double write_self_increment_k, Profile way_increment, Profile set_attenuation);

  // write_heat/(1 + d^2) within a set, 1/(1 + s^2) across sets.
  static HeatKernel inverse_square(double write_heat_k = 9.0);
  static HeatKernel zero();
  // increments[d] for way distance d; distances past the table get 0.
  static HeatKernel from_table(std::vector<double> increments);
  // Rows "dist,increment_k"; an optional header line is skipped.
  static HeatKernel load_csv(std::istream& in);

  double write_self_increment() const noexcept { return self_; }
  double way_increment(std::uint32_t dway) const { return way_(dway); }
  double set_attenuation(std::uint32_t dset) const { return dset == 0 ? 1.0 : set_(dset); }
  double increment(std::uint32_t dset, std::uint32_t dway) const {
    return way_increment(dway) * set_attenuation(dset);
  }

  // Non-negative, non-increasing, way_increment(0) == self. Throws ConfigError.
  void validate(std::uint32_t max_way_distance, std::uint32_t max_set_distance) const;

 private:
  double self_;
  Profile way_;
  Profile set_;
};

struct ThermalParams {
  double base_temp_k = 318.5;
  double write_heat_k = 9.0;
  double cool_tau_ns = 200.0;
  double kernel_cutoff_k = 0.05;
};

/// Per-block temperature elevation above a uniform base.
///
/// Elevations decay as exp(-dt / cool_tau) toward zero. Decay is lazy: a
/// block is brought up to date only when something touches it, which is
/// observationally the same as decaying the whole array on every event
/// because the decay is linear.
class ThermalField {
 public:
  // Invoked whenever a block is brought forward in time, with the elevation
  // it held since `from_ns`. Used for hazard integration.
  using IntervalObserver = std::function<void(std::uint32_t set, std::uint32_t way, double held_delta_k,
                                              std::uint64_t from_ns, std::uint64_t to_ns)>;

  ThermalField(std::uint32_t num_sets, std::uint32_t ways, HeatKernel kernel, ThermalParams params);

  // Decays one block to `now` and returns its elevation. Throws DomainError
  // if `now` precedes the block's last update.
  double decay(std::uint32_t set, std::uint32_t way, std::uint64_t now);

  void inject_write_heat(std::uint32_t set, std::uint32_t way, std::uint64_t now);

  // Absolute temperature; does not move bookkeeping forward.
  double temperature_at(std::uint32_t set, std::uint32_t way, std::uint64_t now) const;
  double elevation_at(std::uint32_t set, std::uint32_t way, std::uint64_t now) const;

  // Brings every block to `now` (flushes the observer).
  void advance_all(std::uint64_t now);

  void set_interval_observer(IntervalObserver observer) { observer_ = std::move(observer); }

  std::uint32_t num_sets() const noexcept { return num_sets_; }
  std::uint32_t ways() const noexcept { return ways_; }
  const ThermalParams& params() const noexcept { return params_; }
  const HeatKernel& kernel() const noexcept { return kernel_; }
  // Furthest set distance that receives heat above the cutoff.
  std::uint32_t set_reach() const noexcept { return set_reach_; }

  double stored_elevation(std::uint32_t set, std::uint32_t way) const { return delta_[index(set, way)]; }
  std::uint64_t last_update(std::uint32_t set, std::uint32_t way) const { return last_[index(set, way)]; }

 private:
  std::size_t index(std::uint32_t set, std::uint32_t way) const {
    return static_cast<std::size_t>(set) * ways_ + way;
  }
  double decay_index(std::size_t i, std::uint64_t now);

  std::uint32_t num_sets_;
  std::uint32_t ways_;
  HeatKernel kernel_;
  ThermalParams params_;
  std::uint32_t set_reach_ = 0;
  // increments_[dset * ways + dway], already truncated at the cutoff.
  std::vector<double> increments_;
  std::vector<double> delta_;
  std::vector<std::uint64_t> last_;
  IntervalObserver observer_;
};

}  // namespace sttcache
