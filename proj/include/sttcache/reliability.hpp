#pragma once

#include <cstdint>

namespace sttcache {

// How the write-failure denominator groups its terms:
//   Product: (c + ln(pi^2 Delta / 4)) * (e * m * (1 + p^2))   [dimensionally consistent]
//   LnOnly:  c + ln(pi^2 Delta / 4) * (e * m * (1 + p^2))
enum class WriteFailGrouping { Product, LnOnly };

/// STT-MRAM cell parameters. Currents in amperes, times in nanoseconds,
/// energies in joules, moments in J/T.
///
/// Delta equals `delta_nominal` at `reference_temp_k`; the barrier energy is
/// derived from that pair. Write current falls linearly with temperature
/// above the same reference. Currents, pulse widths, polarization and the
/// free-layer moment are placeholders; set them from a device model before
/// quoting absolute rates.
struct DeviceParams {
  double delta_nominal = 40.0;
  double reference_temp_k = 300.0;
  double k_boltzmann = 1.380649e-23;
  double tau_attempt_ns = 1.0;
  double i_read_a = 20e-6;
  double i_write_nominal_a = 150e-6;
  double i_c0_a = 60e-6;
  double t_read_ns = 2.0;
  double t_write_ns = 10.0;
  double mu_bohr = 9.274010e-24;
  double polarization = 0.6;
  double euler_c = 0.5772157;
  double e_charge = 1.602177e-19;
  double moment = 5e-19;
  double write_current_derating_a_per_k = -0.5e-6;
  WriteFailGrouping grouping = WriteFailGrouping::Product;

  double barrier_energy_j() const noexcept { return delta_nominal * k_boltzmann * reference_temp_k; }
  double write_current_at(double temp_k) const noexcept {
    return i_write_nominal_a + write_current_derating_a_per_k * (temp_k - reference_temp_k);
  }
  // Throws ConfigError if a magnitude is non-positive or the current
  // ordering I_write > I_C0 > I_read > 0 is violated.
  void validate() const;
};

double delta_at(double temp_k, const DeviceParams& params);

// Poisson probability of exactly n flips within t, lambda = t / (tau e^Delta).
double bit_flip_pmf(std::uint32_t n, double t_ns, double delta, const DeviceParams& params);

// Probability of a retention flip within t: 1 - exp(-t / (tau e^Delta)).
double retention_failure_prob(double t_ns, double delta, const DeviceParams& params);

// Instantaneous retention hazard 1 / (tau e^Delta) per ns at temperature T.
double retention_hazard_per_ns(double temp_k, const DeviceParams& params);

struct Mttf {
  double ns;      // +inf once tau e^Delta overflows
  double log_ns;  // always finite
};
Mttf mttf(double delta, const DeviceParams& params);

double read_disturbance_prob(double temp_k, const DeviceParams& params);
double write_failure_prob(double temp_k, const DeviceParams& params);

struct ErrorComponents {
  double retention = 0.0;
  double read_disturb = 0.0;
  double write_fail = 0.0;

  double sum() const noexcept { return retention + read_disturb + write_fail; }
  friend bool operator==(const ErrorComponents&, const ErrorComponents&) = default;
};

/// Expected bit errors per block per ns over a measurement window, split into
/// the rate at uniform base temperature (intrinsic) and the excess caused by
/// heat accumulation (induced). Totals are defined as intrinsic + induced.
struct ErrorRateReport {
  ErrorComponents intrinsic;
  ErrorComponents induced;

  ErrorComponents total() const noexcept {
    return {intrinsic.retention + induced.retention, intrinsic.read_disturb + induced.read_disturb,
            intrinsic.write_fail + induced.write_fail};
  }
  double intrinsic_rate() const noexcept { return intrinsic.sum(); }
  double temperature_induced_rate() const noexcept { return induced.sum(); }
  double total_rate() const noexcept { return intrinsic_rate() + temperature_induced_rate(); }
  double induced_over_intrinsic() const noexcept {
    return intrinsic_rate() > 0.0 ? temperature_induced_rate() / intrinsic_rate() : 0.0;
  }
  friend bool operator==(const ErrorRateReport&, const ErrorRateReport&) = default;
};

// Sample-and-hold keeps the temperature seen at a block's last event for the
// whole following interval. Quadrature integrates the exponentially
// decaying elevation instead.
enum class HazardIntegration { SampleAndHold, Quadrature };

/// Accumulates failure expectations over one simulation run. Each event
/// contributes P(T_base) to the intrinsic part and P(T) - P(T_base) to the
/// induced part.
class ErrorRateAccumulator {
 public:
  ErrorRateAccumulator(const DeviceParams& params, double base_temp_k, std::uint32_t bits_per_block,
                       HazardIntegration mode = HazardIntegration::SampleAndHold, double cool_tau_ns = 200.0);

  void add_read(double temp_k);
  void add_write(double temp_k);
  // A block held `held_delta_k` above base at the start of an interval of
  // `duration_ns`.
  void add_retention_interval(double held_delta_k, double duration_ns);

  // Normalizes expected counts to a per-block, per-ns rate.
  ErrorRateReport finish(std::uint64_t blocks, double window_ns) const;

  const ErrorComponents& intrinsic_counts() const noexcept { return intrinsic_; }
  const ErrorComponents& induced_counts() const noexcept { return induced_; }

 private:
  DeviceParams params_;
  double base_temp_k_;
  double bits_;
  HazardIntegration mode_;
  double cool_tau_ns_;
  double base_hazard_;
  double base_read_;
  double base_write_;
  ErrorComponents intrinsic_;
  ErrorComponents induced_;
};

}  // namespace sttcache
