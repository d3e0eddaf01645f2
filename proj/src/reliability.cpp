#include "sttcache/reliability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "sttcache/error.hpp"

namespace sttcache {

void DeviceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("device parameter {} must be positive", name));
  };
  positive(delta_nominal, "delta_nominal");
  positive(reference_temp_k, "reference_temp_k");
  positive(k_boltzmann, "k_boltzmann");
  positive(tau_attempt_ns, "tau_attempt_ns");
  positive(i_read_a, "i_read_a");
  positive(i_write_nominal_a, "i_write_a");
  positive(i_c0_a, "i_c0_a");
  positive(t_read_ns, "t_read_ns");
  positive(t_write_ns, "t_write_ns");
  positive(mu_bohr, "mu_bohr");
  positive(euler_c, "euler_c");
  positive(e_charge, "e_charge");
  positive(moment, "moment");
  if (!(polarization > 0.0 && polarization < 1.0)) throw ConfigError("device parameter polarization must be in (0, 1)");
  if (!(write_current_derating_a_per_k <= 0.0)) throw ConfigError("write_current_derating must be <= 0");
  if (!(i_write_nominal_a > i_c0_a && i_c0_a > i_read_a)) {
    throw ConfigError("device currents must satisfy I_write > I_C0 > I_read > 0");
  }
}

double delta_at(double temp_k, const DeviceParams& params) {
  if (!(temp_k > 0.0)) throw DomainError(fmt::format("non-positive temperature {} K", temp_k));
  return params.barrier_energy_j() / (params.k_boltzmann * temp_k);
}

namespace {

// t / (tau e^Delta) evaluated without forming e^Delta.
double flip_rate_exposure(double t_ns, double delta, const DeviceParams& params) {
  if (t_ns <= 0.0) return 0.0;
  return std::exp(std::log(t_ns) - std::log(params.tau_attempt_ns) - delta);
}

}  // namespace

double bit_flip_pmf(std::uint32_t n, double t_ns, double delta, const DeviceParams& params) {
  if (t_ns < 0.0) throw DomainError("negative interval");
  if (t_ns == 0.0) return n == 0 ? 1.0 : 0.0;
  const double log_lambda = std::log(t_ns) - std::log(params.tau_attempt_ns) - delta;
  const double lambda = std::exp(log_lambda);
  return std::exp(double(n) * log_lambda - lambda - std::lgamma(double(n) + 1.0));
}

double retention_failure_prob(double t_ns, double delta, const DeviceParams& params) {
  if (t_ns < 0.0) throw DomainError("negative interval");
  return -std::expm1(-flip_rate_exposure(t_ns, delta, params));
}

double retention_hazard_per_ns(double temp_k, const DeviceParams& params) {
  return std::exp(-delta_at(temp_k, params)) / params.tau_attempt_ns;
}

Mttf mttf(double delta, const DeviceParams& params) {
  const double log_ns = std::log(params.tau_attempt_ns) + delta;
  const double ns = log_ns > std::log(std::numeric_limits<double>::max()) ? std::numeric_limits<double>::infinity()
                                                                          : std::exp(log_ns);
  return {ns, log_ns};
}

double read_disturbance_prob(double temp_k, const DeviceParams& params) {
  if (params.i_read_a > params.i_c0_a) {
    throw DomainError("read current exceeds critical current");
  }
  const double delta = delta_at(temp_k, params);
  // Switching rate under a subcritical current: the barrier is lowered by
  // the factor (1 - I_read / I_C0).
  const double barrier = delta * (params.i_c0_a - params.i_read_a) / params.i_c0_a;
  const double exposure = std::exp(std::log(params.t_read_ns / params.tau_attempt_ns) - barrier);
  return -std::expm1(-exposure);
}

double write_failure_prob(double temp_k, const DeviceParams& params) {
  const double delta = delta_at(temp_k, params);
  const double i_write = params.write_current_at(temp_k);
  if (i_write == params.i_c0_a) return 1.0;
  if (!(i_write > params.i_c0_a)) {
    throw DomainError(fmt::format("subcritical write current {} A at {} K", i_write, temp_k));
  }
  const double p = params.polarization;
  const double log_term = std::log(std::numbers::pi * std::numbers::pi * delta / 4.0);
  const double moment_term = params.e_charge * params.moment * (1.0 + p * p);
  const double denom = params.grouping == WriteFailGrouping::Product ? (params.euler_c + log_term) * moment_term
                                                                     : params.euler_c + log_term * moment_term;
  if (!(denom > 0.0)) throw DomainError("non-positive write-failure denominator");
  const double rate_per_s = 2.0 * params.mu_bohr * p * (i_write - params.i_c0_a) / denom;
  return std::exp(-params.t_write_ns * 1e-9 * rate_per_s);
}

ErrorRateAccumulator::ErrorRateAccumulator(const DeviceParams& params, double base_temp_k,
                                           std::uint32_t bits_per_block, HazardIntegration mode,
                                           double cool_tau_ns)
    : params_(params),
      base_temp_k_(base_temp_k),
      bits_(bits_per_block),
      mode_(mode),
      cool_tau_ns_(cool_tau_ns),
      base_hazard_(retention_hazard_per_ns(base_temp_k, params)),
      base_read_(read_disturbance_prob(base_temp_k, params)),
      base_write_(write_failure_prob(base_temp_k, params)) {}

void ErrorRateAccumulator::add_read(double temp_k) {
  intrinsic_.read_disturb += bits_ * base_read_;
  if (temp_k != base_temp_k_) induced_.read_disturb += bits_ * (read_disturbance_prob(temp_k, params_) - base_read_);
}

void ErrorRateAccumulator::add_write(double temp_k) {
  intrinsic_.write_fail += bits_ * base_write_;
  if (temp_k != base_temp_k_) induced_.write_fail += bits_ * (write_failure_prob(temp_k, params_) - base_write_);
}

void ErrorRateAccumulator::add_retention_interval(double held_delta_k, double duration_ns) {
  if (duration_ns <= 0.0) return;
  intrinsic_.retention += bits_ * base_hazard_ * duration_ns;
  if (held_delta_k == 0.0) return;

  auto excess = [&](double elevation) {
    return retention_hazard_per_ns(base_temp_k_ + elevation, params_) - base_hazard_;
  };
  if (mode_ == HazardIntegration::SampleAndHold) {
    induced_.retention += bits_ * excess(held_delta_k) * duration_ns;
    return;
  }
  // Composite Simpson over the decaying elevation, capped at 20 time
  // constants where the excess has vanished.
  const double span = std::min(duration_ns, 20.0 * cool_tau_ns_);
  constexpr int kPanels = 64;
  const double h = span / kPanels;
  double acc = 0.0;
  for (int k = 0; k <= kPanels; ++k) {
    const double w = (k == 0 || k == kPanels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * excess(held_delta_k * std::exp(-k * h / cool_tau_ns_));
  }
  induced_.retention += bits_ * acc * h / 3.0;
}

ErrorRateReport ErrorRateAccumulator::finish(std::uint64_t blocks, double window_ns) const {
  const double norm = 1.0 / (double(std::max<std::uint64_t>(blocks, 1)) * std::max(window_ns, 1.0));
  auto scale = [norm](const ErrorComponents& c) {
    return ErrorComponents{c.retention * norm, c.read_disturb * norm, c.write_fail * norm};
  };
  return {scale(intrinsic_), scale(induced_)};
}

}  // namespace sttcache
