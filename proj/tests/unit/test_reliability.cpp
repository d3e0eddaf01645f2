#include <doctest.h>

#include <cmath>
#include <random>

#include "sttcache/error.hpp"
#include "sttcache/reliability.hpp"

using namespace sttcache;

namespace {

constexpr double kNsPerYear = 365.25 * 24 * 3600 * 1e9;
constexpr double kNsPerDay = 24 * 3600 * 1e9;

}  // namespace

TEST_CASE("thermal stability factor") {
  DeviceParams p;
  CHECK(delta_at(300.0, p) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(delta_at(600.0, p) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(delta_at(360.0, p) == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(delta_at(0.0, p), DomainError);
  CHECK_THROWS_AS(delta_at(-5.0, p), DomainError);
}

TEST_CASE("Poisson pmf") {
  DeviceParams p;
  CHECK(bit_flip_pmf(0, 0.0, 40.0, p) == 1.0);
  CHECK(bit_flip_pmf(3, 0.0, 40.0, p) == 0.0);
  CHECK(bit_flip_pmf(1, std::exp(40.0), 40.0, p) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  for (double lambda : {1e-3, 0.5, 1.0, 7.0, 40.0}) {
    const double t = lambda * std::exp(12.0);
    double sum = 0.0;
    for (std::uint32_t n = 0; n < 400; ++n) sum += bit_flip_pmf(n, t, 12.0, p);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  // Large barriers stay finite in log space.
  CHECK(bit_flip_pmf(0, 1e9, 60.0, p) == doctest::Approx(1.0));
  CHECK(bit_flip_pmf(1, 1e9, 60.0, p) > 0.0);
}

TEST_CASE("retention failure") {
  DeviceParams p;
  CHECK(retention_failure_prob(0.0, 40.0, p) == 0.0);
  CHECK(retention_failure_prob(1e12, 1e6, p) == 0.0);
  CHECK(retention_failure_prob(std::exp(40.0), 40.0, p) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(retention_failure_prob(1.0, 40.0, p) == doctest::Approx(std::exp(-40.0)).epsilon(1e-9));
}

TEST_CASE("retention matches exponential waiting times") {
  DeviceParams p;
  std::mt19937_64 rng(2024);
  for (double delta : {5.0, 10.0, 15.0}) {
    const double mean = p.tau_attempt_ns * std::exp(delta);
    const double t = mean * std::log(2.0) * 0.8;
    std::exponential_distribution<double> wait(1.0 / mean);
    const int trials = 1000000;
    int flipped = 0;
    for (int i = 0; i < trials; ++i) flipped += wait(rng) < t;
    const double expected = retention_failure_prob(t, delta, p);
    const double sigma = std::sqrt(expected * (1.0 - expected) / trials);
    CHECK(std::abs(double(flipped) / trials - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("mean time to failure") {
  DeviceParams p;
  const auto m300 = mttf(40.0, p);
  CHECK(m300.ns == doctest::Approx(std::exp(40.0)));
  CHECK(m300.ns / kNsPerYear > 5.0);
  CHECK(m300.ns / kNsPerYear < 20.0);
  const auto m360 = mttf(delta_at(360.0, p), p);
  CHECK(m360.ns == doctest::Approx(3.0e14).epsilon(0.01));
  CHECK(m360.ns / kNsPerDay > 0.2);
  CHECK(m360.ns / kNsPerDay < 20.0);
  CHECK(mttf(0.0, p).ns == p.tau_attempt_ns);
  const auto huge = mttf(1000.0, p);
  CHECK(std::isinf(huge.ns));
  CHECK(huge.log_ns == doctest::Approx(1000.0));
}

TEST_CASE("read disturbance") {
  DeviceParams p;
  auto zero_read = p;
  zero_read.t_read_ns = 0.0;
  CHECK(read_disturbance_prob(300.0, zero_read) == 0.0);
  auto critical = p;
  critical.i_read_a = critical.i_c0_a;
  CHECK(read_disturbance_prob(300.0, critical) == doctest::Approx(-std::expm1(-p.t_read_ns / p.tau_attempt_ns)));
  auto over = p;
  over.i_read_a = 2 * p.i_c0_a;
  CHECK_THROWS_AS(read_disturbance_prob(300.0, over), DomainError);
}

TEST_CASE("write failure") {
  DeviceParams p;
  auto critical = p;
  critical.write_current_derating_a_per_k = 0.0;
  critical.i_write_nominal_a = critical.i_c0_a;
  CHECK(write_failure_prob(350.0, critical) == 1.0);
  // Nominal write current of 150 uA falls below I_C0 = 60 uA past 480 K.
  CHECK_THROWS_AS(write_failure_prob(500.0, p), DomainError);
  auto long_pulse = p;
  long_pulse.t_write_ns = 1e6;
  CHECK(write_failure_prob(300.0, long_pulse) < 1e-300);
  auto ln_only = p;
  ln_only.grouping = WriteFailGrouping::LnOnly;
  const double lo = write_failure_prob(300.0, ln_only);
  CHECK(lo >= 0.0);
  CHECK(lo <= 1.0);
  CHECK(lo != write_failure_prob(300.0, p));
}

TEST_CASE("monotonicity over 300-400 K") {
  DeviceParams p;
  double prev_ret = 0, prev_read = 0, prev_write = 0;
  for (int t = 300; t <= 400; ++t) {
    const double ret = retention_failure_prob(1e6, delta_at(t, p), p);
    const double rd = read_disturbance_prob(t, p);
    const double wr = write_failure_prob(t, p);
    if (t > 300) {
      CHECK(ret > prev_ret);
      CHECK(rd > prev_read);
      CHECK(wr > prev_write);
    }
    prev_ret = ret;
    prev_read = rd;
    prev_write = wr;
  }
  for (int t = 300; t <= 400; t += 10) {
    double prev = 2.0;
    for (double tw = 1.0; tw <= 40.0; tw += 1.0) {
      auto q = p;
      q.t_write_ns = tw;
      const double wr = write_failure_prob(t, q);
      CHECK(wr < prev);
      prev = wr;
    }
  }
  double prev = -1.0;
  for (double t = 0.0; t <= 1e20; t = t * 10 + 1) {
    const double r = retention_failure_prob(t, 40.0, p);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("all probabilities stay in [0, 1] on a fuzzed grid") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    DeviceParams p;
    p.delta_nominal = 5.0 + 75.0 * u(rng);
    p.i_c0_a = 10e-6 + 190e-6 * u(rng);
    p.i_read_a = p.i_c0_a * (0.01 + 0.98 * u(rng));
    p.write_current_derating_a_per_k = -1e-6 * u(rng);
    // Keep the write current above critical up to 450 K.
    p.i_write_nominal_a = p.i_c0_a - p.write_current_derating_a_per_k * 150.0 + 1e-6 + 300e-6 * u(rng);
    p.t_read_ns = 0.1 + 20.0 * u(rng);
    p.t_write_ns = 0.1 + 50.0 * u(rng);
    p.polarization = 0.05 + 0.9 * u(rng);
    p.grouping = u(rng) < 0.5 ? WriteFailGrouping::Product : WriteFailGrouping::LnOnly;
    REQUIRE_NOTHROW(p.validate());
    const double temp = 250.0 + 200.0 * u(rng);
    const double delta = delta_at(temp, p);
    const double t = std::exp(60.0 * u(rng)) - 1.0;
    for (double v : {retention_failure_prob(t, delta, p), read_disturbance_prob(temp, p), write_failure_prob(temp, p),
                     bit_flip_pmf(static_cast<std::uint32_t>(u(rng) * 5), t, delta, p)}) {
      if (!(v >= 0.0 && v <= 1.0)) ++bad;
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("parameter validation") {
  DeviceParams p;
  CHECK_NOTHROW(p.validate());
  auto q = p;
  q.i_read_a = q.i_c0_a;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = p;
  q.polarization = 1.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = p;
  q.write_current_derating_a_per_k = 1e-6;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("accumulator splits intrinsic and induced exactly") {
  DeviceParams p;
  ErrorRateAccumulator acc(p, 318.5, 512);
  acc.add_read(318.5);
  acc.add_write(318.5);
  acc.add_retention_interval(0.0, 100.0);
  CHECK(acc.induced_counts().sum() == 0.0);
  acc.add_read(330.0);
  acc.add_write(335.0);
  acc.add_retention_interval(9.0, 50.0);
  CHECK(acc.induced_counts().read_disturb > 0.0);
  CHECK(acc.induced_counts().write_fail > 0.0);
  CHECK(acc.induced_counts().retention > 0.0);
  const auto r = acc.finish(8, 1000.0);
  const auto total = r.total();
  CHECK(total.retention == r.intrinsic.retention + r.induced.retention);
  CHECK(total.read_disturb == r.intrinsic.read_disturb + r.induced.read_disturb);
  CHECK(total.write_fail == r.intrinsic.write_fail + r.induced.write_fail);
  CHECK(r.total_rate() == r.intrinsic_rate() + r.temperature_induced_rate());
  CHECK(r.intrinsic.read_disturb == doctest::Approx(2 * 512 * read_disturbance_prob(318.5, p) / 8000.0));
  CHECK(r.induced.write_fail ==
        doctest::Approx(512 * (write_failure_prob(335.0, p) - write_failure_prob(318.5, p)) / 8000.0));
}

TEST_CASE("quadrature integrates the decaying hazard") {
  DeviceParams p;
  p.delta_nominal = 10.0;  // large hazard so the excess is well above rounding
  const double base = 318.5, tau = 200.0, held = 9.0, dur = 500.0;
  ErrorRateAccumulator hold(p, base, 1, HazardIntegration::SampleAndHold, tau);
  ErrorRateAccumulator quad(p, base, 1, HazardIntegration::Quadrature, tau);
  hold.add_retention_interval(held, dur);
  quad.add_retention_interval(held, dur);
  double ref = 0.0;
  const int steps = 200000;
  const double h = dur / steps;
  for (int k = 0; k < steps; ++k) {
    const double mid = (k + 0.5) * h;
    ref += (retention_hazard_per_ns(base + held * std::exp(-mid / tau), p) - retention_hazard_per_ns(base, p)) * h;
  }
  CHECK(quad.induced_counts().retention == doctest::Approx(ref).epsilon(1e-6));
  CHECK(hold.induced_counts().retention > quad.induced_counts().retention);
  CHECK(hold.intrinsic_counts().retention == quad.intrinsic_counts().retention);
}
