#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sttcache/error.hpp"
#include "sttcache/thermal.hpp"
#include "support/oracles.hpp"

using namespace sttcache;

namespace {

ThermalField make_field(std::uint32_t sets = 64, std::uint32_t ways = 8, double cutoff = 0.05) {
  ThermalParams params;
  params.kernel_cutoff_k = cutoff;
  return ThermalField(sets, ways, HeatKernel::inverse_square(), params);
}

}  // namespace

TEST_CASE("a single write raises the block by 9 K") {
  auto field = make_field();
  CHECK(field.temperature_at(3, 2, 0) == 318.5);
  field.inject_write_heat(3, 2, 100);
  CHECK(field.elevation_at(3, 2, 100) == 9.0);
  CHECK(field.temperature_at(3, 2, 100) == 327.5);
}

TEST_CASE("two immediate writes to one block stack to 18 K") {
  auto field = make_field();
  field.inject_write_heat(0, 0, 50);
  field.inject_write_heat(0, 0, 50);
  CHECK(field.elevation_at(0, 0, 50) == 18.0);
}

TEST_CASE("neighbors receive the kernel increment") {
  auto field = make_field();
  field.inject_write_heat(10, 4, 0);
  CHECK(field.elevation_at(10, 5, 0) == doctest::Approx(4.5));
  CHECK(field.elevation_at(10, 1, 0) == doctest::Approx(0.9));
  CHECK(field.elevation_at(11, 4, 0) == doctest::Approx(4.5));
  CHECK(field.elevation_at(12, 4, 0) == doctest::Approx(9.0 / 5.0));
  CHECK(field.elevation_at(10 + 14, 4, 0) == 0.0);
}

TEST_CASE("set reach follows the cutoff") {
  // 9 / (1 + s^2) >= 0.05 holds up to s = 13.
  CHECK(make_field().set_reach() == 13);
  CHECK(make_field(4).set_reach() == 3);
  CHECK(make_field(64, 8, 10.0).set_reach() == 0);
}

TEST_CASE("cooling") {
  auto field = make_field();
  field.inject_write_heat(0, 0, 0);
  CHECK(field.decay(0, 0, 0) == 9.0);
  CHECK(field.decay(0, 0, 1000000) < 1e-300);
  CHECK(field.temperature_at(0, 0, 1000000) == 318.5);
}

TEST_CASE("half-life") {
  // Half-life of exactly 1000 ns.
  ThermalParams params;
  params.cool_tau_ns = 1000.0 / std::log(2.0);
  ThermalField field(1, 8, HeatKernel::inverse_square(), params);
  field.inject_write_heat(0, 0, 0);
  CHECK(std::abs(field.elevation_at(0, 0, 1000) - 4.5) < 1e-9);
  CHECK(std::abs(field.decay(0, 0, 2000) - 2.25) < 1e-9);
}

TEST_CASE("time reversal is rejected") {
  auto field = make_field();
  field.inject_write_heat(0, 0, 100);
  CHECK_THROWS_AS(field.decay(0, 0, 50), DomainError);
  CHECK_THROWS_AS(field.elevation_at(0, 0, 50), DomainError);
}

TEST_CASE("superposition of simultaneous writes") {
  auto a = make_field();
  auto b = make_field();
  auto both = make_field();
  a.inject_write_heat(5, 1, 10);
  b.inject_write_heat(7, 6, 10);
  both.inject_write_heat(5, 1, 10);
  both.inject_write_heat(7, 6, 10);
  for (std::uint32_t s = 0; s < 64; ++s) {
    for (std::uint32_t w = 0; w < 8; ++w) {
      CHECK(both.elevation_at(s, w, 300) == doctest::Approx(a.elevation_at(s, w, 300) + b.elevation_at(s, w, 300)));
    }
  }
}

TEST_CASE("lazy field matches an eager reference") {
  const std::uint32_t sets = 32, ways = 8;
  auto field = make_field(sets, ways);
  oracle::EagerField eager(sets, ways, HeatKernel::inverse_square(), 200.0, 0.05);
  std::mt19937_64 rng(42);
  std::uint64_t now = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    now += rng() % 60;
    const auto s = static_cast<std::uint32_t>(rng() % sets);
    const auto w = static_cast<std::uint32_t>(rng() % ways);
    eager.write(s, w, now);
    field.inject_write_heat(s, w, now);
    if (i % 100 == 0 || i == 9999) {
      for (std::uint32_t ts = 0; ts < sets; ++ts) {
        for (std::uint32_t tw = 0; tw < ways; ++tw) {
          const double got = field.elevation_at(ts, tw, now);
          CHECK(got >= 0.0);
          worst = std::max(worst, std::abs(got - eager.elevation(ts, tw)));
        }
      }
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("interval observer sees every elapsed interval") {
  auto field = make_field(2, 2);
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double, std::uint64_t, std::uint64_t>> seen;
  field.set_interval_observer([&](std::uint32_t s, std::uint32_t w, double held, std::uint64_t from, std::uint64_t to) {
    seen.emplace_back(s, w, held, from, to);
  });
  field.inject_write_heat(0, 0, 0);
  CHECK(seen.empty());
  field.decay(0, 0, 100);
  REQUIRE(seen.size() == 1);
  CHECK(std::get<2>(seen[0]) == 9.0);
  CHECK(std::get<3>(seen[0]) == 0);
  CHECK(std::get<4>(seen[0]) == 100);
  seen.clear();
  field.advance_all(200);
  CHECK(seen.size() == 4);
  for (std::uint32_t s = 0; s < 2; ++s) {
    for (std::uint32_t w = 0; w < 2; ++w) CHECK(field.last_update(s, w) == 200);
  }
}

TEST_CASE("kernel constructors") {
  const auto zero = HeatKernel::zero();
  CHECK(zero.increment(0, 0) == 0.0);
  ThermalField cold(8, 8, zero, ThermalParams{});
  cold.inject_write_heat(3, 3, 10);
  for (std::uint32_t w = 0; w < 8; ++w) CHECK(cold.elevation_at(3, w, 10) == 0.0);

  std::istringstream csv("dist,increment_k\n0,9\n1,3\n2,1\n");
  const auto table = HeatKernel::load_csv(csv);
  CHECK(table.write_self_increment() == 9.0);
  CHECK(table.way_increment(1) == 3.0);
  CHECK(table.way_increment(5) == 0.0);
  CHECK(table.set_attenuation(0) == 1.0);

  CHECK_THROWS_AS(HeatKernel::from_table({}), ConfigError);
  CHECK_THROWS_AS(ThermalField(4, 4, HeatKernel::from_table({1.0, 2.0}), ThermalParams{}), ConfigError);
  std::istringstream bad("0;9\n");
  CHECK_THROWS_AS(HeatKernel::load_csv(bad), ConfigError);
}
