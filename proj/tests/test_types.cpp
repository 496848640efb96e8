#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "copspec/error.hpp"
#include "copspec/types.hpp"

using namespace copspec;

TEST_CASE("time series validation") {
  CHECK(TimeSeries(std::vector<double>(8, 1.0)).size() == 8);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>(7, 1.0)), InvalidInput);
  std::vector<double> v(10, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(TimeSeries{v}, InvalidInput);
  v[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TimeSeries{v}, InvalidInput);
  const TimeSeries s({1, 2, 3, 4, 5, 6, 7, 8}, "x");
  CHECK(s.label() == "x");
  CHECK(s[7] == 8.0);
}

TEST_CASE("quantile grid") {
  const auto g = QuantileGrid::equally_spaced(19);
  REQUIRE(g.size() == 19);
  CHECK(g[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(g[18] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(g.find(0.5).value() == 9);
  CHECK_FALSE(g.find(0.51).has_value());
  CHECK_THROWS_AS(QuantileGrid({0.5, 0.5}), InvalidInput);
  CHECK_THROWS_AS(QuantileGrid({0.0, 0.5}), InvalidInput);
  CHECK_THROWS_AS(QuantileGrid({0.5, 1.0}), InvalidInput);
  CHECK_THROWS_AS(QuantileGrid({}), InvalidInput);
  CHECK(QuantileGrid::panel_levels() == QuantileGrid({0.1, 0.5, 0.9}));
}

TEST_CASE("frequency grid") {
  const auto g = FrequencyGrid::fourier_subgrid(64);
  REQUIRE(g.size() == 33);
  CHECK(g[0] == 0.0);
  CHECK(g[4] == doctest::Approx(4 * std::numbers::pi / 32));
  CHECK(g[32] == doctest::Approx(std::numbers::pi));
  CHECK(FrequencyGrid({0.0, 0.0, 1.0}).size() == 3);
  CHECK_THROWS_AS(FrequencyGrid({1.0, 0.5}), InvalidInput);
  CHECK_THROWS_AS(FrequencyGrid({-0.1}), InvalidInput);
  CHECK_THROWS_AS(FrequencyGrid({3.2}), InvalidInput);
}
