#include <doctest.h>

#include <cmath>
#include <limits>

#include "copspec/error.hpp"
#include "copspec/optim.hpp"

using namespace copspec;

TEST_CASE("rosenbrock") {
  auto f = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  NelderMeadOptions opts;
  opts.max_iterations = 5000;
  opts.record_history = true;
  const auto r = nelder_mead(f, {-1.2, 1.0}, opts);
  CHECK(r.converged);
  CHECK(r.argmin[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.argmin[1] == doctest::Approx(1.0).epsilon(1e-4));
  for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
}

TEST_CASE("quadratic and constraints") {
  auto f = [](std::span<const double> x) {
    if (x[0] < 0.5) return std::numeric_limits<double>::infinity();
    return (x[0] - 0.2) * (x[0] - 0.2) + (x[1] + 3) * (x[1] + 3);
  };
  const auto r = nelder_mead(f, {1.0, 0.0});
  CHECK(r.argmin[0] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(r.argmin[1] == doctest::Approx(-3.0).epsilon(1e-4));
}

TEST_CASE("constant objective returns the start") {
  const auto r = nelder_mead([](std::span<const double>) { return 1.0; }, {0.3, -0.7});
  CHECK(r.argmin == std::vector<double>{0.3, -0.7});
}

TEST_CASE("non-finite start") {
  CHECK_THROWS_AS(nelder_mead([](std::span<const double>) { return NAN; }, {0.0}), NumericalError);
}
