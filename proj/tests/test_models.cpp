#include <doctest.h>

#include <cmath>
#include <numeric>

#include "copspec/error.hpp"
#include "copspec/models.hpp"
#include "copspec/rng.hpp"

using namespace copspec;

TEST_CASE("admissibility") {
  CHECK(check_admissible(ArSpec{{0.5}}).ok);
  const auto unit = check_admissible(ArSpec{{1.0}});
  CHECK_FALSE(unit.ok);
  CHECK(unit.message.find("root") != std::string::npos);
  CHECK(check_admissible(Garch11Spec{0.01, 0.4, 0.5}).ok);
  CHECK_FALSE(check_admissible(Garch11Spec{0.0, 0.4, 0.5}).ok);
  CHECK_FALSE(check_admissible(Garch11Spec{0.01, 0.6, 0.4}).ok);
  CHECK_FALSE(check_admissible(Garch11Spec{0.01, -0.1, 0.4}).ok);
  CHECK(check_admissible(Arch1Spec{0.1, 0.9}).ok);
  CHECK(check_admissible(Egarch11Spec{-0.1, 0.2, -0.2, 0.99}).ok);
  CHECK_FALSE(check_admissible(Egarch11Spec{-0.1, 0.2, -0.2, 1.0}).ok);
  CHECK(check_admissible(ArmaSpec{{0.5}, {0.3}}).ok);
  // Common factor (1 - 0.5 z) on both sides.
  CHECK_FALSE(check_admissible(ArmaSpec{{0.5}, {-0.5}}).ok);
  CHECK_FALSE(check_admissible(ArmaSpec{{1.2}, {}}).ok);
}

TEST_CASE("reciprocal roots and projection") {
  const std::vector<double> c{1.5, -0.56};  // (1 - 0.7 z)(1 - 0.8 z)
  CHECK(spectral_radius(c) == doctest::Approx(0.8));
  const std::vector<double> bad{2.0};
  const auto fixed = project_to_stationary(bad);
  CHECK(spectral_radius(fixed) < 1.0);
  CHECK(project_to_stationary(c)[0] == doctest::Approx(1.5));
}

TEST_CASE("canonical text round trip") {
  const std::vector<ModelSpec> specs = {ArSpec{{0.5}}, ArSpec{{0.1, -0.2, 0.3}}, ArmaSpec{{0.4}, {0.25}},
                                        Arch1Spec{0.1, 0.3}, Garch11Spec{0.01, 0.4, 0.5},
                                        Egarch11Spec{-0.1, 0.2, -0.2, 0.99}};
  for (const auto& s : specs) CHECK(parse_model_spec(to_string(s)) == s);
  CHECK(to_string(Garch11Spec{0.01, 0.4, 0.5}) == "garch11(omega=0.01,alpha=0.4,beta=0.5)");
  CHECK(parse_model_spec("garch11(0.01, 0.4, 0.5)") == ModelSpec(Garch11Spec{0.01, 0.4, 0.5}));
  CHECK(parse_model_spec("AR(0.5)") == ModelSpec(ArSpec{{0.5}}));
  CHECK_THROWS_AS(parse_model_spec("foo(1)"), InvalidInput);
  CHECK_THROWS_AS(parse_model_spec("garch11(omega=0.1)"), InvalidInput);
  CHECK_THROWS_AS(parse_model_spec("ar(0.5"), InvalidInput);
}

TEST_CASE("streams") {
  auto a = derive_stream(42, 0), b = derive_stream(42, 0), c = derive_stream(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs |= x != c.normal();
  }
  CHECK(differs);
  auto s = derive_stream(7, 0);
  double mean = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) mean += s.normal();
  CHECK(std::abs(mean / n) < 4e-3);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("degenerate recursions") {
  const SimConfig cfg{64, 10, 5, 3};
  const auto x = simulate(ArSpec{{0.0}}, cfg);
  auto stream = derive_stream(5, 3);
  for (int i = 0; i < 10; ++i) stream.normal();
  for (std::size_t t = 0; t < 64; ++t) CHECK(x[t] == stream.normal());

  const auto g = simulate(Garch11Spec{0.04, 0.0, 0.0}, cfg);
  for (std::size_t t = 0; t < 64; ++t) CHECK(g[t] == doctest::Approx(0.2 * x[t]).epsilon(1e-15));

  CHECK(simulate(Arch1Spec{0.1, 0.3}, cfg).values()[5] == simulate(Garch11Spec{0.1, 0.3, 0.0}, cfg).values()[5]);
  const auto a = simulate(Arch1Spec{0.1, 0.3}, cfg), b = simulate(Garch11Spec{0.1, 0.3, 0.0}, cfg);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("ar(1) autocorrelation") {
  const auto x = simulate(ArSpec{{0.5}}, SimConfig{100000, 1000, 11, 0});
  const auto v = x.values();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    c0 += (v[t] - mean) * (v[t] - mean);
    if (t > 0) c1 += (v[t] - mean) * (v[t - 1] - mean);
  }
  CHECK(std::abs(c1 / c0 - 0.5) < 0.02);
}

TEST_CASE("burn-in sufficiency: half-sample variances agree") {
  const std::vector<ModelSpec> specs = {ArSpec{{0.9}}, ArmaSpec{{0.5}, {0.4}}, Garch11Spec{0.01, 0.4, 0.5},
                                        Egarch11Spec{-0.1, 0.2, -0.2, 0.95}, Arch1Spec{0.1, 0.4}};
  for (const auto& spec : specs) {
    const auto series = simulate(spec, SimConfig{100000, 1000, 3, 0});
    const auto x = series.values();
    const std::size_t h = x.size() / 2;
    auto stats = [&](std::size_t lo) {
      double m = 0.0, m2 = 0.0, m4 = 0.0;
      for (std::size_t t = lo; t < lo + h; ++t) m += x[t];
      m /= double(h);
      for (std::size_t t = lo; t < lo + h; ++t) {
        const double d = (x[t] - m) * (x[t] - m);
        m2 += d;
        m4 += d * d;
      }
      return std::pair{m2 / double(h), m4 / double(h)};
    };
    const auto [v1, k1] = stats(0);
    const auto [v2, k2] = stats(h);
    // Standard error of a sample variance from the fourth moment, inflated
    // for serial dependence by treating each half as h / 50 blocks.
    const double se = std::sqrt((k1 - v1 * v1 + k2 - v2 * v2) / (double(h) / 50.0));
    CHECK_MESSAGE(std::abs(v1 - v2) < 5 * se, to_string(spec));
  }
}

TEST_CASE("simulate rejects inadmissible specs") {
  CHECK_THROWS_AS(simulate(ArSpec{{1.0}}, SimConfig{64, 0, 1, 0}), InvalidInput);
  CHECK_THROWS_AS(simulate(ArSpec{{0.5}}, SimConfig{4, 0, 1, 0}), InvalidInput);
}
