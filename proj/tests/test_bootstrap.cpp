#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "copspec/bootstrap.hpp"
#include "copspec/error.hpp"

using namespace copspec;

namespace {

std::vector<SpectralMatrix> random_replicates(std::size_t R, const QuantileGrid& taus, const FrequencyGrid& omegas,
                                              unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z;
  std::vector<SpectralMatrix> out;
  const std::size_t T = taus.size(), K = omegas.size();
  for (std::size_t r = 0; r < R; ++r) {
    std::vector<Complex> v(T * T * K);
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        for (std::size_t k = 0; k < K; ++k) {
          const Complex c(z(g), i == j ? 0.0 : z(g));
          v[(i * T + j) * K + k] = c;
          v[(j * T + i) * K + k] = std::conj(c);
        }
    out.emplace_back(taus, omegas, std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("sample quantile convention") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(sample_quantile(x, 0.0) == 1.0);
  CHECK(sample_quantile(x, 1.0) == 5.0);
  CHECK(sample_quantile(x, 0.5) == 3.0);
  CHECK(sample_quantile(x, 0.1) == doctest::Approx(1.4));
  CHECK(sample_quantile(x, 0.975) == doctest::Approx(4.9));
  CHECK_THROWS_AS(sample_quantile(std::vector<double>{}, 0.5), InvalidInput);
}

TEST_CASE("exceedance p-value") {
  const std::vector<double> s{0.5, 1.0, 1.0, 2.0};
  CHECK(exceedance_pvalue(s, 1.0) == 0.75);
  CHECK(exceedance_pvalue(s, 0.0) == 1.0);
  CHECK(exceedance_pvalue(s, 2.5) == 0.0);
}

TEST_CASE("typical regions and coverage") {
  const QuantileGrid taus({0.2, 0.8});
  const FrequencyGrid omegas({0.5, 1.5});
  const auto reps = random_replicates(101, taus, omegas, 1);
  const auto regions = typical_regions(reps, 0.1);
  // Estimate at the region centres is covered everywhere.
  std::vector<Complex> centre;
  for (const auto& b : regions.bounds) centre.emplace_back(0.5 * (b.lo_re + b.hi_re), 0.5 * (b.lo_im + b.hi_im));
  const auto cov = coverage_indicator(SpectralMatrix(taus, omegas, centre), regions);
  for (auto c : cov.re) CHECK(c == 1);
  for (auto c : cov.im) CHECK(c == 1);
  // Replicates themselves: each cell covers about 1 - alpha of them.
  std::size_t inside = 0;
  for (const auto& r : reps) {
    const auto c = coverage_indicator(r, regions);
    inside += c.re[1];
  }
  CHECK(inside >= 90);
  CHECK(inside <= 92);
}

TEST_CASE("algorithm 2 basics") {
  const auto taus = QuantileGrid::equally_spaced(4);
  const FrequencyGrid omegas({0.0, 1.0});
  const auto reps = random_replicates(200, taus, omegas, 2);
  const auto field = algorithm2_pvalues(reps, reps[0], 0.1);
  CHECK(field.replicates == 200);
  for (double p : field.p_re) CHECK((p > 0.0 && p <= 1.0));
  for (std::size_t k = 0; k < 2; ++k) {
    double m = 1.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m = std::min({m, field.p_re[field.index(i, j, k)], field.p_im[field.index(i, j, k)]});
    CHECK(field.p_min[k] == m);
  }
  // A wildly deviating data estimate gets p = 0 at every omega.
  std::vector<Complex> far(reps[0].values().begin(), reps[0].values().end());
  for (auto& v : far) v = Complex(v.real() + 100.0, v.imag());
  const auto big = algorithm2_pvalues(reps, SpectralMatrix(taus, omegas, far), 0.1);
  for (double p : big.p_min) CHECK(p == 0.0);
  CHECK(big.sign_re[0] == 1);
  // Diagonal Im parts are identically zero and get p = 1.
  CHECK(field.p_im[field.index(1, 1, 0)] == 1.0);
}

TEST_CASE("algorithm 2 is invariant under replicate permutation") {
  const auto taus = QuantileGrid::equally_spaced(3);
  const FrequencyGrid omegas({0.3, 2.0});
  auto reps = random_replicates(50, taus, omegas, 3);
  const auto data = random_replicates(1, taus, omegas, 4)[0];
  const auto a = algorithm2_pvalues(reps, data, 0.1);
  std::mt19937_64 g(5);
  std::shuffle(reps.begin(), reps.end(), g);
  const auto b = algorithm2_pvalues(reps, data, 0.1);
  CHECK(a.p_re == b.p_re);
  CHECK(a.p_im == b.p_im);
  CHECK(a.p_min == b.p_min);
}

TEST_CASE("degenerate real scale is clamped with a warning") {
  const QuantileGrid taus({0.5});
  const FrequencyGrid omegas({1.0});
  std::vector<SpectralMatrix> reps(10, SpectralMatrix(taus, omegas, {Complex(0.1, 0.0)}));
  const auto f = algorithm2_pvalues(reps, reps[0], 0.1);
  CHECK(f.warnings.size() == 1);
  CHECK(f.p_re[0] == 1.0);
}

TEST_CASE("bootstrap is deterministic across thread counts") {
  const auto x = simulate(ArSpec{{0.5}}, SimConfig{128, 100, 1, 0});
  const EstimatorConfig cfg{QuantileGrid::panel_levels(), FrequencyGrid::fourier_subgrid(16), KernelSpec(0.2)};
  const auto a = run_parametric_bootstrap(x, parse_model_class("ar", 1), 12, cfg, 9, 1);
  const auto b = run_parametric_bootstrap(x, parse_model_class("ar", 1), 12, cfg, 9, 4);
  CHECK(a.replicates == b.replicates);
  CHECK(a.size() == 12);
  CHECK(a.series_length == 128);
  const auto c = run_parametric_bootstrap(x, parse_model_class("ar", 1), 12, cfg, 10, 1);
  CHECK_FALSE(a.replicates == c.replicates);
  CHECK_THROWS_AS(run_parametric_bootstrap(x, parse_model_class("ar", 1), 1, cfg, 9), InvalidInput);
}

TEST_CASE("small self-calibration run") {
  CalibrationSetup setup;
  setup.n = 128;
  setup.R = 40;
  setup.reps = 6;
  setup.config = {QuantileGrid::panel_levels(), FrequencyGrid::fourier_subgrid(16), KernelSpec(0.2)};
  const auto rep = self_calibration_check(ArSpec{{0.3}}, parse_model_class("ar", 1), setup);
  CHECK(rep.reps == 6);
  CHECK(rep.p_min.size() == 6);
  CHECK(rep.rejection_rate.size() == 9);
  for (double c : rep.coverage_re) CHECK((c >= 0.0 && c <= 1.0));
  setup.threads = 1;
  const auto again = self_calibration_check(ArSpec{{0.3}}, parse_model_class("ar", 1), setup);
  CHECK(again.coverage_re == rep.coverage_re);
  CHECK(again.p_min == rep.p_min);
  CHECK(rep.standard_error(0.5) == doctest::Approx(std::sqrt(0.25 / 6)));
}
