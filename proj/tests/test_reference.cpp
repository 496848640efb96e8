#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "copspec/error.hpp"
#include "copspec/reference.hpp"

using namespace copspec;
constexpr double kPi = std::numbers::pi;

TEST_CASE("bivariate normal cdf") {
  CHECK(bvn_cdf(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(bvn_cdf(0, 0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(bvn_cdf(0.3, -0.4, 1.0) == doctest::Approx(normal_cdf(-0.4)).epsilon(1e-14));
  CHECK(bvn_cdf(0.3, -0.4, -1.0) == doctest::Approx(std::max(0.0, normal_cdf(0.3) + normal_cdf(-0.4) - 1)));
  CHECK_THROWS_AS(bvn_cdf(0, 0, 1.5), InvalidInput);

  // Independent oracle: integrate phi(x) * Phi((b - rho x)/sqrt(1 - rho^2)) over x < a.
  for (double a : {-1.3, 0.2, 1.7})
    for (double b : {-0.8, 0.0, 2.1})
      for (double rho : {-0.9, -0.3, 0.4, 0.85}) {
        const double s = std::sqrt(1 - rho * rho);
        auto g = [&](double x) {
          return std::exp(-0.5 * x * x) / std::sqrt(2 * kPi) * normal_cdf((b - rho * x) / s);
        };
        const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            g, -12.0, a, 15, 1e-14);
        CHECK(bvn_cdf(a, b, rho) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(bvn_cdf(a, b, rho) == doctest::Approx(bvn_cdf(b, a, rho)).epsilon(1e-13));
      }
  // Monotone in each argument and in rho.
  double prev = 0.0;
  for (double r = -0.99; r <= 0.99; r += 0.05) {
    const double v = bvn_cdf(0.4, -0.2, r);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  prev = 0.0;
  for (double a = -4; a <= 4; a += 0.25) {
    const double v = bvn_cdf(a, 0.3, 0.6);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("white noise gaussian spectrum") {
  const auto taus = QuantileGrid::panel_levels();
  const auto omegas = FrequencyGrid::fourier_subgrid(64);
  const auto f = gaussian_copula_spectrum(ArSpec{{0.0}}, taus, omegas);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double expected = (std::min(taus[i], taus[j]) - taus[i] * taus[j]) / (2 * kPi);
        CHECK(f.at(i, j, k).real() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(f.at(i, j, k).imag()) < 1e-15);
      }
}

TEST_CASE("gaussian linear spectra are real and hermitian") {
  const auto taus = QuantileGrid::equally_spaced(5);
  const auto omegas = FrequencyGrid::fourier_subgrid(32);
  for (const ModelSpec& spec : {ModelSpec(ArSpec{{0.5}}), ModelSpec(ArmaSpec{{0.3}, {0.6}}), ModelSpec(ArmaSpec{{}, {0.8}})}) {
    const auto f = gaussian_copula_spectrum(spec, taus, omegas);
    CHECK(f.hermitian_defect() < 1e-12);
    for (auto v : f.values()) CHECK(std::abs(v.imag()) < 1e-10);
  }
  CHECK_THROWS_AS(gaussian_copula_spectrum(Garch11Spec{0.01, 0.4, 0.5}, taus, omegas), UnsupportedModel);
}

TEST_CASE("truncation lag meets the tail bound") {
  const ArmaSpec spec{{0.9}, {}};
  const int H = gaussian_truncation_lag(spec);
  const auto rho = arma_autocorrelations(spec, H + 2000);
  double tail = 0.0;
  for (std::size_t h = H + 1; h < rho.size(); ++h) tail += std::abs(rho[h]);
  CHECK(tail / kPi < 1e-8);
  const auto taus = QuantileGrid({0.3, 0.7});
  const auto omegas = FrequencyGrid({0.0, 1.0});
  const auto a = gaussian_copula_spectrum(spec, taus, omegas);
  const auto b = gaussian_copula_spectrum(spec, taus, omegas, H + 50);
  for (std::size_t c = 0; c < a.values().size(); ++c) CHECK(std::abs(a.values()[c] - b.values()[c]) < 1e-8);
}

TEST_CASE("ar(1) autocorrelations") {
  const auto rho = arma_autocorrelations(ArmaSpec{{0.5}, {}}, 5);
  for (int h = 0; h <= 5; ++h) CHECK(rho[h] == doctest::Approx(std::pow(0.5, h)).epsilon(1e-12));
  const auto ma = arma_autocorrelations(ArmaSpec{{}, {0.5}}, 3);
  CHECK(ma[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(std::abs(ma[2]) < 1e-15);
}

TEST_CASE("monte carlo white noise is flat") {
  const auto taus = QuantileGrid::panel_levels();
  const auto omegas = FrequencyGrid::fourier_subgrid(16);
  const auto mc = mc_copula_spectrum(ArSpec{{0.0}}, taus, omegas, 10, 200000, 3);
  int outside = 0, total = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      const double expected = (taus[i] - taus[i] * taus[i]) / (2 * kPi);
      outside += std::abs(mc.estimate.at(i, i, k).real() - expected) > 3 * mc.standard_error.at(i, i, k).real();
      ++total;
    }
  CHECK(outside <= 2);
  CHECK(mc.segments == 20);
  CHECK_THROWS_AS(mc_copula_spectrum(ArSpec{{0.0}}, taus, omegas, 10, 999, 3), InvalidInput);
}

TEST_CASE("monte carlo standard errors shrink like 1/sqrt(length)") {
  // Summed over the whole grid so the noise in the batch-means estimates averages out.
  const auto taus = QuantileGrid::equally_spaced(9);
  const auto omegas = FrequencyGrid::fourier_subgrid(32);
  const auto a = mc_copula_spectrum(Garch11Spec{0.01, 0.4, 0.5}, taus, omegas, 20, 100000, 5);
  const auto b = mc_copula_spectrum(Garch11Spec{0.01, 0.4, 0.5}, taus, omegas, 20, 200000, 105);
  double ra = 0.0, rb = 0.0;
  for (std::size_t c = 0; c < a.standard_error.values().size(); ++c) {
    ra += a.standard_error.values()[c].real();
    rb += b.standard_error.values()[c].real();
  }
  const double ratio = rb / ra;
  CHECK(ratio > 0.5 / 1.5);
  CHECK(ratio < 0.5 * 1.5);
  CHECK(ratio == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.06));
}

TEST_CASE("ar(1) gaussian vs monte carlo shape") {
  const QuantileGrid taus({0.5});
  const FrequencyGrid omegas({0.2, 1.5});
  const auto g = gaussian_copula_spectrum(ArSpec{{0.5}}, taus, omegas);
  const auto mc = mc_copula_spectrum(ArSpec{{0.5}}, taus, omegas, 40, 400000, 9);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(mc.estimate.at(0, 0, k).real() - g.at(0, 0, k).real()) < 3 * mc.standard_error.at(0, 0, k).real());
  }
}

TEST_CASE("asymptotic covariance for white noise") {
  const KernelSpec kernel(0.1);
  const auto taus = QuantileGrid::panel_levels();
  const FrequencyGrid omegas({kPi / 2, kPi});
  const auto f = gaussian_copula_spectrum(ArSpec{{0.0}}, taus, omegas);
  const std::vector<TauPair> pairs = {{0.5, 0.5}, {0.1, 0.9}};
  const auto half = asymptotic_covariance(f, kernel, kPi / 2, pairs);
  const double w2 = 3.0 / (5.0 * kPi);
  CHECK(half.covariance(0, 0).real() == doctest::Approx(w2 * 0.0625 / (2 * kPi)).epsilon(1e-10));
  CHECK(half.real_variance(0) == doctest::Approx(w2 * 0.0625 / (2 * kPi)).epsilon(1e-10));
  CHECK(std::abs(half.imag_variance(0)) < 1e-15);
  const auto full = asymptotic_covariance(f, kernel, kPi, pairs);
  CHECK(full.covariance(0, 0).real() == doctest::Approx(2 * half.covariance(0, 0).real()).epsilon(1e-10));
  // Off-diagonal pair: Re and Im split the variance equally away from the real axis.
  CHECK(half.real_variance(1) + half.imag_variance(1) == doctest::Approx(half.covariance(1, 1).real()));
  const std::vector<TauPair> missing = {{0.3, 0.5}};
  CHECK_THROWS_AS(asymptotic_covariance(f, kernel, kPi / 2, missing), InvalidInput);
  CHECK_THROWS_AS(asymptotic_covariance(f, kernel, 1.0, pairs), InvalidInput);
}
