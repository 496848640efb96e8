#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "copspec/models.hpp"
#include "copspec/spectra.hpp"

namespace copspec {

double normal_cdf(double x);
// Returns -inf / +inf at p = 0 / 1.
double normal_quantile(double p);

// Bivariate standard normal CDF P(X <= a, Y <= b) with correlation rho:
//   Phi(a) Phi(b) + int_0^rho phi_2(a, b; r) dr,
// integrated in theta = asin(r), where the integrand stays bounded as |r| -> 1.
double bvn_cdf(double a, double b, double rho);

// Lag copulas C_h(u_i, u_j) = P(U_{t+h} <= u_i, U_t <= u_j) for |h| <= H on a
// set of levels in [0, 1]. Only h >= 0 is stored; negative lags use
// C_{-h}(u_i, u_j) = C_h(u_j, u_i).
class LagCopulaTable {
 public:
  LagCopulaTable(std::vector<double> levels, int max_lag, std::vector<double> values);

  std::span<const double> levels() const { return levels_; }
  int max_lag() const { return max_lag_; }
  double operator()(int h, std::size_t i, std::size_t j) const;

 private:
  std::vector<double> levels_;
  int max_lag_;
  std::vector<double> values_;  // (h, i, j), h = 0..H
};

// ARMA autocorrelations rho_0..rho_{max_lag} from the psi-weights of Q/P.
std::vector<double> arma_autocorrelations(const ArmaSpec& spec, std::size_t max_lag);

LagCopulaTable gaussian_lag_copula_table(const ArmaSpec& spec, std::span<const double> levels,
                                         int max_lag);

// Empirical C_h from rank-transformed data: the share of pairs (t, t + h)
// with ranks[t + h] <= u_i and ranks[t] <= u_j.
LagCopulaTable empirical_lag_copula_table(std::span<const double> ranks,
                                          std::span<const double> levels, int max_lag);

// f_{ij}(omega) = (1/2pi) sum_{|h| <= H} (C_h(u_i, u_j) - u_i u_j) exp(-i h omega).
// The table levels must coincide with `taus`.
SpectralMatrix copula_spectrum_from_table(const LagCopulaTable& table, const QuantileGrid& taus,
                                          const FrequencyGrid& omegas);

// Copula spectral density of a Gaussian AR/ARMA model. The truncation lag is
// grown from `min_lag` until (1/pi) sum_{h > H} |rho_h| < 1e-8. Throws
// UnsupportedModel for GARCH-family specs.
SpectralMatrix gaussian_copula_spectrum(const ModelSpec& spec, const QuantileGrid& taus,
                                        const FrequencyGrid& omegas, int min_lag = 0);

// Truncation lag gaussian_copula_spectrum would select.
int gaussian_truncation_lag(const ArmaSpec& spec, int min_lag = 0);

struct McSpectrum {
  SpectralMatrix estimate;
  // Batch-means standard errors over path segments, stored as
  // complex(se of real part, se of imaginary part).
  SpectralMatrix standard_error;
  int max_lag = 0;
  std::size_t segments = 0;
};

// Long-run Monte Carlo copula spectrum: lag copulas estimated from one
// simulated path of length sim_length (>= 100 H), standard errors from 20
// contiguous segments, each re-ranked on its own.
McSpectrum mc_copula_spectrum(const ModelSpec& spec, const QuantileGrid& taus,
                              const FrequencyGrid& omegas, int max_lag, std::size_t sim_length,
                              std::uint64_t seed);

struct TauPair {
  double tau1;
  double tau2;
};

// Covariance of the limiting Gaussian process of sqrt(n b_n)(fhat - f) at one
// frequency, between the listed quantile pairs.
class AsymptoticCov {
 public:
  AsymptoticCov(std::vector<TauPair> pairs, std::vector<std::complex<double>> cov,
                std::vector<std::complex<double>> pseudo);

  std::size_t size() const { return pairs_.size(); }
  const std::vector<TauPair>& pairs() const { return pairs_; }
  // E[H_a conj(H_b)]
  std::complex<double> covariance(std::size_t a, std::size_t b) const;
  // Var(Re H_a) and Var(Im H_a), using conj(H_(u,v)) = H_(v,u).
  double real_variance(std::size_t a) const;
  double imag_variance(std::size_t a) const;

 private:
  std::vector<TauPair> pairs_;
  std::vector<std::complex<double>> cov_;     // size x size
  std::vector<std::complex<double>> pseudo_;  // E[H_a H_a] per pair
};

AsymptoticCov asymptotic_covariance(const SpectralMatrix& f_true, const KernelSpec& kernel,
                                    double omega, std::span<const TauPair> pairs);

}  // namespace copspec
