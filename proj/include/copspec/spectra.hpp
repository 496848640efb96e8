#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "copspec/types.hpp"

namespace copspec {

using Complex = std::complex<double>;

enum class KernelKind { Epanechnikov };

// Smoothing kernel W on [-pi, pi] together with the bandwidth b_n.
//
// The Epanechnikov shape is normalized on [-pi, pi]:
//   W(u) = 3/(4 pi) * (1 - (u/pi)^2),  |u| <= pi,
// so that it integrates to one. The scaled kernel b^{-1} W(u / b) is supported
// on [-b pi, b pi].
class KernelSpec {
 public:
  explicit KernelSpec(double bandwidth, KernelKind kind = KernelKind::Epanechnikov);

  KernelKind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }

  // Unscaled shape W(u).
  double shape(double u) const;
  // Integral of W^2 over [-pi, pi], by adaptive quadrature.
  double squared_integral() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelKind kind_;
  double bandwidth_;
};

// W_n(u) = sum_j b^{-1} W(b^{-1}(u + 2 pi j)). `u` is first reduced to
// [-pi, pi); with b <= pi the terms j in {-2..2} cover the whole support.
double periodized_kernel_weight(const KernelSpec& kernel, double u);

// Copula spectral density values f_{(tau_i, tau_j)}(omega_k).
//
// Stored row-major in (i, j, k). Negative frequencies are not stored; use
// f(tau1, tau2, -omega) = conj(f(tau1, tau2, omega)).
class SpectralMatrix {
 public:
  SpectralMatrix(QuantileGrid taus, FrequencyGrid omegas, std::vector<Complex> values);

  const QuantileGrid& tau_grid() const { return taus_; }
  const FrequencyGrid& freq_grid() const { return omegas_; }
  std::span<const Complex> values() const { return values_; }

  std::size_t num_taus() const { return taus_.size(); }
  std::size_t num_freqs() const { return omegas_.size(); }

  const Complex& at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[index(i, j, k)];
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * taus_.size() + j) * omegas_.size() + k;
  }

  // Largest |f_ij - conj(f_ji)| and |Im f_ii| over the grid.
  double hermitian_defect() const;

  friend bool operator==(const SpectralMatrix&, const SpectralMatrix&) = default;

 private:
  QuantileGrid taus_;
  FrequencyGrid omegas_;
  std::vector<Complex> values_;
};

// Empirical CDF evaluated at the data: #{s : x_s <= x_t} / n.
std::vector<double> rank_transform(std::span<const double> values);

// d_{tau,n}(2 pi s / n) = sum_t 1{rank_t <= tau} exp(-i 2 pi s t / n), s = 0..n-1.
std::vector<Complex> clipped_dft(std::span<const double> ranks, double tau);

// I(2 pi s / n) = d1[s] conj(d2[s]) / (2 pi n).
std::vector<Complex> copula_periodogram(std::span<const Complex> d1, std::span<const Complex> d2);

struct EstimatorConfig {
  QuantileGrid taus;
  FrequencyGrid omegas;
  KernelSpec kernel;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

// Kernel-smoothed copula periodogram for series of one fixed length.
//
// The kernel weights W_n(omega_k - 2 pi s / n), s = 1..n-1, are tabulated once
// so repeated estimation (bootstrap replicates) only pays for the FFTs and the
// weighted sums.
class SmoothedEstimator {
 public:
  SmoothedEstimator(EstimatorConfig config, std::size_t n);

  const EstimatorConfig& config() const { return config_; }
  std::size_t length() const { return n_; }

  SpectralMatrix operator()(const TimeSeries& series) const;

 private:
  struct Weight {
    std::size_t s;
    double w;
  };

  EstimatorConfig config_;
  std::size_t n_;
  std::vector<std::vector<Weight>> weights_;  // per frequency
  std::vector<bool> real_axis_;               // omega == 0 mod pi
};

SpectralMatrix smoothed_estimate(const TimeSeries& series, const QuantileGrid& taus,
                                 const FrequencyGrid& omegas, const KernelSpec& kernel);

}  // namespace copspec
