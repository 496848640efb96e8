#include "copspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "copspec/error.hpp"

namespace copspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce to [-pi, pi).
double wrap_angle(double u) {
  double r = std::fmod(u + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

bool on_real_axis(double omega) {
  const double r = std::fmod(omega, kPi);
  return std::abs(r) < 1e-12 || std::abs(r - kPi) < 1e-12;
}

}  // namespace

KernelSpec::KernelSpec(double bandwidth, KernelKind kind) : kind_(kind), bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0 && bandwidth <= kPi)) {
    throw InvalidInput("kernel bandwidth must lie in (0, pi], got " + std::to_string(bandwidth));
  }
}

double KernelSpec::shape(double u) const {
  switch (kind_) {
    case KernelKind::Epanechnikov: {
      if (std::abs(u) > kPi) return 0.0;
      const double v = u / kPi;
      return 3.0 / (4.0 * kPi) * (1.0 - v * v);
    }
  }
  return 0.0;
}

double KernelSpec::squared_integral() const {
  auto integrand = [this](double u) {
    const double w = shape(u);
    return w * w;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, -kPi, kPi, 10,
                                                                        1e-14);
}

double periodized_kernel_weight(const KernelSpec& kernel, double u) {
  const double b = kernel.bandwidth();
  const double reduced = wrap_angle(u);
  double total = 0.0;
  for (int j = -2; j <= 2; ++j) {
    total += kernel.shape((reduced + kTwoPi * j) / b);
  }
  return total / b;
}

SpectralMatrix::SpectralMatrix(QuantileGrid taus, FrequencyGrid omegas, std::vector<Complex> values)
    : taus_(std::move(taus)), omegas_(std::move(omegas)), values_(std::move(values)) {
  if (values_.size() != taus_.size() * taus_.size() * omegas_.size()) {
    throw InvalidInput("spectral matrix payload has " + std::to_string(values_.size()) +
                       " entries, grids require " +
                       std::to_string(taus_.size() * taus_.size() * omegas_.size()));
  }
}

double SpectralMatrix::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < num_taus(); ++i) {
    for (std::size_t j = 0; j < num_taus(); ++j) {
      for (std::size_t k = 0; k < num_freqs(); ++k) {
        worst = std::max(worst, std::abs(at(i, j, k) - std::conj(at(j, i, k))));
      }
    }
    for (std::size_t k = 0; k < num_freqs(); ++k) {
      worst = std::max(worst, std::abs(at(i, i, k).imag()));
    }
  }
  return worst;
}

std::vector<double> rank_transform(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw InvalidInput("rank_transform: empty input");
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(values[t])) {
      throw InvalidInput("rank_transform: value at index " + std::to_string(t) + " is not finite");
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  const double dn = static_cast<double>(n);
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && values[order[end]] == values[order[begin]]) ++end;
    // Every member of the tie group has `end` observations <= it.
    const double rank = static_cast<double>(end) / dn;
    for (std::size_t m = begin; m < end; ++m) ranks[order[m]] = rank;
    begin = end;
  }
  return ranks;
}

std::vector<Complex> clipped_dft(std::span<const double> ranks, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw InvalidInput("clipped_dft: tau must lie in [0, 1]");
  }
  const std::size_t n = ranks.size();
  if (n == 0) throw InvalidInput("clipped_dft: empty rank sequence");

  std::vector<double> indicator(n);
  for (std::size_t t = 0; t < n; ++t) indicator[t] = ranks[t] <= tau ? 1.0 : 0.0;

  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, indicator);
  out.resize(n);

  // The input is real; make the conjugate symmetry exact.
  out[0] = Complex(out[0].real(), 0.0);
  for (std::size_t s = 1; s < n; ++s) {
    if (2 * s == n) {
      out[s] = Complex(out[s].real(), 0.0);
    } else if (2 * s > n) {
      out[s] = std::conj(out[n - s]);
    }
  }
  return out;
}

std::vector<Complex> copula_periodogram(std::span<const Complex> d1, std::span<const Complex> d2) {
  if (d1.size() != d2.size()) {
    throw InvalidInput("copula_periodogram: length mismatch (" + std::to_string(d1.size()) +
                       " vs " + std::to_string(d2.size()) + ")");
  }
  const double scale = 1.0 / (kTwoPi * static_cast<double>(d1.size()));
  std::vector<Complex> out(d1.size());
  for (std::size_t s = 0; s < d1.size(); ++s) out[s] = d1[s] * std::conj(d2[s]) * scale;
  return out;
}

SmoothedEstimator::SmoothedEstimator(EstimatorConfig config, std::size_t n)
    : config_(std::move(config)), n_(n) {
  if (n_ < TimeSeries::kMinLength) {
    throw InvalidInput("estimator length must be at least " +
                       std::to_string(TimeSeries::kMinLength));
  }
  const double dn = static_cast<double>(n_);
  weights_.resize(config_.omegas.size());
  real_axis_.resize(config_.omegas.size());
  for (std::size_t k = 0; k < config_.omegas.size(); ++k) {
    const double omega = config_.omegas[k];
    real_axis_[k] = on_real_axis(omega);
    for (std::size_t s = 1; s < n_; ++s) {
      const double w =
          periodized_kernel_weight(config_.kernel, omega - kTwoPi * static_cast<double>(s) / dn);
      if (w > 0.0) weights_[k].push_back({s, w});
    }
  }
}

SpectralMatrix SmoothedEstimator::operator()(const TimeSeries& series) const {
  if (series.size() != n_) {
    throw InvalidInput("estimator configured for n = " + std::to_string(n_) +
                       ", series has length " + std::to_string(series.size()));
  }
  const auto ranks = rank_transform(series.values());
  const std::size_t T = config_.taus.size();
  const std::size_t K = config_.omegas.size();

  std::vector<std::vector<Complex>> dft(T);
  for (std::size_t i = 0; i < T; ++i) dft[i] = clipped_dft(ranks, config_.taus[i]);

  // (2 pi / n) * sum_s W_n(.) * d_i conj(d_j) / (2 pi n)
  const double scale = 1.0 / (static_cast<double>(n_) * static_cast<double>(n_));

  std::vector<Complex> values(T * T * K);
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> Complex& {
    return values[(i * T + j) * K + k];
  };

  std::vector<double> re, im;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& wk = weights_[k];
    const std::size_t m = wk.size();
    re.assign(T * m, 0.0);
    im.assign(T * m, 0.0);
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t r = 0; r < m; ++r) {
        re[i * m + r] = dft[i][wk[r].s].real();
        im[i * m + r] = dft[i][wk[r].s].imag();
      }
    }
    for (std::size_t i = 0; i < T; ++i) {
      const double* ri = &re[i * m];
      const double* ii = &im[i * m];
      for (std::size_t j = 0; j <= i; ++j) {
        const double* rj = &re[j * m];
        const double* ij = &im[j * m];
        double sr = 0.0;
        double si = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          const double w = wk[r].w;
          // d_i * conj(d_j)
          sr += w * (ri[r] * rj[r] + ii[r] * ij[r]);
          si += w * (ii[r] * rj[r] - ri[r] * ij[r]);
        }
        if (i == j || real_axis_[k]) si = 0.0;
        const Complex v(sr * scale, si * scale);
        at(i, j, k) = v;
        at(j, i, k) = std::conj(v);
      }
    }
  }
  return SpectralMatrix(config_.taus, config_.omegas, std::move(values));
}

SpectralMatrix smoothed_estimate(const TimeSeries& series, const QuantileGrid& taus,
                                 const FrequencyGrid& omegas, const KernelSpec& kernel) {
  SmoothedEstimator estimator(EstimatorConfig{taus, omegas, kernel}, series.size());
  return estimator(series);
}

}  // namespace copspec
