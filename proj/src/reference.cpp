#include "copspec/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "copspec/error.hpp"

namespace copspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t table_index(std::size_t levels, int h, std::size_t i, std::size_t j) {
  return (static_cast<std::size_t>(h) * levels + i) * levels + j;
}

void require_matching_levels(const LagCopulaTable& table, const QuantileGrid& taus) {
  const auto levels = table.levels();
  if (levels.size() != taus.size()) throw InvalidInput("lag copula table levels differ from taus");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (std::abs(levels[i] - taus[i]) > 1e-12) {
      throw InvalidInput("lag copula table levels differ from taus");
    }
  }
}

// psi-weights of Q(z)/P(z) until they are negligible.
std::vector<double> psi_weights(const ArmaSpec& spec) {
  constexpr std::size_t kMaxTerms = 200000;
  std::vector<double> psi{1.0};
  std::size_t quiet = 0;
  for (std::size_t j = 1; j < kMaxTerms; ++j) {
    double v = j <= spec.ma.size() ? spec.ma[j - 1] : 0.0;
    for (std::size_t k = 1; k <= spec.ar.size() && k <= j; ++k) v += spec.ar[k - 1] * psi[j - k];
    psi.push_back(v);
    quiet = std::abs(v) < 1e-18 ? quiet + 1 : 0;
    if (j > spec.ma.size() && quiet > spec.ar.size() + 50) break;
  }
  return psi;
}

std::vector<double> autocorrelations_from_psi(const std::vector<double>& psi, std::size_t max_lag) {
  double g0 = 0.0;
  for (double v : psi) g0 += v * v;
  std::vector<double> rho(max_lag + 1, 0.0);
  for (std::size_t h = 0; h <= max_lag && h < psi.size(); ++h) {
    double s = 0.0;
    for (std::size_t j = 0; j + h < psi.size(); ++j) s += psi[j] * psi[j + h];
    rho[h] = s / g0;
  }
  rho[0] = 1.0;
  return rho;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("normal_quantile: p outside [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double bvn_cdf(double a, double b, double rho) {
  if (std::isnan(a) || std::isnan(b) || std::isnan(rho) || std::abs(rho) > 1.0) {
    throw InvalidInput("bvn_cdf: correlation must lie in [-1, 1]");
  }
  if (a == -std::numeric_limits<double>::infinity() ||
      b == -std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  if (a == std::numeric_limits<double>::infinity()) return normal_cdf(b);
  if (b == std::numeric_limits<double>::infinity()) return normal_cdf(a);
  if (rho == 1.0) return normal_cdf(std::min(a, b));
  if (rho == -1.0) return std::max(0.0, normal_cdf(a) - normal_cdf(-b));

  const double base = normal_cdf(a) * normal_cdf(b);
  if (rho == 0.0) return base;
  const double ab = a * b;
  const double ss = a * a + b * b;
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double c2 = 1.0 - s * s;
    if (c2 <= 0.0) return 0.0;
    return std::exp(-(ss - 2.0 * ab * s) / (2.0 * c2));
  };
  const double upper = std::asin(rho);
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, upper, 6,
                                                                    1e-13);
  return std::clamp(base + integral / kTwoPi, 0.0, 1.0);
}

LagCopulaTable::LagCopulaTable(std::vector<double> levels, int max_lag, std::vector<double> values)
    : levels_(std::move(levels)), max_lag_(max_lag), values_(std::move(values)) {
  if (max_lag_ < 0) throw InvalidInput("lag copula table: negative max lag");
  const std::size_t L = levels_.size();
  if (values_.size() != static_cast<std::size_t>(max_lag_ + 1) * L * L) {
    throw InvalidInput("lag copula table: payload size mismatch");
  }
}

double LagCopulaTable::operator()(int h, std::size_t i, std::size_t j) const {
  if (std::abs(h) > max_lag_) throw InvalidInput("lag copula table: lag out of range");
  if (h < 0) return values_[table_index(levels_.size(), -h, j, i)];
  return values_[table_index(levels_.size(), h, i, j)];
}

std::vector<double> arma_autocorrelations(const ArmaSpec& spec, std::size_t max_lag) {
  return autocorrelations_from_psi(psi_weights(spec), max_lag);
}

LagCopulaTable gaussian_lag_copula_table(const ArmaSpec& spec, std::span<const double> levels,
                                         int max_lag) {
  if (max_lag < 0) throw InvalidInput("negative max lag");
  const auto rho = arma_autocorrelations(spec, static_cast<std::size_t>(max_lag));
  const std::size_t L = levels.size();
  std::vector<double> q(L);
  for (std::size_t i = 0; i < L; ++i) q[i] = normal_quantile(levels[i]);

  std::vector<double> values(static_cast<std::size_t>(max_lag + 1) * L * L);
  for (int h = 0; h <= max_lag; ++h) {
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double c = h == 0 ? std::min(levels[i], levels[j])
                                : bvn_cdf(q[i], q[j], rho[static_cast<std::size_t>(h)]);
        values[table_index(L, h, i, j)] = c;
        values[table_index(L, h, j, i)] = c;
      }
    }
  }
  return LagCopulaTable({levels.begin(), levels.end()}, max_lag, std::move(values));
}

LagCopulaTable empirical_lag_copula_table(std::span<const double> ranks,
                                          std::span<const double> levels, int max_lag) {
  const std::size_t n = ranks.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
    throw InvalidInput("empirical lag copulas: max lag must be in [0, n)");
  }
  const std::size_t L = levels.size();
  std::vector<std::vector<std::uint8_t>> ind(L, std::vector<std::uint8_t>(n));
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t t = 0; t < n; ++t) ind[i][t] = ranks[t] <= levels[i] ? 1 : 0;
  }
  std::vector<double> values(static_cast<std::size_t>(max_lag + 1) * L * L);
  for (int h = 0; h <= max_lag; ++h) {
    const auto uh = static_cast<std::size_t>(h);
    const std::size_t pairs = n - uh;
    for (std::size_t i = 0; i < L; ++i) {
      const std::uint8_t* lead = ind[i].data() + uh;
      for (std::size_t j = 0; j < L; ++j) {
        const std::uint8_t* lag = ind[j].data();
        std::uint64_t count = 0;
        for (std::size_t t = 0; t < pairs; ++t) count += lead[t] & lag[t];
        values[table_index(L, h, i, j)] = static_cast<double>(count) / static_cast<double>(pairs);
      }
    }
  }
  return LagCopulaTable({levels.begin(), levels.end()}, max_lag, std::move(values));
}

SpectralMatrix copula_spectrum_from_table(const LagCopulaTable& table, const QuantileGrid& taus,
                                          const FrequencyGrid& omegas) {
  require_matching_levels(table, taus);
  const std::size_t T = taus.size();
  const std::size_t K = omegas.size();
  const int H = table.max_lag();
  std::vector<Complex> values(T * T * K);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const double indep = taus[i] * taus[j];
      for (std::size_t k = 0; k < K; ++k) {
        const double w = omegas[k];
        double re = table(0, i, j) - indep;
        double im = 0.0;
        for (int h = 1; h <= H; ++h) {
          const double forward = table(h, i, j) - indep;
          const double backward = table(-h, i, j) - indep;
          re += (forward + backward) * std::cos(h * w);
          im -= (forward - backward) * std::sin(h * w);
        }
        values[(i * T + j) * K + k] = Complex(re / kTwoPi, im / kTwoPi);
      }
    }
  }
  return SpectralMatrix(taus, omegas, std::move(values));
}

int gaussian_truncation_lag(const ArmaSpec& spec, int min_lag) {
  const auto psi = psi_weights(spec);
  const std::size_t horizon = std::max<std::size_t>(psi.size(), 64);
  const auto rho = autocorrelations_from_psi(psi, horizon);
  // tail[h] = sum_{h' > h} |rho_h'|
  std::vector<double> tail(rho.size() + 1, 0.0);
  for (std::size_t h = rho.size(); h-- > 0;) tail[h] = tail[h + 1] + (h + 1 < rho.size() ? std::abs(rho[h + 1]) : 0.0);
  std::size_t H = static_cast<std::size_t>(std::max(min_lag, 1));
  while (H + 1 < rho.size() && tail[H] / kPi >= 1e-8) ++H;
  return static_cast<int>(H);
}

SpectralMatrix gaussian_copula_spectrum(const ModelSpec& spec, const QuantileGrid& taus,
                                        const FrequencyGrid& omegas, int min_lag) {
  if (!is_linear(spec)) {
    throw UnsupportedModel("gaussian_copula_spectrum supports AR/ARMA only; got " +
                           to_string(spec) + " (use mc_copula_spectrum)");
  }
  if (const auto adm = check_admissible(spec); !adm) throw InvalidInput(adm.message);
  const ArmaSpec arma = as_arma(spec);
  const int H = gaussian_truncation_lag(arma, min_lag);
  const auto table = gaussian_lag_copula_table(arma, taus.levels(), H);
  return copula_spectrum_from_table(table, taus, omegas);
}

McSpectrum mc_copula_spectrum(const ModelSpec& spec, const QuantileGrid& taus,
                              const FrequencyGrid& omegas, int max_lag, std::size_t sim_length,
                              std::uint64_t seed) {
  constexpr std::size_t kSegments = 20;
  if (max_lag < 1) throw InvalidInput("mc_copula_spectrum: max lag must be >= 1");
  if (sim_length < 100 * static_cast<std::size_t>(max_lag)) {
    throw InvalidInput("mc_copula_spectrum: sim_length must be at least 100 H");
  }
  const auto path = simulate(spec, SimConfig{sim_length, 1000, seed, 0});
  const auto ranks = rank_transform(path.values());

  auto estimate = copula_spectrum_from_table(
      empirical_lag_copula_table(ranks, taus.levels(), max_lag), taus, omegas);

  const std::size_t seg_len = sim_length / kSegments;
  const std::size_t cells = estimate.values().size();
  std::vector<double> sum_re(cells, 0.0), sum_im(cells, 0.0), sq_re(cells, 0.0), sq_im(cells, 0.0);
  for (std::size_t s = 0; s < kSegments; ++s) {
    // Re-ranked per segment so each batch has exact uniform margins.
    const auto segment = rank_transform(path.values().subspan(s * seg_len, seg_len));
    const auto part = copula_spectrum_from_table(
        empirical_lag_copula_table(segment, taus.levels(), max_lag), taus, omegas);
    for (std::size_t c = 0; c < cells; ++c) {
      const auto v = part.values()[c];
      sum_re[c] += v.real();
      sum_im[c] += v.imag();
      sq_re[c] += v.real() * v.real();
      sq_im[c] += v.imag() * v.imag();
    }
  }
  const double m = static_cast<double>(kSegments);
  std::vector<Complex> se(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double var_re = std::max(0.0, (sq_re[c] - sum_re[c] * sum_re[c] / m) / (m - 1.0));
    const double var_im = std::max(0.0, (sq_im[c] - sum_im[c] * sum_im[c] / m) / (m - 1.0));
    se[c] = Complex(std::sqrt(var_re / m), std::sqrt(var_im / m));
  }
  return McSpectrum{std::move(estimate), SpectralMatrix(taus, omegas, std::move(se)), max_lag,
                    kSegments};
}

AsymptoticCov::AsymptoticCov(std::vector<TauPair> pairs, std::vector<std::complex<double>> cov,
                             std::vector<std::complex<double>> pseudo)
    : pairs_(std::move(pairs)), cov_(std::move(cov)), pseudo_(std::move(pseudo)) {}

std::complex<double> AsymptoticCov::covariance(std::size_t a, std::size_t b) const {
  return cov_[a * pairs_.size() + b];
}

double AsymptoticCov::real_variance(std::size_t a) const {
  return 0.5 * (covariance(a, a).real() + pseudo_[a].real());
}

double AsymptoticCov::imag_variance(std::size_t a) const {
  return 0.5 * (covariance(a, a).real() - pseudo_[a].real());
}

AsymptoticCov asymptotic_covariance(const SpectralMatrix& f_true, const KernelSpec& kernel,
                                    double omega, std::span<const TauPair> pairs) {
  const auto k = f_true.freq_grid().find(omega, 1e-10);
  if (!k) throw InvalidInput("asymptotic_covariance: frequency not on the grid");
  auto idx = [&](double tau) {
    const auto i = f_true.tau_grid().find(tau, 1e-10);
    if (!i) throw InvalidInput("asymptotic_covariance: tau " + format_double(tau) + " missing");
    return *i;
  };
  // f at +omega and -omega
  auto f_pos = [&](double u, double v) { return f_true.at(idx(u), idx(v), *k); };
  auto f_neg = [&](double u, double v) { return std::conj(f_pos(u, v)); };

  const double r = std::fmod(omega, kPi);
  const bool real_axis = std::abs(r) < 1e-10 || std::abs(r - kPi) < 1e-10;
  const double scale = kTwoPi * kernel.squared_integral();

  auto cov = [&](TauPair a, TauPair b) {
    std::complex<double> v = f_pos(a.tau1, b.tau1) * f_neg(a.tau2, b.tau2);
    if (real_axis) v += f_pos(a.tau1, b.tau2) * f_neg(a.tau2, b.tau1);
    return scale * v;
  };

  const std::size_t m = pairs.size();
  std::vector<std::complex<double>> c(m * m), pseudo(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) c[a * m + b] = cov(pairs[a], pairs[b]);
    pseudo[a] = cov(pairs[a], TauPair{pairs[a].tau2, pairs[a].tau1});
  }
  return AsymptoticCov({pairs.begin(), pairs.end()}, std::move(c), std::move(pseudo));
}

}  // namespace copspec
