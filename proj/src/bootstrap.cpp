#include "copspec/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copspec/error.hpp"
#include "copspec/models.hpp"
#include "copspec/parallel.hpp"
#include "copspec/rng.hpp"

namespace copspec {

namespace {

constexpr double kImagGuard = 1e-6;
constexpr double kRealFloor = 1e-12;

void require_replicates(std::span<const SpectralMatrix> replicates) {
  if (replicates.size() < 2) throw InvalidInput("need at least two bootstrap replicates");
  const auto& first = replicates.front();
  for (const auto& r : replicates) {
    if (!(r.tau_grid() == first.tau_grid()) || !(r.freq_grid() == first.freq_grid())) {
      throw InvalidInput("bootstrap replicates do not share grids");
    }
  }
}

void require_same_grids(const SpectralMatrix& a, const QuantileGrid& taus,
                        const FrequencyGrid& omegas) {
  if (!(a.tau_grid() == taus) || !(a.freq_grid() == omegas)) {
    throw InvalidInput("estimate grids do not match the bootstrap grids");
  }
}

}  // namespace

BootstrapEnsemble bootstrap_from_fit(const FitResult& fitted, std::size_t n, std::size_t R,
                                     const EstimatorConfig& config, std::uint64_t seed,
                                     unsigned threads) {
  if (R < 2) throw InvalidInput("bootstrap needs R >= 2");
  const SmoothedEstimator estimator(config, n);
  BootstrapEnsemble ensemble{fitted, config, seed, n, {}};
  std::vector<std::optional<SpectralMatrix>> slots(R);
  parallel_for(R, threads, [&](std::size_t r) {
    try {
      const auto path = simulate(fitted.spec, SimConfig{n, 1000, seed, r});
      slots[r].emplace(estimator(path));
    } catch (const std::exception& e) {
      throw NumericalError("bootstrap replicate " + std::to_string(r) + " failed: " + e.what());
    }
  });
  ensemble.replicates.reserve(R);
  for (auto& s : slots) ensemble.replicates.push_back(std::move(*s));
  return ensemble;
}

BootstrapEnsemble run_parametric_bootstrap(const TimeSeries& data, const ModelClass& cls,
                                           std::size_t R, const EstimatorConfig& config,
                                           std::uint64_t seed, unsigned threads) {
  if (R < 2) throw InvalidInput("bootstrap needs R >= 2");
  const FitResult fitted = fit_model(data, cls);
  return bootstrap_from_fit(fitted, data.size(), R, config, seed, threads);
}

double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidInput("sample_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("sample_quantile: p outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;  // 0-based position
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TypicalRegions typical_regions(std::span<const SpectralMatrix> replicates, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  require_replicates(replicates);
  const auto& first = replicates.front();
  const std::size_t cells = first.values().size();
  const std::size_t R = replicates.size();

  TypicalRegions out{alpha, first.tau_grid(), first.freq_grid(), std::vector<RegionBounds>(cells)};
  std::vector<double> re(R), im(R);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t r = 0; r < R; ++r) {
      re[r] = replicates[r].values()[c].real();
      im[r] = replicates[r].values()[c].imag();
    }
    std::sort(re.begin(), re.end());
    std::sort(im.begin(), im.end());
    out.bounds[c] = RegionBounds{sample_quantile(re, alpha / 2), sample_quantile(re, 1 - alpha / 2),
                                 sample_quantile(im, alpha / 2), sample_quantile(im, 1 - alpha / 2)};
  }
  return out;
}

TypicalRegions typical_regions(const BootstrapEnsemble& ensemble, double alpha) {
  return typical_regions(std::span<const SpectralMatrix>(ensemble.replicates), alpha);
}

CoverageField coverage_indicator(const SpectralMatrix& estimate, const TypicalRegions& regions) {
  require_same_grids(estimate, regions.taus, regions.omegas);
  const std::size_t cells = estimate.values().size();
  CoverageField out{regions.taus, regions.omegas, std::vector<std::uint8_t>(cells),
                    std::vector<std::uint8_t>(cells)};
  for (std::size_t c = 0; c < cells; ++c) {
    const auto v = estimate.values()[c];
    const auto& b = regions.bounds[c];
    out.re[c] = b.lo_re <= v.real() && v.real() <= b.hi_re;
    out.im[c] = b.lo_im <= v.imag() && v.imag() <= b.hi_im;
  }
  return out;
}

double exceedance_pvalue(std::span<const double> sorted_stats, double e) {
  if (sorted_stats.empty()) throw InvalidInput("exceedance_pvalue: empty sample");
  const auto first = std::lower_bound(sorted_stats.begin(), sorted_stats.end(), e);
  const auto count = static_cast<double>(sorted_stats.end() - first);
  return count / static_cast<double>(sorted_stats.size());
}

PValueField algorithm2_pvalues(std::span<const SpectralMatrix> replicates,
                               const SpectralMatrix& data, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("beta must lie in (0, 1)");
  require_replicates(replicates);
  const auto& taus = replicates.front().tau_grid();
  const auto& omegas = replicates.front().freq_grid();
  require_same_grids(data, taus, omegas);

  const std::size_t T = taus.size();
  const std::size_t K = omegas.size();
  const std::size_t R = replicates.size();
  const std::size_t cells = T * T * K;

  PValueField out{taus, omegas, R, std::vector<double>(cells), std::vector<double>(cells),
                  std::vector<std::int8_t>(cells), std::vector<std::int8_t>(cells),
                  std::vector<double>(K), {}};

  std::vector<double> center_re(T * T), center_im(T * T), half_re(T * T), half_im(T * T);
  std::vector<double> re(R), im(R), a_re(R), a_im(R), stats(R);
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t floored = 0;
    for (std::size_t ij = 0; ij < T * T; ++ij) {
      const std::size_t c = ij * K + k;
      for (std::size_t r = 0; r < R; ++r) {
        re[r] = replicates[r].values()[c].real();
        im[r] = replicates[r].values()[c].imag();
      }
      std::sort(re.begin(), re.end());
      std::sort(im.begin(), im.end());
      const double l_re = sample_quantile(re, beta / 2), u_re = sample_quantile(re, 1 - beta / 2);
      const double l_im = sample_quantile(im, beta / 2), u_im = sample_quantile(im, 1 - beta / 2);
      center_re[ij] = 0.5 * (u_re + l_re);
      center_im[ij] = 0.5 * (u_im + l_im);
      half_re[ij] = 0.5 * (u_re - l_re);
      half_im[ij] = 0.5 * (u_im - l_im) + (u_im == l_im ? kImagGuard : 0.0);
      if (!(half_re[ij] >= kRealFloor)) {
        half_re[ij] = kRealFloor;
        ++floored;
      }
    }
    if (floored > 0) {
      out.warnings.push_back("omega index " + std::to_string(k) + ": " + std::to_string(floored) +
                             " real-part scale(s) were zero and clamped to 1e-12");
    }

    std::fill(a_re.begin(), a_re.end(), 0.0);
    std::fill(a_im.begin(), a_im.end(), 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      const auto vals = replicates[r].values();
      for (std::size_t ij = 0; ij < T * T; ++ij) {
        const auto v = vals[ij * K + k];
        a_re[r] = std::max(a_re[r], std::abs(v.real() - center_re[ij]) / half_re[ij]);
        a_im[r] = std::max(a_im[r], std::abs(v.imag() - center_im[ij]) / half_im[ij]);
      }
      stats[r] = std::max(a_re[r], a_im[r]);
    }
    std::sort(stats.begin(), stats.end());

    double p_min = 1.0;
    for (std::size_t ij = 0; ij < T * T; ++ij) {
      const std::size_t c = ij * K + k;
      const auto v = data.values()[c];
      const double dev_re = v.real() - center_re[ij];
      const double dev_im = v.imag() - center_im[ij];
      out.p_re[c] = exceedance_pvalue(stats, std::abs(dev_re) / half_re[ij]);
      out.p_im[c] = exceedance_pvalue(stats, std::abs(dev_im) / half_im[ij]);
      out.sign_re[c] = dev_re >= 0.0 ? 1 : -1;
      out.sign_im[c] = dev_im >= 0.0 ? 1 : -1;
      p_min = std::min({p_min, out.p_re[c], out.p_im[c]});
    }
    out.p_min[k] = p_min;
  }
  return out;
}

PValueField algorithm2_pvalues(const BootstrapEnsemble& ensemble, const SpectralMatrix& data,
                               double beta) {
  return algorithm2_pvalues(std::span<const SpectralMatrix>(ensemble.replicates), data, beta);
}

double CalibrationReport::standard_error(double rate) const {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

CalibrationReport self_calibration_check(const ModelSpec& truth, const ModelClass& cls,
                                         const CalibrationSetup& setup) {
  if (const auto adm = check_admissible(truth); !adm) {
    throw InvalidInput("calibration truth is inadmissible: " + adm.message);
  }
  if (setup.reps == 0) throw InvalidInput("calibration needs at least one repetition");
  const auto& cfg = setup.config;
  const std::size_t cells = cfg.taus.size() * cfg.taus.size() * cfg.omegas.size();
  const std::size_t K = cfg.omegas.size();
  const SmoothedEstimator estimator(cfg, setup.n);

  struct RepOutcome {
    std::vector<std::uint8_t> re, im;
    std::vector<double> p_min;
  };
  std::vector<RepOutcome> outcomes(setup.reps);

  parallel_for(setup.reps, setup.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(setup.seed, rep);
    const auto data = simulate(truth, SimConfig{setup.n, 1000, derive_seed(rep_seed, 0), 0});
    const auto fitted = fit_model(data, cls);
    const auto ensemble =
        bootstrap_from_fit(fitted, setup.n, setup.R, cfg, derive_seed(rep_seed, 1), 1);
    const auto estimate = estimator(data);
    auto cov = coverage_indicator(estimate, typical_regions(ensemble, setup.alpha));
    RepOutcome outcome{std::move(cov.re), std::move(cov.im), {}};
    if (setup.pvalues) outcome.p_min = algorithm2_pvalues(ensemble, estimate, setup.beta).p_min;
    outcomes[rep] = std::move(outcome);
  });

  CalibrationReport report{cfg.taus, cfg.omegas, setup.reps, std::vector<double>(cells, 0.0),
                           std::vector<double>(cells, 0.0), {}, {}};
  if (setup.pvalues) report.rejection_rate.assign(K, 0.0);
  const double reps = static_cast<double>(setup.reps);
  for (auto& o : outcomes) {
    for (std::size_t c = 0; c < cells; ++c) {
      report.coverage_re[c] += o.re[c];
      report.coverage_im[c] += o.im[c];
    }
    for (std::size_t k = 0; k < o.p_min.size(); ++k) {
      if (o.p_min[k] <= setup.alpha) report.rejection_rate[k] += 1.0;
    }
    report.p_min.push_back(std::move(o.p_min));
  }
  for (auto& v : report.coverage_re) v /= reps;
  for (auto& v : report.coverage_im) v /= reps;
  for (auto& v : report.rejection_rate) v /= reps;
  return report;
}

}  // namespace copspec
