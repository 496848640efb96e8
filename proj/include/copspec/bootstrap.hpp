#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "copspec/fit.hpp"
#include "copspec/spectra.hpp"

namespace copspec {

struct BootstrapEnsemble {
  FitResult fitted;
  EstimatorConfig config;
  std::uint64_t seed = 0;
  std::size_t series_length = 0;
  std::vector<SpectralMatrix> replicates;

  std::size_t size() const { return replicates.size(); }
};

// Fits the class once, then for r = 0..R-1 simulates n observations from the
// fitted model with stream (seed, r) and estimates its spectral matrix with
// `config`. Deterministic in its inputs for any thread count.
BootstrapEnsemble run_parametric_bootstrap(const TimeSeries& data, const ModelClass& cls,
                                           std::size_t R, const EstimatorConfig& config,
                                           std::uint64_t seed, unsigned threads = 0);

// Same loop starting from an existing fit.
BootstrapEnsemble bootstrap_from_fit(const FitResult& fitted, std::size_t n, std::size_t R,
                                     const EstimatorConfig& config, std::uint64_t seed,
                                     unsigned threads = 0);

// Quantile of a sorted sample by linear interpolation at position
// h = (R - 1) p + 1 (1-based). p = 0 gives the minimum, p = 1 the maximum.
double sample_quantile(std::span<const double> sorted, double p);

struct RegionBounds {
  double lo_re, hi_re, lo_im, hi_im;
};

// Pointwise bootstrap bands per (tau_i, tau_j, omega_k).
struct TypicalRegions {
  double alpha = 0.05;
  QuantileGrid taus;
  FrequencyGrid omegas;
  std::vector<RegionBounds> bounds;

  const RegionBounds& at(std::size_t i, std::size_t j, std::size_t k) const {
    return bounds[(i * taus.size() + j) * omegas.size() + k];
  }
};

TypicalRegions typical_regions(std::span<const SpectralMatrix> replicates, double alpha);
TypicalRegions typical_regions(const BootstrapEnsemble& ensemble, double alpha);

struct CoverageField {
  QuantileGrid taus;
  FrequencyGrid omegas;
  std::vector<std::uint8_t> re;
  std::vector<std::uint8_t> im;

  bool covered_re(std::size_t i, std::size_t j, std::size_t k) const {
    return re[(i * taus.size() + j) * omegas.size() + k] != 0;
  }
  bool covered_im(std::size_t i, std::size_t j, std::size_t k) const {
    return im[(i * taus.size() + j) * omegas.size() + k] != 0;
  }
};

// l <= value <= u, inclusive, separately for both parts.
CoverageField coverage_indicator(const SpectralMatrix& estimate, const TypicalRegions& regions);

struct PValueField {
  QuantileGrid taus;
  FrequencyGrid omegas;
  std::size_t replicates = 0;
  std::vector<double> p_re;
  std::vector<double> p_im;
  std::vector<std::int8_t> sign_re;
  std::vector<std::int8_t> sign_im;
  std::vector<double> p_min;  // per frequency
  std::vector<std::string> warnings;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * taus.size() + j) * omegas.size() + k;
  }
};

// #{r : stat_r >= e} / R for a sorted sample of replicate max-statistics.
double exceedance_pvalue(std::span<const double> sorted_stats, double e);

// Uniform-in-tau p-values: replicates are centred and scaled per cell by the
// beta/2 and 1 - beta/2 quantiles, A_r is the largest scaled deviation of
// replicate r over all cells and both parts, and the data's scaled deviation
// E is ranked against the A_r.
PValueField algorithm2_pvalues(std::span<const SpectralMatrix> replicates,
                               const SpectralMatrix& data_estimate, double beta = 0.1);
PValueField algorithm2_pvalues(const BootstrapEnsemble& ensemble,
                               const SpectralMatrix& data_estimate, double beta = 0.1);

struct CalibrationSetup {
  std::size_t n = 256;
  std::size_t R = 200;
  std::size_t reps = 200;
  double alpha = 0.05;
  double beta = 0.1;
  EstimatorConfig config{QuantileGrid::equally_spaced(19), FrequencyGrid::fourier_subgrid(64),
                         KernelSpec(0.1)};
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool pvalues = true;
};

struct CalibrationReport {
  QuantileGrid taus;
  FrequencyGrid omegas;
  std::size_t reps = 0;
  // Share of repetitions with the data estimate inside its typical region.
  std::vector<double> coverage_re;
  std::vector<double> coverage_im;
  // Share of repetitions with p_min(omega) <= alpha; empty when p-values are off.
  std::vector<double> rejection_rate;
  std::vector<std::vector<double>> p_min;  // per repetition

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * taus.size() + j) * omegas.size() + k;
  }
  // Binomial standard error of a rate over `reps` repetitions.
  double standard_error(double rate) const;
};

// Repeats simulate(truth) -> fit(cls) -> bootstrap -> coverage and p_min.
CalibrationReport self_calibration_check(const ModelSpec& truth, const ModelClass& cls,
                                         const CalibrationSetup& setup);

}  // namespace copspec
