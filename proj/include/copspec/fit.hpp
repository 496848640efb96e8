#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copspec/models.hpp"
#include "copspec/types.hpp"

namespace copspec {

enum class ModelFamily { Ar, Arma, Arch1, Garch11, Egarch11 };

// A candidate parametric class: family plus orders for the linear families.
struct ModelClass {
  ModelFamily family = ModelFamily::Ar;
  int p = 0;
  int q = 0;

  friend bool operator==(const ModelClass&, const ModelClass&) = default;
};

std::string to_string(const ModelClass& cls);
// Names: ar, arma, arch1, garch11, egarch11 (case-insensitive).
ModelClass parse_model_class(std::string_view name, int p = 0, int q = 0);

struct FitResult {
  ModelSpec spec;
  // Negative Gaussian quasi-log-likelihood (GARCH family) or residual
  // variance (linear families).
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// "garch11(omega=...,alpha=...,beta=...) objective=... converged=1 iterations=..."
std::string to_string(const FitResult& fit);

// Yule-Walker via Levinson-Durbin on the biased autocovariances of the
// demeaned series. Requires n > 10 p.
FitResult fit_ar(const TimeSeries& series, int p);

struct ArmaFitOptions {
  bool css_refine = true;
  double tolerance = 1e-8;
  int max_iterations = 2000;
};

// Hannan-Rissanen start (long-AR residual proxy, then least squares),
// refined by conditional sum of squares. For q = 0 the start is the
// Yule-Walker solution. Requires n > 10 (p + q).
FitResult fit_arma(const TimeSeries& series, int p, int q, const ArmaFitOptions& options = {});

// Conditional sum of squares objective: mean of e_t^2 over t >= p, where
// e_t = x_t - sum a_j x_{t-j} - sum b_i e_{t-i} on the demeaned series.
double css_objective(std::span<const double> demeaned, std::span<const double> ar,
                     std::span<const double> ma);

enum class GarchVariant { Arch1, Garch11, Egarch11 };

// Gaussian QMLE by Nelder-Mead over an unconstrained reparameterization,
// three starts. Requires n >= 200 and a non-constant series.
FitResult fit_garch(const TimeSeries& series, GarchVariant variant);

// (1/2) sum_t [ln sigma_t^2 + x_t^2 / sigma_t^2] with sigma_0^2 = initial_variance.
double garch_objective(const ModelSpec& spec, std::span<const double> x, double initial_variance);

// Bijection between the admissible GARCH-family parameter sets and R^d.
std::vector<double> garch_to_unconstrained(const ModelSpec& spec);
ModelSpec garch_from_unconstrained(GarchVariant variant, std::span<const double> u);

FitResult fit_model(const TimeSeries& series, const ModelClass& cls);

}  // namespace copspec
