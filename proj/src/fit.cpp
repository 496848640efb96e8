#include "copspec/fit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <tuple>

#include <Eigen/Dense>

#include "copspec/error.hpp"
#include "copspec/optim.hpp"

namespace copspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGarchScale = 1.0 - 1e-8;

std::vector<double> demeaned(std::span<const double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = x[t] - mean;
  return out;
}

// Biased sample autocovariances gamma(0..max_lag) of an already demeaned series.
std::vector<double> autocovariances(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t h = 0; h <= max_lag && h < n; ++h) {
    double s = 0.0;
    for (std::size_t t = h; t < n; ++t) s += x[t] * x[t - h];
    gamma[h] = s / static_cast<double>(n);
  }
  return gamma;
}

struct LevinsonResult {
  std::vector<double> coeffs;
  double innovation_variance;
};

LevinsonResult levinson_durbin(std::span<const double> gamma, std::size_t p) {
  std::vector<double> phi(p, 0.0), prev(p, 0.0);
  double v = gamma[0];
  for (std::size_t k = 1; k <= p; ++k) {
    double acc = gamma[k];
    for (std::size_t j = 1; j < k; ++j) acc -= prev[j - 1] * gamma[k - j];
    const double reflection = acc / v;
    phi[k - 1] = reflection;
    for (std::size_t j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - reflection * prev[k - j - 1];
    v *= (1.0 - reflection * reflection);
    prev = phi;
  }
  return {phi, v};
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

std::vector<double> negated(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x = -x;
  return out;
}

// MA polynomial 1 + b_1 z + ... has reciprocal roots of 1 - (-b_1) z - ...
std::vector<double> project_invertible(std::span<const double> ma) {
  return negated(project_to_stationary(negated(ma)));
}

double sample_variance(std::span<const double> x) {
  const auto d = demeaned(x);
  double s = 0.0;
  for (double v : d) s += v * v;
  return s / static_cast<double>(d.size());
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

std::string to_string(const ModelClass& cls) {
  switch (cls.family) {
    case ModelFamily::Ar:
      return "ar(" + std::to_string(cls.p) + ")";
    case ModelFamily::Arma:
      return "arma(" + std::to_string(cls.p) + "," + std::to_string(cls.q) + ")";
    case ModelFamily::Arch1:
      return "arch1";
    case ModelFamily::Garch11:
      return "garch11";
    case ModelFamily::Egarch11:
      return "egarch11";
  }
  return "unknown";
}

ModelClass parse_model_class(std::string_view name, int p, int q) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (p < 0 || q < 0) throw InvalidInput("model orders must be non-negative");
  if (lower == "ar") return {ModelFamily::Ar, p, 0};
  if (lower == "arma") return {ModelFamily::Arma, p, q};
  if (lower == "arch1" || lower == "arch") return {ModelFamily::Arch1, 0, 0};
  if (lower == "garch11" || lower == "garch") return {ModelFamily::Garch11, 0, 0};
  if (lower == "egarch11" || lower == "egarch") return {ModelFamily::Egarch11, 0, 0};
  throw InvalidInput("unknown model class '" + std::string(name) + "'");
}

std::string to_string(const FitResult& fit) {
  return to_string(fit.spec) + " objective=" + format_double(fit.objective_value) +
         " converged=" + (fit.converged ? "1" : "0") +
         " iterations=" + std::to_string(fit.iterations);
}

FitResult fit_ar(const TimeSeries& series, int p) {
  if (p < 0) throw InvalidInput("fit_ar: negative order");
  const auto n = series.size();
  if (!(n > 10 * static_cast<std::size_t>(p))) {
    throw InvalidInput("fit_ar: need n > 10 p (n = " + std::to_string(n) +
                       ", p = " + std::to_string(p) + ")");
  }
  if (is_constant(series.values())) throw FitError("fit_ar: series is constant");

  const auto x = demeaned(series.values());
  const auto gamma = autocovariances(x, static_cast<std::size_t>(p));
  auto lev = levinson_durbin(gamma, static_cast<std::size_t>(p));
  ArSpec spec{std::move(lev.coeffs)};
  if (!check_admissible(spec)) spec.coeffs = project_to_stationary(spec.coeffs);
  return FitResult{spec, lev.innovation_variance, true, 0};
}

double css_objective(std::span<const double> x, std::span<const double> ar,
                     std::span<const double> ma) {
  const std::size_t n = x.size();
  const std::size_t p = ar.size();
  const std::size_t q = ma.size();
  if (n <= p) return kInf;
  std::vector<double> e(n, 0.0);
  double ss = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double v = x[t];
    for (std::size_t j = 1; j <= p; ++j) v -= ar[j - 1] * x[t - j];
    for (std::size_t i = 1; i <= q && i <= t; ++i) v -= ma[i - 1] * e[t - i];
    e[t] = v;
    ss += v * v;
  }
  return ss / static_cast<double>(n - p);
}

FitResult fit_arma(const TimeSeries& series, int p, int q, const ArmaFitOptions& options) {
  if (p < 0 || q < 0) throw InvalidInput("fit_arma: negative order");
  const auto n = series.size();
  if (!(n > 10 * static_cast<std::size_t>(p + q))) {
    throw InvalidInput("fit_arma: need n > 10 (p + q)");
  }
  if (is_constant(series.values())) throw FitError("fit_arma: series is constant");
  const auto x = demeaned(series.values());
  const auto up = static_cast<std::size_t>(p);
  const auto uq = static_cast<std::size_t>(q);

  std::vector<double> ar, ma;
  if (q == 0) {
    ar = std::get<ArSpec>(fit_ar(series, p).spec).coeffs;
  } else {
    // Stage 1: long autoregression residuals.
    const double logn = std::log(static_cast<double>(n));
    std::size_t m = static_cast<std::size_t>(std::ceil(logn * logn));
    m = std::max<std::size_t>(std::min(m, n / 10), std::max(up, uq) + 1);
    const auto gamma = autocovariances(x, m);
    const auto long_ar = levinson_durbin(gamma, m).coeffs;
    std::vector<double> resid(n, 0.0);
    for (std::size_t t = m; t < n; ++t) {
      double v = x[t];
      for (std::size_t j = 1; j <= m; ++j) v -= long_ar[j - 1] * x[t - j];
      resid[t] = v;
    }
    // Stage 2: regress x_t on its own lags and lagged residuals.
    const std::size_t start = m + std::max(up, uq);
    const auto rows = static_cast<Eigen::Index>(n - start);
    const auto cols = static_cast<Eigen::Index>(up + uq);
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (std::size_t t = start; t < n; ++t) {
      const auto r = static_cast<Eigen::Index>(t - start);
      target(r) = x[t];
      for (std::size_t j = 1; j <= up; ++j) design(r, static_cast<Eigen::Index>(j - 1)) = x[t - j];
      for (std::size_t i = 1; i <= uq; ++i) {
        design(r, static_cast<Eigen::Index>(up + i - 1)) = resid[t - i];
      }
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    for (std::size_t j = 0; j < up; ++j) ar.push_back(beta(static_cast<Eigen::Index>(j)));
    for (std::size_t i = 0; i < uq; ++i) ma.push_back(beta(static_cast<Eigen::Index>(up + i)));
  }
  ar = project_to_stationary(ar);
  ma = project_invertible(ma);

  FitResult result{ArmaSpec{ar, ma}, css_objective(x, ar, ma), true, 0};
  if (options.css_refine && p + q > 0) {
    std::vector<double> start(ar);
    start.insert(start.end(), ma.begin(), ma.end());
    auto objective = [&](std::span<const double> theta) {
      const auto a = theta.subspan(0, up);
      const auto b = theta.subspan(up, uq);
      if (!(spectral_radius(a) < 1.0 - 1e-10)) return kInf;
      if (!(spectral_radius(negated(b)) < 1.0 - 1e-10)) return kInf;
      return css_objective(x, a, b);
    };
    NelderMeadOptions nm;
    nm.tolerance = options.tolerance;
    nm.max_iterations = options.max_iterations;
    const auto opt = nelder_mead(objective, start, nm);
    if (opt.value <= result.objective_value) {
      ArmaSpec refined{{opt.argmin.begin(), opt.argmin.begin() + p},
                       {opt.argmin.begin() + p, opt.argmin.end()}};
      result = FitResult{refined, opt.value, opt.converged, opt.iterations};
    }
  }
  auto& spec = std::get<ArmaSpec>(result.spec);
  if (!check_admissible(result.spec)) {
    spec.ar = project_to_stationary(spec.ar);
    // Cancel a shared AR/MA root by shrinking the MA part slightly.
    for (int guard = 0; guard < 8 && !check_admissible(result.spec); ++guard) {
      for (auto& b : spec.ma) b *= (1.0 - 1e-4);
    }
    result.objective_value = css_objective(x, spec.ar, spec.ma);
  }
  return result;
}

double garch_objective(const ModelSpec& spec, std::span<const double> x, double initial_variance) {
  double total = 0.0;
  if (const auto* e = std::get_if<Egarch11Spec>(&spec)) {
    const double mean_abs = std::sqrt(2.0 / std::numbers::pi);
    double log_var = std::log(initial_variance);
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (t > 0) {
        const double z_prev = x[t - 1] * std::exp(-0.5 * log_var);
        log_var = e->omega0 + e->alpha * (std::abs(z_prev) - mean_abs) + e->gamma * z_prev +
                  e->beta * log_var;
        if (!std::isfinite(log_var) || std::abs(log_var) > 700.0) return kInf;
      }
      total += log_var + x[t] * x[t] * std::exp(-log_var);
    }
    return 0.5 * total;
  }
  double omega0 = 0.0, alpha = 0.0, beta = 0.0;
  if (const auto* a = std::get_if<Arch1Spec>(&spec)) {
    omega0 = a->omega0;
    alpha = a->alpha;
  } else if (const auto* g = std::get_if<Garch11Spec>(&spec)) {
    omega0 = g->omega0;
    alpha = g->alpha;
    beta = g->beta;
  } else {
    throw UnsupportedModel("garch_objective: not a GARCH-family model");
  }
  double var = initial_variance;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (t > 0) var = omega0 + alpha * x[t - 1] * x[t - 1] + beta * var;
    if (!(var > 0.0) || !std::isfinite(var)) return kInf;
    total += std::log(var) + x[t] * x[t] / var;
  }
  return 0.5 * total;
}

std::vector<double> garch_to_unconstrained(const ModelSpec& spec) {
  if (const auto* a = std::get_if<Arch1Spec>(&spec)) {
    return {std::log(a->omega0), logit(a->alpha / kGarchScale)};
  }
  if (const auto* g = std::get_if<Garch11Spec>(&spec)) {
    const double a = g->alpha / kGarchScale;
    const double b = g->beta / kGarchScale;
    const double rest = 1.0 - a - b;
    return {std::log(g->omega0), std::log(a / rest), std::log(b / rest)};
  }
  if (const auto* e = std::get_if<Egarch11Spec>(&spec)) {
    return {e->omega0, e->alpha, e->gamma, std::atanh(e->beta / kGarchScale)};
  }
  throw UnsupportedModel("garch_to_unconstrained: not a GARCH-family model");
}

ModelSpec garch_from_unconstrained(GarchVariant variant, std::span<const double> u) {
  switch (variant) {
    case GarchVariant::Arch1:
      return Arch1Spec{std::exp(u[0]), kGarchScale * logistic(u[1])};
    case GarchVariant::Garch11: {
      const double e1 = std::exp(u[1]);
      const double e2 = std::exp(u[2]);
      const double denom = 1.0 + e1 + e2;
      return Garch11Spec{std::exp(u[0]), kGarchScale * e1 / denom, kGarchScale * e2 / denom};
    }
    case GarchVariant::Egarch11:
      return Egarch11Spec{u[0], u[1], u[2], kGarchScale * std::tanh(u[3])};
  }
  throw InvalidInput("unknown GARCH variant");
}

FitResult fit_garch(const TimeSeries& series, GarchVariant variant) {
  if (series.size() < 200) {
    throw InvalidInput("fit_garch: need at least 200 observations, got " +
                       std::to_string(series.size()));
  }
  if (is_constant(series.values())) throw FitError("fit_garch: series is constant");
  const auto x = series.values();
  const double var0 = sample_variance(x);

  // Variance-targeted start plus two fixed perturbations.
  std::vector<ModelSpec> starts;
  switch (variant) {
    case GarchVariant::Arch1:
      for (double a : {0.2, 0.05, 0.5}) starts.push_back(Arch1Spec{var0 * (1.0 - a), a});
      break;
    case GarchVariant::Garch11:
      for (auto [a, b] : {std::pair{0.1, 0.8}, std::pair{0.05, 0.9}, std::pair{0.3, 0.6}}) {
        starts.push_back(Garch11Spec{var0 * (1.0 - a - b), a, b});
      }
      break;
    case GarchVariant::Egarch11:
      for (auto [a, g, b] : {std::tuple{0.1, 0.0, 0.9}, std::tuple{0.2, -0.1, 0.7},
                             std::tuple{0.05, 0.05, 0.95}}) {
        starts.push_back(Egarch11Spec{std::log(var0) * (1.0 - b), a, g, b});
      }
      break;
  }

  auto objective = [&](std::span<const double> u) {
    return garch_objective(garch_from_unconstrained(variant, u), x, var0);
  };

  NelderMeadOptions nm;
  nm.tolerance = 1e-8;
  nm.max_iterations = 2000;
  std::optional<NelderMeadResult> best;
  std::string diagnostics;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      auto r = nelder_mead(objective, garch_to_unconstrained(starts[i]), nm);
      if (std::isfinite(r.value) && (!best || r.value < best->value)) best = std::move(r);
    } catch (const NumericalError& err) {
      diagnostics += " start " + std::to_string(i) + ": " + err.what() + ";";
    }
  }
  if (!best) throw FitError("fit_garch: all starts diverged;" + diagnostics);
  return FitResult{garch_from_unconstrained(variant, best->argmin), best->value, best->converged,
                   best->iterations};
}

FitResult fit_model(const TimeSeries& series, const ModelClass& cls) {
  switch (cls.family) {
    case ModelFamily::Ar:
      return fit_ar(series, cls.p);
    case ModelFamily::Arma:
      return fit_arma(series, cls.p, cls.q);
    case ModelFamily::Arch1:
      return fit_garch(series, GarchVariant::Arch1);
    case ModelFamily::Garch11:
      return fit_garch(series, GarchVariant::Garch11);
    case ModelFamily::Egarch11:
      return fit_garch(series, GarchVariant::Egarch11);
  }
  throw InvalidInput("unknown model class");
}

}  // namespace copspec
