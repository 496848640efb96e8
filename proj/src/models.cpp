#include "copspec/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

#include "copspec/error.hpp"
#include "copspec/rng.hpp"

namespace copspec {

namespace {

constexpr double kStationaryMargin = 1e-10;
constexpr double kGarchMargin = 1e-8;
constexpr double kCommonRootTol = 1e-6;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> negated(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x = -x;
  return out;
}

Admissibility check_linear(std::span<const double> ar, std::span<const double> ma) {
  for (double a : ar) {
    if (!std::isfinite(a)) return {false, "AR coefficient is not finite"};
  }
  for (double b : ma) {
    if (!std::isfinite(b)) return {false, "MA coefficient is not finite"};
  }
  const double radius = spectral_radius(ar);
  if (!(radius < 1.0 - kStationaryMargin)) {
    return {false, "AR polynomial has a root on or inside the unit circle (companion spectral "
                   "radius " + format_double(radius) + ")"};
  }
  if (!ma.empty() && !ar.empty()) {
    const auto p_roots = reciprocal_roots(ar);
    const auto mneg = negated(ma);
    const auto q_roots = reciprocal_roots(mneg);
    for (const auto& lp : p_roots) {
      if (std::abs(lp) < 1e-12) continue;
      for (const auto& lq : q_roots) {
        if (std::abs(lq) < 1e-12) continue;
        if (std::abs(lp - lq) < kCommonRootTol) {
          return {false, "AR and MA polynomials share a root"};
        }
      }
    }
  }
  return {};
}

Admissibility check_garch(double omega0, double alpha, double beta) {
  if (!std::isfinite(omega0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    return {false, "GARCH parameter is not finite"};
  }
  if (!(omega0 > 0.0)) return {false, "omega must be positive"};
  if (alpha < 0.0) return {false, "alpha must be non-negative"};
  if (beta < 0.0) return {false, "beta must be non-negative"};
  if (alpha + beta > 1.0 - kGarchMargin) return {false, "alpha + beta must be below 1"};
  return {};
}

// --- canonical text form -------------------------------------------------

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

struct Arg {
  std::string key;  // empty for positional
  std::vector<double> values;
  bool is_list = false;
};

double parse_number(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidInput("model spec: cannot parse number '" + std::string(s) + "' in '" +
                       std::string(context) + "'");
  }
  return x;
}

std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == ',' && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Arg parse_arg(std::string_view raw, std::string_view context) {
  Arg arg;
  std::string_view s = trim(raw);
  if (const auto eq = s.find('='); eq != std::string_view::npos) {
    arg.key = std::string(trim(s.substr(0, eq)));
    s = trim(s.substr(eq + 1));
  }
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw InvalidInput("model spec: unbalanced '[' in '" + std::string(context) + "'");
    arg.is_list = true;
    const auto inner = trim(s.substr(1, s.size() - 2));
    if (!inner.empty()) {
      for (auto piece : split_top_level(inner)) arg.values.push_back(parse_number(piece, context));
    }
  } else {
    arg.values.push_back(parse_number(s, context));
  }
  return arg;
}

// Resolves keyed or positional scalar arguments against `names`.
std::vector<double> scalar_args(const std::vector<Arg>& args, std::initializer_list<const char*> names,
                                std::string_view context) {
  std::vector<std::optional<double>> slots(names.size());
  std::size_t position = 0;
  for (const auto& a : args) {
    if (a.is_list || a.values.size() != 1) {
      throw InvalidInput("model spec: expected scalar arguments in '" + std::string(context) + "'");
    }
    std::size_t slot = position++;
    if (!a.key.empty()) {
      auto it = std::find_if(names.begin(), names.end(), [&](const char* n) { return a.key == n; });
      if (it == names.end()) {
        throw InvalidInput("model spec: unknown parameter '" + a.key + "' in '" +
                           std::string(context) + "'");
      }
      slot = static_cast<std::size_t>(it - names.begin());
    }
    if (slot >= slots.size()) {
      throw InvalidInput("model spec: too many arguments in '" + std::string(context) + "'");
    }
    slots[slot] = a.values[0];
  }
  std::vector<double> out;
  std::size_t idx = 0;
  for (const char* name : names) {
    if (!slots[idx]) {
      throw InvalidInput("model spec: missing parameter '" + std::string(name) + "' in '" +
                         std::string(context) + "'");
    }
    out.push_back(*slots[idx++]);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::vector<std::complex<double>> reciprocal_roots(std::span<const double> c) {
  const auto p = static_cast<Eigen::Index>(c.size());
  if (p == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = c[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < p; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

double spectral_radius(std::span<const double> c) {
  double r = 0.0;
  for (const auto& z : reciprocal_roots(c)) r = std::max(r, std::abs(z));
  return r;
}

std::vector<double> project_to_stationary(std::span<const double> c) {
  auto roots = reciprocal_roots(c);
  bool changed = false;
  for (auto& z : roots) {
    if (std::abs(z) >= 1.0 - kStationaryMargin) {
      z = z / std::abs(z) * (1.0 - 1e-6);
      changed = true;
    }
  }
  if (!changed) return {c.begin(), c.end()};
  // prod_k (1 - z_k x) = 1 - c_1 x - ... - c_p x^p
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& z : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= z * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) out[j] = -poly[j + 1].real();
  return out;
}

Admissibility check_admissible(const ModelSpec& spec) {
  return std::visit(
      Overloaded{
          [](const ArSpec& s) { return check_linear(s.coeffs, {}); },
          [](const ArmaSpec& s) { return check_linear(s.ar, s.ma); },
          [](const Arch1Spec& s) { return check_garch(s.omega0, s.alpha, 0.0); },
          [](const Garch11Spec& s) { return check_garch(s.omega0, s.alpha, s.beta); },
          [](const Egarch11Spec& s) -> Admissibility {
            if (!std::isfinite(s.omega0) || !std::isfinite(s.alpha) || !std::isfinite(s.gamma) ||
                !std::isfinite(s.beta)) {
              return {false, "EGARCH parameter is not finite"};
            }
            if (std::abs(s.beta) > 1.0 - kGarchMargin) return {false, "|beta| must be below 1"};
            return {};
          },
      },
      spec);
}

bool is_linear(const ModelSpec& spec) {
  return std::holds_alternative<ArSpec>(spec) || std::holds_alternative<ArmaSpec>(spec);
}

ArmaSpec as_arma(const ModelSpec& spec) {
  if (const auto* ar = std::get_if<ArSpec>(&spec)) return ArmaSpec{ar->coeffs, {}};
  if (const auto* arma = std::get_if<ArmaSpec>(&spec)) return *arma;
  throw UnsupportedModel("model " + to_string(spec) + " is not a linear ARMA model");
}

std::string to_string(const ModelSpec& spec) {
  return std::visit(
      Overloaded{
          [](const ArSpec& s) { return "ar(" + join(s.coeffs) + ")"; },
          [](const ArmaSpec& s) {
            return "arma(ar=[" + join(s.ar) + "],ma=[" + join(s.ma) + "])";
          },
          [](const Arch1Spec& s) {
            return "arch1(omega=" + format_double(s.omega0) + ",alpha=" + format_double(s.alpha) +
                   ")";
          },
          [](const Garch11Spec& s) {
            return "garch11(omega=" + format_double(s.omega0) +
                   ",alpha=" + format_double(s.alpha) + ",beta=" + format_double(s.beta) + ")";
          },
          [](const Egarch11Spec& s) {
            return "egarch11(omega=" + format_double(s.omega0) +
                   ",alpha=" + format_double(s.alpha) + ",gamma=" + format_double(s.gamma) +
                   ",beta=" + format_double(s.beta) + ")";
          },
      },
      spec);
}

ModelSpec parse_model_spec(std::string_view text) {
  const std::string_view s = trim(text);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw InvalidInput("model spec: expected name(args), got '" + std::string(text) + "'");
  }
  std::string name(trim(s.substr(0, open)));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  const auto body = trim(s.substr(open + 1, s.size() - open - 2));

  std::vector<Arg> args;
  if (!body.empty()) {
    for (auto piece : split_top_level(body)) args.push_back(parse_arg(piece, text));
  }

  if (name == "ar") {
    ArSpec out;
    for (const auto& a : args) {
      if (!a.key.empty()) throw InvalidInput("model spec: ar() takes positional coefficients");
      out.coeffs.insert(out.coeffs.end(), a.values.begin(), a.values.end());
    }
    return out;
  }
  if (name == "arma") {
    ArmaSpec out;
    for (const auto& a : args) {
      if (a.key == "ar") {
        out.ar = a.values;
      } else if (a.key == "ma") {
        out.ma = a.values;
      } else {
        throw InvalidInput("model spec: arma() takes ar=[...] and ma=[...]");
      }
    }
    return out;
  }
  if (name == "arch1") {
    const auto v = scalar_args(args, {"omega", "alpha"}, text);
    return Arch1Spec{v[0], v[1]};
  }
  if (name == "garch11") {
    const auto v = scalar_args(args, {"omega", "alpha", "beta"}, text);
    return Garch11Spec{v[0], v[1], v[2]};
  }
  if (name == "egarch11") {
    const auto v = scalar_args(args, {"omega", "alpha", "gamma", "beta"}, text);
    return Egarch11Spec{v[0], v[1], v[2], v[3]};
  }
  throw InvalidInput("model spec: unknown model '" + name + "'");
}

TimeSeries simulate(const ModelSpec& spec, const SimConfig& config) {
  if (const auto adm = check_admissible(spec); !adm) {
    throw InvalidInput("cannot simulate " + to_string(spec) + ": " + adm.message);
  }
  if (config.n < TimeSeries::kMinLength) {
    throw InvalidInput("simulation length must be at least " +
                       std::to_string(TimeSeries::kMinLength));
  }
  RandomStream stream = derive_stream(config.seed, config.replicate_index);
  const std::size_t total = config.n + config.burn_in;
  std::vector<double> x(total);

  auto run_linear = [&](const ArmaSpec& arma) {
    const std::size_t p = arma.ar.size();
    const std::size_t q = arma.ma.size();
    std::vector<double> z(total);
    for (std::size_t t = 0; t < total; ++t) {
      z[t] = stream.normal();
      double v = z[t];
      for (std::size_t j = 1; j <= p && j <= t; ++j) v += arma.ar[j - 1] * x[t - j];
      for (std::size_t i = 1; i <= q && i <= t; ++i) v += arma.ma[i - 1] * z[t - i];
      x[t] = v;
    }
  };
  auto run_garch = [&](const Garch11Spec& g) {
    const double denom = 1.0 - g.alpha - g.beta;
    double var = denom > 0.0 ? g.omega0 / denom : g.omega0;
    for (std::size_t t = 0; t < total; ++t) {
      if (t > 0) var = g.omega0 + g.alpha * x[t - 1] * x[t - 1] + g.beta * var;
      x[t] = std::sqrt(var) * stream.normal();
    }
  };

  std::visit(Overloaded{
                 [&](const ArSpec& s) { run_linear(as_arma(s)); },
                 [&](const ArmaSpec& s) { run_linear(s); },
                 // ARCH(1) is GARCH(1,1) with beta = 0.
                 [&](const Arch1Spec& s) { run_garch(Garch11Spec{s.omega0, s.alpha, 0.0}); },
                 [&](const Garch11Spec& s) { run_garch(s); },
                 [&](const Egarch11Spec& e) {
                   const double mean_abs = std::sqrt(2.0 / std::numbers::pi);
                   double log_var = e.omega0 / (1.0 - e.beta);
                   double z_prev = 0.0;
                   for (std::size_t t = 0; t < total; ++t) {
                     if (t > 0) {
                       log_var = e.omega0 + e.alpha * (std::abs(z_prev) - mean_abs) +
                                 e.gamma * z_prev + e.beta * log_var;
                     }
                     const double z = stream.normal();
                     x[t] = std::exp(0.5 * log_var) * z;
                     z_prev = z;
                   }
                 },
             },
             spec);

  std::vector<double> out(x.begin() + static_cast<std::ptrdiff_t>(config.burn_in), x.end());
  return TimeSeries(std::move(out), to_string(spec));
}

}  // namespace copspec
