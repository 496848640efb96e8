#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "copspec/types.hpp"

namespace copspec {

// X_t = a_1 X_{t-1} + ... + a_p X_{t-p} + Z_t
struct ArSpec {
  std::vector<double> coeffs;
  friend bool operator==(const ArSpec&, const ArSpec&) = default;
};

// X_t - sum a_j X_{t-j} = Z_t + sum b_i Z_{t-i}
struct ArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  friend bool operator==(const ArmaSpec&, const ArmaSpec&) = default;
};

// sigma_t^2 = omega0 + alpha X_{t-1}^2
struct Arch1Spec {
  double omega0;
  double alpha;
  friend bool operator==(const Arch1Spec&, const Arch1Spec&) = default;
};

// sigma_t^2 = omega0 + alpha X_{t-1}^2 + beta sigma_{t-1}^2
struct Garch11Spec {
  double omega0;
  double alpha;
  double beta;
  friend bool operator==(const Garch11Spec&, const Garch11Spec&) = default;
};

// ln sigma_t^2 = omega0 + alpha (|Z_{t-1}| - sqrt(2/pi)) + gamma Z_{t-1} + beta ln sigma_{t-1}^2
struct Egarch11Spec {
  double omega0;
  double alpha;
  double gamma;
  double beta;
  friend bool operator==(const Egarch11Spec&, const Egarch11Spec&) = default;
};

// All classes use i.i.d. N(0, 1) innovations Z_t; GARCH-type models emit X_t = sigma_t Z_t.
using ModelSpec = std::variant<ArSpec, ArmaSpec, Arch1Spec, Garch11Spec, Egarch11Spec>;

struct Admissibility {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

Admissibility check_admissible(const ModelSpec& spec);

bool is_linear(const ModelSpec& spec);
// AR specs are promoted to ARMA with an empty MA part.
ArmaSpec as_arma(const ModelSpec& spec);

// Canonical text form, e.g. "ar(0.5)", "arma(ar=[0.1],ma=[0.8])",
// "garch11(omega=0.01,alpha=0.4,beta=0.5)". Numbers use the shortest
// representation that round-trips exactly.
std::string to_string(const ModelSpec& spec);
ModelSpec parse_model_spec(std::string_view text);

std::string format_double(double x);

struct SimConfig {
  std::size_t n = 0;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
};

// Draws n observations from the stream (seed, replicate_index) after
// discarding burn_in steps. Throws InvalidInput for inadmissible specs.
TimeSeries simulate(const ModelSpec& spec, const SimConfig& config);

// Reciprocal roots of 1 - c_1 z - ... - c_p z^p (eigenvalues of the companion
// matrix). The polynomial has all roots outside the unit circle iff every
// reciprocal root has modulus < 1.
std::vector<std::complex<double>> reciprocal_roots(std::span<const double> c);
double spectral_radius(std::span<const double> c);

// Moves reciprocal roots with modulus >= 1 - 1e-10 radially to modulus
// 1 - 1e-6 and rebuilds the coefficients c of 1 - c_1 z - ... - c_p z^p.
std::vector<double> project_to_stationary(std::span<const double> c);

}  // namespace copspec
