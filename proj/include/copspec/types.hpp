#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace copspec {

// Finite real-valued observations X_0..X_{n-1}. Construction enforces n >= 8
// and finiteness of every value.
class TimeSeries {
 public:
  static constexpr std::size_t kMinLength = 8;

  explicit TimeSeries(std::vector<double> values, std::string label = {});

  std::span<const double> values() const { return values_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t t) const { return values_[t]; }

 private:
  std::vector<double> values_;
  std::string label_;
};

// Strictly increasing quantile levels in the open interval (0, 1).
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<double> levels);

  // {1/(K+1), ..., K/(K+1)}; K = 19 gives {0.05, ..., 0.95}.
  static QuantileGrid equally_spaced(std::size_t count);
  // {0.1, 0.5, 0.9}, the levels of the 3x3 panel plots.
  static QuantileGrid panel_levels();

  std::span<const double> levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }

  // Index of a level equal to `tau` within `tol`, if present.
  std::optional<std::size_t> find(double tau, double tol = 1e-12) const;

  friend bool operator==(const QuantileGrid&, const QuantileGrid&) = default;

 private:
  std::vector<double> levels_;
};

// Non-decreasing frequencies in [0, pi], radians per time step.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> omegas);

  // {2 pi j / denominator : j = 0..denominator/2}.
  static FrequencyGrid fourier_subgrid(std::size_t denominator = 64);

  std::span<const double> omegas() const { return omegas_; }
  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t k) const { return omegas_[k]; }

  std::optional<std::size_t> find(double omega, double tol = 1e-12) const;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  std::vector<double> omegas_;
};

}  // namespace copspec
