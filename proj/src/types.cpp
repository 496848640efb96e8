#include "copspec/types.hpp"

#include <cmath>
#include <numbers>

#include "copspec/error.hpp"

namespace copspec {

TimeSeries::TimeSeries(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() < kMinLength) {
    throw InvalidInput("time series needs at least " + std::to_string(kMinLength) +
                       " observations, got " + std::to_string(values_.size()));
  }
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t])) {
      throw InvalidInput("time series value at index " + std::to_string(t) + " is not finite");
    }
  }
}

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidInput("quantile grid is empty");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const double tau = levels_[i];
    if (!(tau > 0.0 && tau < 1.0)) {
      throw InvalidInput("quantile level " + std::to_string(tau) + " outside (0, 1)");
    }
    if (i > 0 && !(tau > levels_[i - 1])) {
      throw InvalidInput("quantile levels must be strictly increasing");
    }
  }
}

QuantileGrid QuantileGrid::equally_spaced(std::size_t count) {
  if (count == 0) throw InvalidInput("quantile grid needs at least one level");
  std::vector<double> levels(count);
  for (std::size_t i = 0; i < count; ++i) {
    levels[i] = static_cast<double>(i + 1) / static_cast<double>(count + 1);
  }
  return QuantileGrid(std::move(levels));
}

QuantileGrid QuantileGrid::panel_levels() { return QuantileGrid({0.1, 0.5, 0.9}); }

std::optional<std::size_t> QuantileGrid::find(double tau, double tol) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (std::abs(levels_[i] - tau) <= tol) return i;
  }
  return std::nullopt;
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw InvalidInput("frequency grid is empty");
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    const double w = omegas_[k];
    if (!(w >= 0.0 && w <= std::numbers::pi + 1e-12)) {
      throw InvalidInput("frequency " + std::to_string(w) + " outside [0, pi]");
    }
    if (k > 0 && w < omegas_[k - 1]) {
      throw InvalidInput("frequencies must be non-decreasing");
    }
  }
}

FrequencyGrid FrequencyGrid::fourier_subgrid(std::size_t denominator) {
  if (denominator < 2) throw InvalidInput("frequency grid denominator must be >= 2");
  std::vector<double> omegas;
  for (std::size_t j = 0; j <= denominator / 2; ++j) {
    omegas.push_back(2.0 * std::numbers::pi * static_cast<double>(j) /
                     static_cast<double>(denominator));
  }
  return FrequencyGrid(std::move(omegas));
}

std::optional<std::size_t> FrequencyGrid::find(double omega, double tol) const {
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    if (std::abs(omegas_[k] - omega) <= tol) return k;
  }
  return std::nullopt;
}

}  // namespace copspec
