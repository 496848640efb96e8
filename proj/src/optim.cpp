#include "copspec/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "copspec/error.hpp"

namespace copspec {

namespace {

double sanitize(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  const std::size_t d = start.size();
  const double f_start = objective(start);
  if (!std::isfinite(f_start)) {
    throw NumericalError("nelder_mead: objective is not finite at the starting point");
  }

  NelderMeadResult result;
  if (d == 0) {
    result.argmin = std::move(start);
    result.value = f_start;
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(d + 1, start);
  std::vector<double> values(d + 1);
  values[0] = f_start;
  for (std::size_t i = 0; i < d; ++i) {
    auto& v = simplex[i + 1];
    v[i] = v[i] != 0.0 ? v[i] * (1.0 + options.relative_step) : options.zero_step;
    values[i + 1] = sanitize(objective(v));
  }

  std::vector<std::size_t> order(d + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(d + 1);
    std::vector<double> v2(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      s2[i] = std::move(simplex[order[i]]);
      v2[i] = values[order[i]];
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  auto diameter = [&] {
    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      for (std::size_t j = i + 1; j <= d; ++j) diam = std::max(diam, distance(simplex[i], simplex[j]));
    }
    return diam;
  };

  sort_simplex();
  std::vector<double> centroid(d), trial(d), trial2(d);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (diameter() < options.tolerance) {
      result.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t c = 0; c < d; ++c) centroid[c] += simplex[i][c];
    }
    for (auto& c : centroid) c /= static_cast<double>(d);

    const auto& worst = simplex[d];
    for (std::size_t c = 0; c < d; ++c) trial[c] = centroid[c] + kReflect * (centroid[c] - worst[c]);
    const double f_reflect = sanitize(objective(trial));

    if (f_reflect < values[0]) {
      for (std::size_t c = 0; c < d; ++c) trial2[c] = centroid[c] + kExpand * (trial[c] - centroid[c]);
      const double f_expand = sanitize(objective(trial2));
      if (f_expand < f_reflect) {
        simplex[d] = trial2;
        values[d] = f_expand;
      } else {
        simplex[d] = trial;
        values[d] = f_reflect;
      }
    } else if (f_reflect < values[d - 1]) {
      simplex[d] = trial;
      values[d] = f_reflect;
    } else {
      bool outside = f_reflect < values[d];
      const auto& anchor = outside ? trial : worst;
      for (std::size_t c = 0; c < d; ++c) trial2[c] = centroid[c] + kContract * (anchor[c] - centroid[c]);
      const double f_contract = sanitize(objective(trial2));
      if (f_contract < (outside ? f_reflect : values[d])) {
        simplex[d] = trial2;
        values[d] = f_contract;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t c = 0; c < d; ++c) {
            simplex[i][c] = simplex[0][c] + kShrink * (simplex[i][c] - simplex[0][c]);
          }
          values[i] = sanitize(objective(simplex[i]));
        }
      }
    }
    sort_simplex();
    if (options.record_history) result.best_history.push_back(values[0]);
  }
  if (!result.converged && diameter() < options.tolerance) result.converged = true;

  result.argmin = simplex[0];
  result.value = values[0];
  result.iterations = iter;
  return result;
}

}  // namespace copspec
