#pragma once

#include <functional>
#include <span>
#include <vector>

namespace copspec {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double tolerance = 1e-8;  // on the simplex diameter
  int max_iterations = 2000;
  // Relative size of the initial simplex; zero coordinates use zero_step.
  double relative_step = 0.05;
  double zero_step = 0.00025;
  bool record_history = false;
};

struct NelderMeadResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> best_history;  // best value after each iteration
};

// Nelder-Mead simplex search with reflection/expansion/contraction/shrink
// coefficients (1, 2, 0.5, 0.5). Non-finite objective values are treated as
// +infinity, which lets callers express hard constraints. Throws
// NumericalError if the objective is not finite at `start`.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace copspec
