#pragma once

#include <functional>
#include <vector>

namespace qmc {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. Stops when the simplex diameter
/// drops below `x_tol` (in the coordinates of x) or after `max_iter` steps.
/// Bounds are enforced by clamping trial points.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, std::vector<double> initial_step,
                             std::vector<double> lower, std::vector<double> upper,
                             double x_tol = 1e-8, int max_iter = 20000);

}  // namespace qmc
