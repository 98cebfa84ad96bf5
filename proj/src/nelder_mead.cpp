#include "qmc/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmc {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, std::vector<double> initial_step,
                             std::vector<double> lower, std::vector<double> upper, double x_tol,
                             int max_iter) {
  const std::size_t n = x0.size();
  if (initial_step.size() != n || lower.size() != n || upper.size() != n)
    throw std::invalid_argument("nelder_mead: dimension mismatch");

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lower[j], upper[j]);
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  clamp(simplex[0]);
  for (std::size_t j = 0; j < n; ++j) {
    simplex[j + 1][j] += initial_step[j];
    clamp(simplex[j + 1]);
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
    if (diameter < x_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      clamp(x);
      return x;
    };

    auto reflected = along(-1.0);
    const double fr = f(reflected);
    if (fr < values[best]) {
      auto expanded = along(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
      continue;
    }
    auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
    const double fc = f(contracted);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = std::move(contracted);
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      clamp(simplex[i]);
      values[i] = f(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace qmc
