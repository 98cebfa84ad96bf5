#pragma once

// Laboratory observables (pump power, transmission) <-> normalized pump
// parameters (alpha, zeta0). The relations are the steady-state
// single-mode Kerr expressions; they are applied as plain formulas with no
// regime checks, at and below oscillation threshold alike.

#include <optional>
#include <vector>

namespace qmc {

struct CalibrationPoint {
  double alpha = 0.0;
  double zeta0 = 0.0;
  double eta_e = 1.0;
  double f_squared = 0.0;
  double transmission = 1.0;
  std::optional<double> p_threshold;  // W
  std::optional<double> power;        // W, f_squared * p_threshold
};

/// f^2 = alpha [1 + (zeta0 - alpha)^2]
double normalized_pump_power(double alpha, double zeta0);

double required_power(double f_squared, double p_threshold);

/// T = 1 - 4 eta_e (1 - eta_e) / (1 + (zeta0 - alpha)^2)
double transmission(double alpha, double zeta0, double eta_e);

/// Both real roots alpha = zeta0 -+ sqrt(4 eta_e (1 - eta_e) / (1 - T) - 1),
/// ascending; a single root at the bottom of the dip. Throws
/// std::domain_error naming the achievable interval otherwise.
std::vector<double> solve_alpha_from_transmission(double t, double zeta0, double eta_e);

CalibrationPoint calibrate(double alpha, double zeta0, double eta_e,
                           std::optional<double> p_threshold = std::nullopt);

}  // namespace qmc
