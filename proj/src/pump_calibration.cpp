#include "qmc/pump_calibration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmc {

double normalized_pump_power(double alpha, double zeta0) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("normalized_pump_power: alpha must be >= 0");
  const double d = zeta0 - alpha;
  return alpha * (1.0 + d * d);
}

double required_power(double f_squared, double p_threshold) {
  if (!(f_squared >= 0.0) || !(p_threshold >= 0.0))
    throw std::invalid_argument("required_power: arguments must be >= 0");
  return f_squared * p_threshold;
}

double transmission(double alpha, double zeta0, double eta_e) {
  if (!(eta_e >= 0.0 && eta_e <= 1.0))
    throw std::invalid_argument("transmission: eta_e must lie in [0, 1]");
  const double d = zeta0 - alpha;
  return 1.0 - 4.0 * eta_e * (1.0 - eta_e) / (1.0 + d * d);
}

std::vector<double> solve_alpha_from_transmission(double t, double zeta0, double eta_e) {
  if (!(eta_e >= 0.0 && eta_e <= 1.0))
    throw std::invalid_argument("solve_alpha_from_transmission: eta_e must lie in [0, 1]");
  const double depth = 4.0 * eta_e * (1.0 - eta_e);
  const double t_min = 1.0 - depth;
  if (!(t >= t_min && t < 1.0) || depth == 0.0) {
    std::ostringstream msg;
    msg << "transmission " << t << " not achievable for eta_e = " << eta_e
        << "; expected T in [" << t_min << ", 1)";
    throw std::domain_error(msg.str());
  }
  const double arg = depth / (1.0 - t) - 1.0;
  if (arg <= 0.0) return {zeta0};
  const double r = std::sqrt(arg);
  return {zeta0 - r, zeta0 + r};
}

CalibrationPoint calibrate(double alpha, double zeta0, double eta_e,
                           std::optional<double> p_threshold) {
  CalibrationPoint p;
  p.alpha = alpha;
  p.zeta0 = zeta0;
  p.eta_e = eta_e;
  p.f_squared = normalized_pump_power(alpha, zeta0);
  p.transmission = transmission(alpha, zeta0, eta_e);
  if (p_threshold) {
    p.p_threshold = p_threshold;
    p.power = required_power(p.f_squared, *p_threshold);
  }
  return p;
}

}  // namespace qmc
