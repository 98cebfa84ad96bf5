#pragma once

// Independent check on the closed form: linearized Langevin dynamics of one
// qumode pair in the real quadrature basis (x_k, p_k, x_-k, p_-k), solved in
// the frequency domain through the cavity input-output relations.
//
// Units: time in 1/(kappa/2), frequencies and losses normalized to kappa/2,
// so an unperturbed mode has total loss 2 and decays at rate 1. Inputs are
// unit-strength white vacuum; the detected quadratures of vacuum have unit
// variance, which fixes every noise prefactor.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qmc/mode_spectrum.hpp"

namespace qmc {

struct PairEfficiencies {
  double eta_e_plus = 1.0;
  double eta_e_minus = 1.0;
  double eta_d = 1.0;
};

struct PairDynamics {
  Eigen::Matrix4d drift = -Eigen::Matrix4d::Identity();
  double loss_plus = 2.0;
  double loss_minus = 2.0;
  PairEfficiencies efficiencies;
};

class UnstableDynamics : public std::runtime_error {
 public:
  UnstableDynamics(const std::string& what, double re, double im)
      : std::runtime_error(what), real_part(re), imag_part(im) {}
  double real_part;
  double imag_part;
};

struct OutputCovariance {
  double omega = 0.0;
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();  // symmetrized, shot-noise normalized
};

/// Variances of the pair's sum quadrature (x_k(phi) + x_-k(phi))/sqrt(2) at the
/// squeezed and anti-squeezed homodyne phases.
struct SumQuadratures {
  double squeezed = 1.0;
  double antisqueezed = 1.0;
  double phase = 0.0;  // LO phase of the squeezed quadrature, radians
};

PairDynamics drift_matrix(double alpha, double zeta_bar, double delta, double loss_plus = 2.0,
                          double loss_minus = 2.0);

/// Per-mode loss and extraction for a device pair, including AMX loss.
PairDynamics pair_dynamics(const PairDetuning& det, double alpha, double eta_e_plus,
                           double eta_e_minus, double eta_d);

/// Eigenvalue of the drift with the largest real part.
std::complex<double> slowest_eigenvalue(const Eigen::Matrix4d& drift);

/// Throws UnstableDynamics when Re(lambda) >= 0 for some drift eigenvalue.
void require_stable(const PairDynamics& dyn);

OutputCovariance output_covariance(const PairDynamics& dyn, double omega);

SumQuadratures sum_quadratures(const OutputCovariance& out);

double sum_quadrature_variance_oracle(double alpha, double zeta_bar, double delta, double eta_e,
                                      double eta_d, double omega = 0.0);

// Time-domain Monte Carlo check of the omega ~ 0 squeezed variance.

struct StochasticOptions {
  double window = 400.0;  // Hann-tapered record length per spectral sample
  int chains = 8;         // independent streams; fixed so results do not depend on threads
  double burn_in = -1.0;  // < 0: 20 / |slowest decay rate|
};

struct StochasticEstimate {
  double variance = 0.0;
  double standard_error = 0.0;
  std::size_t windows = 0;
  double phase = 0.0;
};

/// Euler-Maruyama integration of the pair dynamics with white vacuum inputs.
/// Requires step * max|eigenvalue| < 0.1. Bit-identical for a fixed seed.
StochasticEstimate stochastic_estimate(const PairDynamics& dyn, double duration, double step,
                                       std::uint64_t seed, const StochasticOptions& opts = {});

}  // namespace qmc
