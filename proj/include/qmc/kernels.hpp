#pragma once

// Data-parallel sweeps. Each kernel has an OpenMP version and a serial
// reference with identical arithmetic; tests require the two to agree
// bit-for-bit, so results never depend on the thread count.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmc/squeezing.hpp"

namespace qmc::kernels {

// --- spectrum over k ---------------------------------------------------------

std::vector<SpectrumRow> spectrum_serial(const DeviceModel& dev, const PumpCondition& pump,
                                         int k_first, int k_last, const SpectrumOptions& opts);
std::vector<SpectrumRow> spectrum_parallel(const DeviceModel& dev, const PumpCondition& pump,
                                           int k_first, int k_last, const SpectrumOptions& opts);

// --- closed form vs frequency-domain oracle -----------------------------------

using ClosedForm = std::function<double(double alpha, double zeta_bar, double delta, double eta)>;

/// The reference closed form (sum_quadrature_variance().variance).
double closed_form_variance(double alpha, double zeta_bar, double delta, double eta);

struct GridPoint {
  double alpha = 0.0;
  double zeta_bar = 0.0;
  double delta = 0.0;
  double eta_e = 1.0;
  double eta_d = 1.0;
};

struct OracleGrid {
  std::vector<double> alphas;
  std::vector<double> zeta_bars;
  std::vector<double> deltas;
  std::vector<std::pair<double, double>> efficiencies;  // (eta_e, eta_d)
  double omega = 0.0;

  std::size_t size() const {
    return alphas.size() * zeta_bars.size() * deltas.size() * efficiencies.size();
  }
  GridPoint at(std::size_t index) const;
};

/// alpha in {0.1..0.9}, 41 zeta_bar in [-1, 4], 26 delta in [0, 5],
/// (eta_e, eta_d) in {0.5, 0.85, 1}^2.
OracleGrid default_oracle_grid(std::size_t zeta_points = 41, std::size_t delta_points = 26);

struct GridReport {
  std::size_t points = 0;
  double max_rel_error = 0.0;
  GridPoint worst;
  double worst_formula = 0.0;
  double worst_oracle = 0.0;
  double min_cov_eigenvalue = 0.0;            // over all points
  double min_uncertainty_product = 0.0;       // squeezed * antisqueezed, eta_e = eta_d = 1 only
  double min_uncertainty_product_all = 0.0;   // over all points
};

GridReport oracle_grid_serial(const OracleGrid& grid, const ClosedForm& formula);
GridReport oracle_grid_parallel(const OracleGrid& grid, const ClosedForm& formula);

// --- Monte Carlo chains -------------------------------------------------------

struct ChainSpec {
  Eigen::Matrix4d drift;
  Eigen::Vector4d coupling_e;  // sqrt(loss * eta_e) per quadrature
  Eigen::Vector4d coupling_i;  // sqrt(loss * (1 - eta_e))
  double eta_d = 1.0;
  Eigen::Vector4d direction;   // unit homodyne projection
  double step = 0.01;
  std::size_t steps_per_window = 0;
  std::size_t windows = 0;
  std::size_t burn_steps = 0;
  std::uint64_t seed = 0;
};

/// Normalized spectral samples (one per window) of a single chain.
std::vector<double> run_chain(const ChainSpec& spec, int chain);

std::vector<double> chains_serial(const ChainSpec& spec, int chains);
std::vector<double> chains_parallel(const ChainSpec& spec, int chains);

}  // namespace qmc::kernels
