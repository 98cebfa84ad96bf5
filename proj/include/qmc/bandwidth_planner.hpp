#pragma once

// Uniform squeezing regime alpha <= zeta_k <= 3 alpha, the pair count it
// admits for a quadratic mode parabola zeta_k = zeta0 + (d2_norm / 2) k^2,
// and the pump detuning that maximizes that count.

#include <utility>
#include <vector>

#include "qmc/mode_spectrum.hpp"

namespace qmc {

struct RegimePlan {
  double alpha = 0.0;
  double zeta0 = 0.0;
  double regime_low = 0.0;
  double regime_high = 0.0;
  std::vector<int> pair_indices;
  int n_pairs = 0;
  int k_min = 0;  // 0 when no pair qualifies
  int k_max = 0;
  double estimate = 0.0;  // continuum estimate 2 sqrt(alpha / d2_norm)
};

std::pair<double, double> uniform_regime(double alpha);

RegimePlan count_uniform_pairs(double alpha, double zeta0, double d2_norm, int k_max_available);

double pairs_estimate(double alpha, double d2_norm);

/// Width in k of the continuum interval sqrt(2(alpha - zeta0)^+ / d2) <= k <=
/// sqrt(2(3 alpha - zeta0) / d2); zero when the parabola starts above the regime.
double regime_width(double alpha, double zeta0, double d2_norm);

struct ZetaOptimum {
  double zeta0_star = 0.0;
  RegimePlan plan;
};

/// Grid search over zeta0 = i * step in [0, zeta0_max]; ties go to the
/// smallest zeta0, so the answer does not depend on evaluation order.
ZetaOptimum optimize_zeta0(double alpha, double d2_norm, double zeta0_max, int k_max_available,
                           double step = 0.01);

/// One plan per zeta0 = i * step, i = 0.., up to and including zeta0_max.
std::vector<RegimePlan> sweep_zeta0(double alpha, double d2_norm, double zeta0_max,
                                    int k_max_available, double step = 0.1);

struct RegimeDegradation {
  double max_db_degradation = 0.0;  // SL(edge) - SL(optimum), dB
  double min_reduction_ratio = 1.0;  // (1 - Var(edge)) / (1 - Var(optimum))
};

RegimeDegradation degradation_within_regime(double alpha, double eta);

/// d2_norm = D2 / (kappa/2) with kappa = omega / Q_loaded and omega = 2 pi c / lambda.
/// Takes D2/2pi in Hz and the vacuum wavelength in nm.
double d2_norm_from_physical(double d2_hz, double wavelength_nm, double loaded_q);

/// AMX-aware variant: counts 1 <= k <= k_max_available whose device detuning
/// zeta_bar_k lies in the regime and whose pair is not perturbed
/// (|delta| <= max_delta and both normalized AMX losses <= max_dkappa).
RegimePlan count_uniform_pairs_device(const DeviceModel& dev, double alpha, double zeta0,
                                      int k_max_available, double max_delta = 0.1,
                                      double max_dkappa = 0.05);

}  // namespace qmc
