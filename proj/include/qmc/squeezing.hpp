#pragma once

// Closed-form two-mode squeezing of an EPR pair (k, -k) below threshold.
// All detunings are normalized to kappa/2 and evaluated at offset
// frequency omega ~ 0. The expressions assume mode-independent loss.

#include <vector>

#include "qmc/mode_spectrum.hpp"

namespace qmc {

struct PumpCondition {
  double alpha = 0.0;  // normalized parametric coupling, below threshold for alpha < 1
  double zeta0 = 0.0;  // normalized pump detuning
  double eta_e = 1.0;
  double eta_d = 1.0;

  void validate() const;
  double eta() const { return eta_e * eta_d; }
};

struct VarianceResult {
  int k = 0;
  double variance = 1.0;  // shot-noise-normalized Var(x_k + x_-k)
  double sl_db = 0.0;     // 10 log10(variance)
  double lambda = 0.0;
};

double lambda_k(double alpha, double zeta_bar, double delta);

/// alpha = 0 returns the vacuum limit (variance 1) instead of dividing by zero.
VarianceResult sum_quadrature_variance(double alpha, double zeta_bar, double delta, double eta);

/// Symmetric-detuning special case: same as sum_quadrature_variance with delta = 0.
VarianceResult variance_no_amx(double alpha, double zeta_k, double eta);

struct SpectrumOptions {
  // Rows whose normalized AMX loss perturbation on either mode exceeds this
  // are flagged: the closed form ignores loss asymmetry.
  double dkappa_warn = 0.05;
};

struct SpectrumRow {
  PairDetuning detuning;
  double eta = 1.0;
  VarianceResult result;
  bool warn = false;
};

/// Extraction efficiency used for the pair: geometric mean of the +k and -k
/// table entries. Exact when the two are equal.
double pair_extraction(const ExtractionTable& table, int k);

SpectrumRow spectrum_row(const DeviceModel& dev, const PumpCondition& pump, int k,
                         const SpectrumOptions& opts = {});

/// One row per k in [k_first, k_last], ordered by k. Rows are evaluated in
/// parallel; see kernels.hpp for the serial reference.
std::vector<SpectrumRow> spectrum(const DeviceModel& dev, const PumpCondition& pump, int k_first,
                                  int k_last, const SpectrumOptions& opts = {});

}  // namespace qmc
