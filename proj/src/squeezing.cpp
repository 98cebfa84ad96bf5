#include "qmc/squeezing.hpp"

#include <cmath>
#include <stdexcept>

#include "qmc/kernels.hpp"

namespace qmc {

void PumpCondition::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument(
        "alpha must satisfy 0 <= alpha < 1 (alpha < 1 keeps the pair below the oscillation "
        "threshold)");
  if (!std::isfinite(zeta0)) throw std::invalid_argument("zeta0 must be finite");
  if (!(eta_e >= 0.0 && eta_e <= 1.0)) throw std::invalid_argument("eta_e must lie in [0, 1]");
  if (!(eta_d >= 0.0 && eta_d <= 1.0)) throw std::invalid_argument("eta_d must lie in [0, 1]");
}

double lambda_k(double alpha, double zeta_bar, double delta) {
  const double detune = zeta_bar - 2.0 * alpha;
  const double u = 1.0 - alpha * alpha + detune * detune - delta * delta;
  return u * u + 4.0 * delta * delta;
}

VarianceResult sum_quadrature_variance(double alpha, double zeta_bar, double delta, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  VarianceResult r;
  r.lambda = lambda_k(alpha, zeta_bar, delta);
  if (alpha == 0.0) {
    r.variance = 1.0;
  } else {
    const double ratio = r.lambda / (4.0 * alpha * alpha);
    r.variance = 1.0 - eta * 2.0 / (1.0 + std::sqrt(1.0 + ratio));
  }
  r.sl_db = 10.0 * std::log10(r.variance);
  return r;
}

VarianceResult variance_no_amx(double alpha, double zeta_k, double eta) {
  return sum_quadrature_variance(alpha, zeta_k, 0.0, eta);
}

double pair_extraction(const ExtractionTable& table, int k) {
  return std::sqrt(table.at(k) * table.at(-k));
}

SpectrumRow spectrum_row(const DeviceModel& dev, const PumpCondition& pump, int k,
                         const SpectrumOptions& opts) {
  SpectrumRow row;
  row.detuning = pair_detunings(dev, k, pump.zeta0);
  row.eta = pair_extraction(dev.eta_e(), k) * pump.eta_d;
  row.result =
      sum_quadrature_variance(pump.alpha, row.detuning.zeta_bar, row.detuning.delta, row.eta);
  row.result.k = k;
  row.warn = row.detuning.dkappa_plus > opts.dkappa_warn ||
             row.detuning.dkappa_minus > opts.dkappa_warn;
  return row;
}

std::vector<SpectrumRow> spectrum(const DeviceModel& dev, const PumpCondition& pump, int k_first,
                                  int k_last, const SpectrumOptions& opts) {
  return kernels::spectrum_parallel(dev, pump, k_first, k_last, opts);
}

}  // namespace qmc
