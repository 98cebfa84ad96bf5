#include "qmc/bandwidth_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmc/squeezing.hpp"

namespace qmc {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

void finish(RegimePlan& plan) {
  plan.n_pairs = static_cast<int>(plan.pair_indices.size());
  if (!plan.pair_indices.empty()) {
    plan.k_min = plan.pair_indices.front();
    plan.k_max = plan.pair_indices.back();
  }
}

}  // namespace

std::pair<double, double> uniform_regime(double alpha) { return {alpha, 3.0 * alpha}; }

RegimePlan count_uniform_pairs(double alpha, double zeta0, double d2_norm, int k_max_available) {
  if (!(d2_norm > 0.0)) throw std::invalid_argument("count_uniform_pairs: d2_norm must be > 0");
  if (!(zeta0 >= 0.0)) throw std::invalid_argument("count_uniform_pairs: zeta0 must be >= 0");
  RegimePlan plan;
  plan.alpha = alpha;
  plan.zeta0 = zeta0;
  std::tie(plan.regime_low, plan.regime_high) = uniform_regime(alpha);
  plan.estimate = alpha > 0.0 ? pairs_estimate(alpha, d2_norm) : 0.0;
  for (int k = 1; k <= k_max_available; ++k) {
    const double zeta = zeta0 + 0.5 * d2_norm * static_cast<double>(k) * k;
    if (zeta > plan.regime_high) break;  // parabola only rises from here
    if (zeta >= plan.regime_low) plan.pair_indices.push_back(k);
  }
  finish(plan);
  return plan;
}

double pairs_estimate(double alpha, double d2_norm) {
  if (!(alpha > 0.0) || !(d2_norm > 0.0))
    throw std::invalid_argument("pairs_estimate: alpha and d2_norm must be > 0");
  return 2.0 * std::sqrt(alpha / d2_norm);
}

double regime_width(double alpha, double zeta0, double d2_norm) {
  const double hi = 3.0 * alpha - zeta0;
  if (hi < 0.0) return 0.0;
  const double lo = std::max(alpha - zeta0, 0.0);
  return std::sqrt(2.0 * hi / d2_norm) - std::sqrt(2.0 * lo / d2_norm);
}

ZetaOptimum optimize_zeta0(double alpha, double d2_norm, double zeta0_max, int k_max_available,
                           double step) {
  if (!(zeta0_max > 0.0)) throw std::invalid_argument("optimize_zeta0: zeta0_max must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("optimize_zeta0: step must be > 0");
  ZetaOptimum best;
  best.plan.n_pairs = -1;
  const auto n = static_cast<long>(std::floor(zeta0_max / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double zeta0 = std::min(static_cast<double>(i) * step, zeta0_max);
    auto plan = count_uniform_pairs(alpha, zeta0, d2_norm, k_max_available);
    if (plan.n_pairs > best.plan.n_pairs) {
      best.zeta0_star = zeta0;
      best.plan = std::move(plan);
    }
  }
  return best;
}

std::vector<RegimePlan> sweep_zeta0(double alpha, double d2_norm, double zeta0_max,
                                    int k_max_available, double step) {
  if (!(zeta0_max >= 0.0)) throw std::invalid_argument("sweep_zeta0: zeta0_max must be >= 0");
  if (!(step > 0.0)) throw std::invalid_argument("sweep_zeta0: step must be > 0");
  std::vector<RegimePlan> out;
  const auto n = static_cast<long>(std::floor(zeta0_max / step + 1e-9));
  for (long i = 0; i <= n; ++i)
    out.push_back(count_uniform_pairs(alpha, std::min(static_cast<double>(i) * step, zeta0_max),
                                      d2_norm, k_max_available));
  return out;
}

RegimeDegradation degradation_within_regime(double alpha, double eta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("degradation_within_regime: alpha must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("degradation_within_regime: eta must lie in (0, 1]");
  const auto best = variance_no_amx(alpha, 2.0 * alpha, eta);
  RegimeDegradation out;
  for (double edge : {alpha, 3.0 * alpha}) {
    const auto v = variance_no_amx(alpha, edge, eta);
    out.max_db_degradation = std::max(out.max_db_degradation, v.sl_db - best.sl_db);
    out.min_reduction_ratio =
        std::min(out.min_reduction_ratio, (1.0 - v.variance) / (1.0 - best.variance));
  }
  return out;
}

double d2_norm_from_physical(double d2_hz, double wavelength_nm, double loaded_q) {
  if (!(wavelength_nm > 0.0) || !(loaded_q > 0.0))
    throw std::invalid_argument("d2_norm_from_physical: wavelength and Q must be > 0");
  const double omega = kTwoPi * kSpeedOfLight / (wavelength_nm * 1e-9);
  const double half_kappa = 0.5 * omega / loaded_q;
  return kTwoPi * d2_hz / half_kappa;
}

RegimePlan count_uniform_pairs_device(const DeviceModel& dev, double alpha, double zeta0,
                                      int k_max_available, double max_delta, double max_dkappa) {
  RegimePlan plan;
  plan.alpha = alpha;
  plan.zeta0 = zeta0;
  std::tie(plan.regime_low, plan.regime_high) = uniform_regime(alpha);
  const double d2_norm = dev.target().d2 / dev.half_linewidth();
  plan.estimate = alpha > 0.0 && d2_norm > 0.0 ? pairs_estimate(alpha, d2_norm) : 0.0;
  for (int k = 1; k <= k_max_available; ++k) {
    const auto det = pair_detunings(dev, k, zeta0);
    const bool clean = std::abs(det.delta) <= max_delta && det.dkappa_plus <= max_dkappa &&
                       det.dkappa_minus <= max_dkappa;
    if (clean && det.zeta_bar >= plan.regime_low && det.zeta_bar <= plan.regime_high)
      plan.pair_indices.push_back(k);
  }
  finish(plan);
  return plan;
}

}  // namespace qmc
