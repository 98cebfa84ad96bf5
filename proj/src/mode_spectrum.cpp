#include "qmc/mode_spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmc {

void ModeFamily::validate() const {
  if (!(d1 > 0.0)) throw std::invalid_argument("ModeFamily: d1 must be > 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("ModeFamily: kappa must be > 0");
  if (!std::isfinite(d2) || !std::isfinite(d3) || !std::isfinite(omega0))
    throw std::invalid_argument("ModeFamily: non-finite dispersion coefficient");
}

void CrossingFamily::validate() const {
  if (!(kappa_c > 0.0)) throw std::invalid_argument("CrossingFamily: kappa_c must be > 0");
  if (!(g_coupling >= 0.0)) throw std::invalid_argument("CrossingFamily: g_coupling must be >= 0");
  if (!std::isfinite(d1_c) || !std::isfinite(k0))
    throw std::invalid_argument("CrossingFamily: non-finite d1_c or k0");
}

ExtractionTable::ExtractionTable(double fallback, std::map<int, double> per_mode)
    : fallback_(fallback), per_mode_(std::move(per_mode)) {
  auto check = [](double v, const std::string& where) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("ExtractionTable: " + where + " outside [0, 1]");
  };
  check(fallback_, "default efficiency");
  for (const auto& [k, v] : per_mode_) check(v, "entry for k=" + std::to_string(k));
}

double ExtractionTable::at(int k) const {
  auto it = per_mode_.find(k);
  return it == per_mode_.end() ? fallback_ : it->second;
}

DeviceModel::DeviceModel(ModeFamily target, std::vector<CrossingFamily> crossings,
                         ExtractionTable eta_e, std::map<int, double> mode_offsets)
    : target_(target),
      crossings_(std::move(crossings)),
      eta_e_(std::move(eta_e)),
      mode_offsets_(std::move(mode_offsets)) {
  target_.validate();
  for (const auto& c : crossings_) c.validate();
  for (const auto& [k, v] : mode_offsets_)
    if (!std::isfinite(v))
      throw std::invalid_argument("DeviceModel: non-finite offset for k=" + std::to_string(k));
}

double integrated_dispersion(const ModeFamily& family, int k) {
  const double kk = static_cast<double>(k);
  return family.d2 * kk * kk / 2.0 + family.d3 * kk * kk * kk / 6.0;
}

double crossing_detuning(const CrossingFamily& c, const ModeFamily& target, int k,
                         double delta_omega0) {
  return delta_omega0 + (static_cast<double>(k) - c.k0) * (c.d1_c - target.d1);
}

AmxPerturbation amx_perturbation(const CrossingFamily& c, double delta_c) {
  const double half = 0.5 * c.kappa_c;
  const double beta = c.g_coupling * c.g_coupling / (half * half + delta_c * delta_c);
  return {beta * (-delta_c), beta * c.kappa_c, beta};
}

AmxPerturbation total_perturbation(const DeviceModel& dev, int k, double delta_omega0) {
  AmxPerturbation sum;
  for (const auto& c : dev.crossings()) {
    const auto p = amx_perturbation(c, crossing_detuning(c, dev.target(), k, delta_omega0));
    sum.delta_omega += p.delta_omega;
    sum.delta_kappa += p.delta_kappa;
    sum.beta += p.beta;
  }
  if (auto it = dev.mode_offsets().find(k); it != dev.mode_offsets().end())
    sum.delta_omega += it->second;
  return sum;
}

double mode_detuning(const DeviceModel& dev, int k, double zeta0) {
  const double half = dev.half_linewidth();
  const double shift = total_perturbation(dev, k, zeta0 * half).delta_omega;
  return zeta0 + (integrated_dispersion(dev.target(), k) + shift) / half;
}

PairDetuning pair_detunings(const DeviceModel& dev, int k, double zeta0) {
  if (k < 1) throw std::invalid_argument("pair_detunings: k must be >= 1 (k = 0 is the pump)");
  const double half = dev.half_linewidth();
  const double delta_omega0 = zeta0 * half;
  const auto plus = total_perturbation(dev, k, delta_omega0);
  const auto minus = total_perturbation(dev, -k, delta_omega0);
  const double zeta_plus =
      zeta0 + (integrated_dispersion(dev.target(), k) + plus.delta_omega) / half;
  const double zeta_minus =
      zeta0 + (integrated_dispersion(dev.target(), -k) + minus.delta_omega) / half;

  PairDetuning out;
  out.k = k;
  out.zeta_bar = 0.5 * (zeta_plus + zeta_minus);
  out.delta = 0.5 * (zeta_plus - zeta_minus);
  out.dkappa_plus = plus.delta_kappa / half;
  out.dkappa_minus = minus.delta_kappa / half;
  return out;
}

}  // namespace qmc
