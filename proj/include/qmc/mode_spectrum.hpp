#pragma once

// Resonator mode structure: integrated dispersion of the pumped family,
// avoided-mode-crossing (AMX) perturbations from crossing families, and the
// per-pair detunings that drive the squeezing model.
//
// Frequencies in this header are angular (rad/s) unless a name says
// otherwise. Everything downstream of pair_detunings() is dimensionless,
// normalized by kappa/2 of the pumped family; this is the only place where
// that conversion happens.

#include <map>
#include <numbers>
#include <vector>

namespace qmc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ModeFamily {
  double omega0 = 0.0;  // absolute frequency of mode k = 0
  double d1 = 0.0;      // free spectral range
  double d2 = 0.0;
  double d3 = 0.0;
  double kappa = 0.0;   // total loss rate

  void validate() const;
};

struct CrossingFamily {
  double g_coupling = 0.0;  // coupling G to the target family
  double kappa_c = 0.0;     // total loss rate of the crossing family
  double d1_c = 0.0;        // FSR of the crossing family
  double k0 = 0.0;          // intersection index, may be off-grid

  void validate() const;
};

/// Per-mode extraction efficiency kappa_e/kappa with a default for modes
/// not listed explicitly.
class ExtractionTable {
 public:
  explicit ExtractionTable(double fallback = 1.0, std::map<int, double> per_mode = {});

  double at(int k) const;
  double fallback() const { return fallback_; }
  const std::map<int, double>& entries() const { return per_mode_; }

 private:
  double fallback_;
  std::map<int, double> per_mode_;
};

/// Immutable description of the resonator. Superposes any number of
/// crossing families linearly; each one follows the single-crossing
/// adiabatic elimination, so closely spaced crossings are approximate.
/// `mode_offsets` carries raw per-mode frequency shifts (rad/s) for AMX
/// clusters that could not be described by a Lorentzian crossing.
class DeviceModel {
 public:
  DeviceModel(ModeFamily target, std::vector<CrossingFamily> crossings = {},
              ExtractionTable eta_e = ExtractionTable{}, std::map<int, double> mode_offsets = {});

  const ModeFamily& target() const { return target_; }
  const std::vector<CrossingFamily>& crossings() const { return crossings_; }
  const ExtractionTable& eta_e() const { return eta_e_; }
  const std::map<int, double>& mode_offsets() const { return mode_offsets_; }

  /// kappa/2 of the pumped family, the normalization unit.
  double half_linewidth() const { return 0.5 * target_.kappa; }

 private:
  ModeFamily target_;
  std::vector<CrossingFamily> crossings_;
  ExtractionTable eta_e_;
  std::map<int, double> mode_offsets_;
};

struct AmxPerturbation {
  double delta_omega = 0.0;
  double delta_kappa = 0.0;
  double beta = 0.0;
};

struct PairDetuning {
  int k = 0;
  double zeta_bar = 0.0;
  double delta = 0.0;
  double dkappa_plus = 0.0;   // normalized to kappa/2
  double dkappa_minus = 0.0;  // normalized to kappa/2
};

double integrated_dispersion(const ModeFamily& family, int k);

/// delta_omega0 + (k - k0)(D1^c - D1^t)
double crossing_detuning(const CrossingFamily& c, const ModeFamily& target, int k,
                         double delta_omega0);

/// Loaded-mode shift and extra loss from eliminating one crossing mode.
/// beta = G^2 / ((kappa_c/2)^2 + delta_c^2); both perturbations scale with beta.
AmxPerturbation amx_perturbation(const CrossingFamily& c, double delta_c);

/// Sum over all crossing families plus any raw offset for mode k.
AmxPerturbation total_perturbation(const DeviceModel& dev, int k, double delta_omega0);

/// Normalized detuning zeta_k of a single mode (k may be negative).
double mode_detuning(const DeviceModel& dev, int k, double zeta0);

/// Average and asymmetric detunings of the pair (k, -k); k >= 1.
PairDetuning pair_detunings(const DeviceModel& dev, int k, double zeta0);

}  // namespace qmc
