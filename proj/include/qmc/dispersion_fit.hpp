#pragma once

// Measured integrated dispersion -> smooth background, AMX flags, AMX-free
// windows, and a DeviceModel with fitted crossing families.
//
// Scan file format (CSV):
//   # kappa_hz = 12.1e6              optional metadata, loaded linewidth kappa/2pi
//   # reference_wavelength_nm = 1543.2
//   k,dint_hz
//   -35,1.623e7
//   ...
// Comment lines start with '#'; metadata may appear anywhere before the data.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmc/mode_spectrum.hpp"

namespace qmc {

struct DispersionSample {
  int k = 0;
  double d_int_hz = 0.0;
};

struct DispersionScan {
  std::vector<DispersionSample> samples;  // unique k, ascending
  std::optional<double> reference_wavelength_nm;
  std::optional<double> kappa_hz;
};

class ScanParseError : public std::runtime_error {
 public:
  ScanParseError(const std::string& what, int line) : std::runtime_error(what), line(line) {}
  int line;  // 1-based, 0 when not tied to a line
};

DispersionScan parse_scan(std::istream& in, const std::string& source_name = "<stream>");
DispersionScan load_scan(const std::filesystem::path& path);

struct FitOptions {
  int degree = 2;            // 2 or 3
  bool robust = true;
  bool linear_term = false;  // for scans that keep a residual FSR trend
  double mad_cut = 5.0;
  int max_iterations = 20;
};

struct ModeWindow {
  int k_first = 0;
  int k_last = 0;
  int size() const { return k_last - k_first + 1; }
  bool operator==(const ModeWindow&) const = default;
};

struct FitReport {
  // D_int model: d1 k + d2 k^2 / 2 + d3 k^3 / 6, all in Hz (D/2pi)
  double d1_fit_hz = 0.0;
  double d2_fit_hz = 0.0;
  double d3_fit_hz = 0.0;
  std::vector<double> fitted_hz;
  std::vector<double> residuals_hz;
  std::vector<bool> inlier;  // used in the final background fit
  int iterations = 0;
  int degree = 2;
  bool linear_term = false;

  // filled by detect_amx
  std::vector<int> flagged;
  std::vector<ModeWindow> windows;
  double threshold_hz = 0.0;

  double model(int k) const;
};

FitReport fit_background(const DispersionScan& scan, const FitOptions& opts = {});

/// Flags |residual| > threshold_linewidths * kappa/2 (kappa from the scan
/// metadata unless overridden) and computes the maximal unflagged runs of
/// consecutive k.
FitReport detect_amx(const DispersionScan& scan, FitReport fit, double threshold_linewidths,
                     std::optional<double> kappa_hz = std::nullopt);

std::vector<ModeWindow> unflagged_windows(const DispersionScan& scan, const std::vector<int>& flagged);

/// Maximal groups of flagged modes, merging runs separated by at most
/// `max_gap` unflagged modes.
std::vector<ModeWindow> flagged_clusters(const std::vector<int>& flagged, int max_gap = 1);

struct DeviceBuildOptions {
  double fsr_hz = 25e9;
  // D1^c - D1^t of the crossing family; frequency data alone fixes only the
  // ratios G^2/dD1 and kappa_c/dD1, so this has to be supplied. 0 disables
  // crossing fits (every cluster falls back to raw offsets).
  double crossing_fsr_offset_hz = 0.0;
  int context_modes = 3;
  int min_cluster_modes = 3;
  double x_tol = 1e-8;
};

struct CrossingFit {
  ModeWindow cluster;
  bool fitted = false;
  CrossingFamily crossing;  // rad/s
  double rms_residual_hz = 0.0;
  std::string note;
};

struct DeviceFit {
  DeviceModel device;
  std::vector<CrossingFit> clusters;
  // Background and fitted crossings refit jointly over the whole scan, with
  // flags and windows recomputed against the refined background. A copy of
  // the input fit when no crossing was fitted.
  FitReport refined;
};

/// Crossing tails bias a background fitted before the crossing is known, so
/// after the per-cluster fits the polynomial and the crossings are refined
/// together (see DeviceFit::refined); the device carries the refined d2/d3.
DeviceFit to_device_model(const DispersionScan& scan, const FitReport& fit, double kappa_hz,
                          const ExtractionTable& eta_e, const DeviceBuildOptions& opts = {});

/// Forward model used by the crossing fit, in Hz: the shift of mode k from a
/// crossing with coupling g_hz, loss kappa_c_hz and FSR offset dd1_hz.
double crossing_shift_hz(double g_hz, double kappa_c_hz, double k0, double dd1_hz, int k);

}  // namespace qmc
