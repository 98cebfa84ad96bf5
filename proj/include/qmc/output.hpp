#pragma once

// Serialization of results: CSV tables with a provenance header, JSON plans,
// and atomic file replacement so a failed run never leaves a truncated file.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmc/bandwidth_planner.hpp"
#include "qmc/dispersion_fit.hpp"
#include "qmc/langevin_oracle.hpp"
#include "qmc/pump_calibration.hpp"
#include "qmc/squeezing.hpp"

namespace qmc {

inline constexpr const char* kToolVersion = "0.3.0";

/// Command name plus the full parameter set, rendered as the leading
/// `# qmcomb <version> <command> key=value ...` line of every CSV.
struct RunInfo {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;

  RunInfo& add(const std::string& key, const std::string& value);
  RunInfo& add(const std::string& key, double value);
  std::string header_line() const;
};

/// 12 significant digits, locale-independent.
std::string fmt(double v);

void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string spectrum_csv(const std::vector<SpectrumRow>& rows, const RunInfo& info);
std::string calibration_csv(const std::vector<CalibrationPoint>& points, const RunInfo& info);
std::string fit_report_csv(const DispersionScan& scan, const FitReport& fit, const RunInfo& info);
std::string covariance_csv(const std::vector<OutputCovariance>& rows, const RunInfo& info);
std::string sweep_csv(const std::vector<RegimePlan>& plans, const RunInfo& info);

nlohmann::json plan_json(const RegimePlan& plan);

}  // namespace qmc
