#include "qmc/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace qmc {

RunInfo& RunInfo::add(const std::string& key, const std::string& value) {
  params.emplace_back(key, value);
  return *this;
}

RunInfo& RunInfo::add(const std::string& key, double value) { return add(key, fmt(value)); }

std::string RunInfo::header_line() const {
  std::string s = std::string("# qmcomb ") + kToolVersion + " " + command;
  for (const auto& [k, v] : params) s += " " + k + "=" + v;
  return s + "\n";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows, const RunInfo& info) {
  std::ostringstream os;
  os << info.header_line();
  os << "k,zeta_bar,delta,dkappa_plus,dkappa_minus,eta,variance,sl_db,warn_flag\n";
  for (const auto& r : rows) {
    const auto& d = r.detuning;
    os << d.k << ',' << fmt(d.zeta_bar) << ',' << fmt(d.delta) << ',' << fmt(d.dkappa_plus) << ','
       << fmt(d.dkappa_minus) << ',' << fmt(r.eta) << ',' << fmt(r.result.variance) << ','
       << fmt(r.result.sl_db) << ',' << (r.warn ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string calibration_csv(const std::vector<CalibrationPoint>& points, const RunInfo& info) {
  std::ostringstream os;
  os << info.header_line();
  os << "alpha,zeta0,f_squared,power_uW,transmission\n";
  for (const auto& p : points) {
    os << fmt(p.alpha) << ',' << fmt(p.zeta0) << ',' << fmt(p.f_squared) << ','
       << (p.power ? fmt(*p.power * 1e6) : std::string()) << ',' << fmt(p.transmission) << '\n';
  }
  os << "# f_squared = alpha*(1+(zeta0-alpha)^2); power_uW = f_squared*P_th; "
        "transmission = 1-4*eta_e*(1-eta_e)/(1+(zeta0-alpha)^2)\n";
  return os.str();
}

std::string fit_report_csv(const DispersionScan& scan, const FitReport& fit, const RunInfo& info) {
  std::ostringstream os;
  os << info.header_line();
  os << "k,dint_hz,fit_hz,residual_hz,flagged\n";
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    const int k = scan.samples[i].k;
    const bool flagged = std::binary_search(fit.flagged.begin(), fit.flagged.end(), k);
    os << k << ',' << fmt(scan.samples[i].d_int_hz) << ',' << fmt(fit.fitted_hz[i]) << ','
       << fmt(fit.residuals_hz[i]) << ',' << (flagged ? 1 : 0) << '\n';
  }
  os << "# summary d2_fit_hz=" << fmt(fit.d2_fit_hz) << " d3_fit_hz=" << fmt(fit.d3_fit_hz)
     << " d1_fit_hz=" << fmt(fit.d1_fit_hz) << " threshold_hz=" << fmt(fit.threshold_hz)
     << " flagged=" << fit.flagged.size() << '\n';
  os << "# windows";
  for (const auto& w : fit.windows) os << ' ' << w.k_first << ".." << w.k_last << '(' << w.size() << ')';
  os << '\n';
  return os.str();
}

std::string covariance_csv(const std::vector<OutputCovariance>& rows, const RunInfo& info) {
  std::ostringstream os;
  os << info.header_line();
  os << "omega,var_sum_x,var_sum_p,var_diff_x,var_diff_p\n";
  for (const auto& r : rows) {
    const auto& c = r.cov;
    // (q_i +- q_j)/sqrt(2) for the paired quadratures
    const double sum_x = 0.5 * (c(0, 0) + c(2, 2)) + c(0, 2);
    const double sum_p = 0.5 * (c(1, 1) + c(3, 3)) + c(1, 3);
    const double diff_x = 0.5 * (c(0, 0) + c(2, 2)) - c(0, 2);
    const double diff_p = 0.5 * (c(1, 1) + c(3, 3)) - c(1, 3);
    os << fmt(r.omega) << ',' << fmt(sum_x) << ',' << fmt(sum_p) << ',' << fmt(diff_x) << ','
       << fmt(diff_p) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<RegimePlan>& plans, const RunInfo& info) {
  std::ostringstream os;
  os << info.header_line();
  os << "zeta0,n_pairs,k_min,k_max,estimate\n";
  for (const auto& p : plans)
    os << fmt(p.zeta0) << ',' << p.n_pairs << ',' << p.k_min << ',' << p.k_max << ','
       << fmt(p.estimate) << '\n';
  return os.str();
}

nlohmann::json plan_json(const RegimePlan& plan) {
  return {{"alpha", plan.alpha},
          {"zeta0", plan.zeta0},
          {"regime_low", plan.regime_low},
          {"regime_high", plan.regime_high},
          {"n_pairs", plan.n_pairs},
          {"k_min", plan.k_min},
          {"k_max", plan.k_max},
          {"pair_indices", plan.pair_indices},
          {"estimate", plan.estimate}};
}

}  // namespace qmc
