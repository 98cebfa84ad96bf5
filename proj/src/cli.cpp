#include "qmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmc/bandwidth_planner.hpp"
#include "qmc/device_io.hpp"
#include "qmc/dispersion_fit.hpp"
#include "qmc/langevin_oracle.hpp"
#include "qmc/output.hpp"
#include "qmc/pump_calibration.hpp"
#include "qmc/squeezing.hpp"
#include "qmc/svg_plot.hpp"

namespace qmc::cli {

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); }

DeviceModel build_device(const DeviceSource& src, RunInfo& info) {
  if (src.eta_e && !(*src.eta_e >= 0.0 && *src.eta_e <= 1.0))
    throw std::invalid_argument("--eta-e must lie in [0, 1]");
  if (src.device_file) {
    info.add("device", src.device_file->string());
    auto dev = load_device(*src.device_file);
    if (!src.eta_e) return dev;
    info.add("eta_e", *src.eta_e);
    return DeviceModel(dev.target(), dev.crossings(), ExtractionTable(*src.eta_e, dev.eta_e().entries()),
                       dev.mode_offsets());
  }
  ModeFamily t;
  t.d1 = kTwoPi * src.fsr_hz;
  t.d2 = kTwoPi * src.d2_hz;
  t.d3 = kTwoPi * src.d3_hz;
  t.kappa = kTwoPi * src.kappa_hz;
  info.add("fsr_hz", src.fsr_hz).add("d2_hz", src.d2_hz).add("d3_hz", src.d3_hz);
  info.add("kappa_hz", src.kappa_hz).add("eta_e", src.eta_e.value_or(1.0));
  return DeviceModel(t, {}, ExtractionTable(src.eta_e.value_or(1.0)));
}

// Runs body and maps exceptions to the usage/validation exit code.
template <class F>
int guarded(const char* command, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ScanParseError& e) {
    err << "qmcomb " << command << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "qmcomb " << command << ": " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace

std::vector<StochasticPoint> stochastic_points() {
  return {{0.5, 1.0, 0.0, 1.0, 1.0},
          {0.8, 1.6, 0.0, 1.0, 1.0},
          {0.3, 0.2, 0.3, 0.85, 0.9},
          {0.6, 1.5, 0.0, 0.5, 1.0},
          {0.7, 1.0, 0.5, 1.0, 0.7}};
}

int cmd_spectrum(const SpectrumConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded("spectrum", err, [&] {
    PumpCondition pump{cfg.alpha, cfg.zeta0, cfg.device.eta_e.value_or(1.0), cfg.eta_d};
    pump.validate();
    if (cfg.k_first < 1 || cfg.k_last < cfg.k_first)
      throw std::invalid_argument("need 1 <= --k-first <= --k-last");
    if (!(cfg.warn_dkappa > 0.0)) throw std::invalid_argument("--warn-dkappa must be > 0");

    RunInfo info{"spectrum", {}};
    const auto dev = build_device(cfg.device, info);
    info.add("alpha", cfg.alpha).add("zeta0", cfg.zeta0).add("eta_d", cfg.eta_d);
    info.add("k_first", std::to_string(cfg.k_first)).add("k_last", std::to_string(cfg.k_last));
    info.add("warn_dkappa", cfg.warn_dkappa);

    const SpectrumOptions opts{cfg.warn_dkappa};
    const auto rows = spectrum(dev, pump, cfg.k_first, cfg.k_last, opts);
    const std::string csv = spectrum_csv(rows, info);

    std::string svg;
    if (cfg.svg) {
      PlotSpec plot;
      plot.title = "Two-mode squeezing per pair";
      plot.x_label = "pair index k (signal k, idler -k)";
      plot.y_label = "squeezing level (dB)";
      PlotSeries s{"device", {}, {}, "#1f77b4", true};
      for (const auto& r : rows) {
        s.x.push_back(r.detuning.k);
        s.y.push_back(r.result.sl_db);
      }
      plot.series.push_back(std::move(s));
      if (!dev.crossings().empty() || !dev.mode_offsets().empty()) {
        const DeviceModel bare(dev.target(), {}, dev.eta_e());
        PlotSeries ref{"no crossing", {}, {}, "#999999", false};
        for (const auto& r : spectrum(bare, pump, cfg.k_first, cfg.k_last, opts)) {
          ref.x.push_back(r.detuning.k);
          ref.y.push_back(r.result.sl_db);
        }
        plot.series.push_back(std::move(ref));
      }
      for (const auto& c : dev.crossings()) {
        const double mirror = std::abs(c.k0);
        plot.x_marks.emplace_back(mirror, c.k0 < 0 ? "crossing at k0=" + fmt(c.k0) + " (mirror)"
                                                   : "crossing at k0=" + fmt(c.k0));
      }
      svg = render_svg(plot);
    }

    write_atomic(cfg.out, csv);
    if (cfg.svg) write_atomic(*cfg.svg, svg);

    const auto best = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.result.sl_db < b.result.sl_db;
    });
    const auto worst = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.result.sl_db < b.result.sl_db;
    });
    const auto warned = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.warn; });
    out << "wrote " << rows.size() << " rows to " << cfg.out.string() << '\n';
    out << "best k=" << best->detuning.k << " sl_db=" << fmt(best->result.sl_db) << ", worst k="
        << worst->detuning.k << " sl_db=" << fmt(worst->result.sl_db) << ", warn_flag rows=" << warned
        << '\n';
    return kExitOk;
  });
}

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded("verify", err, [&] {
    if (cfg.zeta_points < 2 || cfg.delta_points < 2)
      throw std::invalid_argument("grid needs at least 2 points per axis");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("--tolerance must be > 0");

    const auto grid = kernels::default_oracle_grid(cfg.zeta_points, cfg.delta_points);
    const kernels::ClosedForm formula =
        cfg.formula ? *cfg.formula : kernels::ClosedForm(kernels::closed_form_variance);
    const auto rep = kernels::oracle_grid_parallel(grid, formula);

    bool ok = true;
    out << "oracle grid: " << rep.points << " points, max relative discrepancy "
        << fmt(rep.max_rel_error) << " (tolerance " << fmt(cfg.tolerance) << ")\n";
    if (!(rep.max_rel_error <= cfg.tolerance)) {
      ok = false;
      const auto& w = rep.worst;
      out << "FAIL worst point: alpha=" << fmt(w.alpha) << " zeta_bar=" << fmt(w.zeta_bar)
          << " delta=" << fmt(w.delta) << " eta_e=" << fmt(w.eta_e) << " eta_d=" << fmt(w.eta_d)
          << " formula=" << fmt(rep.worst_formula) << " oracle=" << fmt(rep.worst_oracle) << '\n';
    }
    const bool psd = rep.min_cov_eigenvalue >= -1e-12;
    out << "covariance: min eigenvalue " << fmt(rep.min_cov_eigenvalue) << (psd ? "" : "  FAIL") << '\n';
    const bool heisenberg = rep.min_uncertainty_product >= 1.0 - 1e-9;
    out << "uncertainty product at eta=1: min " << fmt(rep.min_uncertainty_product)
        << (heisenberg ? "" : "  FAIL") << '\n';
    ok = ok && psd && heisenberg;

    if (cfg.stochastic) {
      std::size_t i = 0;
      for (const auto& p : stochastic_points()) {
        auto dyn = drift_matrix(p.alpha, p.zeta_bar, p.delta);
        dyn.efficiencies = {p.eta_e, p.eta_e, p.eta_d};
        const auto est = stochastic_estimate(dyn, cfg.stochastic_duration, cfg.stochastic_step,
                                             cfg.seed + i++);
        const double exact = kernels::closed_form_variance(p.alpha, p.zeta_bar, p.delta, p.eta_e * p.eta_d);
        const double z = std::abs(est.variance - exact) / est.standard_error;
        const bool pass = z <= 3.0;
        ok = ok && pass;
        out << "stochastic alpha=" << fmt(p.alpha) << " zeta_bar=" << fmt(p.zeta_bar)
            << " delta=" << fmt(p.delta) << " eta_e=" << fmt(p.eta_e) << " eta_d=" << fmt(p.eta_d)
            << ": estimate " << fmt(est.variance) << " +- " << fmt(est.standard_error) << " vs "
            << fmt(exact) << " (" << fmt(z) << " se)" << (pass ? "" : "  FAIL") << '\n';
      }
    }
    out << (ok ? "verify: pass\n" : "verify: FAIL\n");
    return ok ? kExitOk : kExitVerifyFailed;
  });
}

int cmd_calibrate(const CalibrateConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded("calibrate", err, [&] {
    if (cfg.zeta0.empty()) throw std::invalid_argument("--zeta0 list is empty");
    if (!(cfg.eta_e > 0.0 && cfg.eta_e <= 1.0)) throw std::invalid_argument("--eta-e must lie in (0, 1]");
    if (cfg.pth_uw && !(*cfg.pth_uw > 0.0)) throw std::invalid_argument("--pth-uw must be > 0");

    RunInfo info{"calibrate", {}};
    info.add("alpha", cfg.alpha).add("eta_e", cfg.eta_e).add("pth_uw", opt_text(cfg.pth_uw));
    std::string zlist;
    for (double z : cfg.zeta0) zlist += (zlist.empty() ? "" : ";") + fmt(z);
    info.add("zeta0", zlist);

    std::optional<double> pth_w;
    if (cfg.pth_uw) pth_w = *cfg.pth_uw * 1e-6;
    std::vector<CalibrationPoint> points;
    for (double z : cfg.zeta0) points.push_back(calibrate(cfg.alpha, z, cfg.eta_e, pth_w));

    write_atomic(cfg.out, calibration_csv(points, info));
    out << "alpha zeta0 f_squared power_uW transmission\n";
    for (const auto& p : points) {
      char power[32] = "-";
      if (p.power) std::snprintf(power, sizeof power, "%.1f", *p.power * 1e6);
      char line[160];
      std::snprintf(line, sizeof line, "%.3f %.3f %.4f %s %.4f\n", p.alpha, p.zeta0, p.f_squared, power,
                    p.transmission);
      out << line;
    }
    return kExitOk;
  });
}

int cmd_plan(const PlanConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded("plan", err, [&] {
    const bool physical = cfg.d2_hz || cfg.wavelength_nm || cfg.loaded_q;
    if (cfg.d2_norm && physical)
      throw std::invalid_argument("give either --d2-norm or --d2-hz/--wavelength-nm/--loaded-q, not both");
    double d2n = 0.0;
    RunInfo info{"plan", {}};
    info.add("alpha", cfg.alpha);
    if (cfg.d2_norm) {
      d2n = *cfg.d2_norm;
    } else if (cfg.d2_hz && cfg.wavelength_nm && cfg.loaded_q) {
      d2n = d2_norm_from_physical(*cfg.d2_hz, *cfg.wavelength_nm, *cfg.loaded_q);
      info.add("d2_hz", *cfg.d2_hz).add("wavelength_nm", *cfg.wavelength_nm).add("loaded_q", *cfg.loaded_q);
    } else {
      throw std::invalid_argument("need --d2-norm or all of --d2-hz, --wavelength-nm, --loaded-q");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
      throw std::invalid_argument("--alpha must satisfy 0 < alpha < 1 (below the oscillation threshold)");
    if (!(cfg.zeta0_max >= 0.0)) throw std::invalid_argument("--zeta0-max must be >= 0");
    if (cfg.k_max < 1) throw std::invalid_argument("--k-max must be >= 1");
    if (cfg.eta && !(*cfg.eta > 0.0 && *cfg.eta <= 1.0)) throw std::invalid_argument("--eta must lie in (0, 1]");
    info.add("d2_norm", d2n).add("zeta0_max", cfg.zeta0_max).add("sweep_step", cfg.sweep_step);
    info.add("optimize_step", cfg.optimize_step).add("k_max", std::to_string(cfg.k_max));

    const auto sweep = sweep_zeta0(cfg.alpha, d2n, cfg.zeta0_max, cfg.k_max, cfg.sweep_step);
    ZetaOptimum best;
    if (cfg.zeta0_max > 0.0) {
      best = optimize_zeta0(cfg.alpha, d2n, cfg.zeta0_max, cfg.k_max, cfg.optimize_step);
    } else {
      best.plan = count_uniform_pairs(cfg.alpha, 0.0, d2n, cfg.k_max);
    }

    nlohmann::json j;
    j["tool"] = std::string("qmcomb ") + kToolVersion;
    j["parameters"] = nlohmann::json::object();
    for (const auto& [k, v] : info.params) j["parameters"][k] = v;
    j["d2_norm"] = d2n;
    j["zeta0_star"] = best.zeta0_star;
    j["optimum"] = plan_json(best.plan);
    j["sweep"] = nlohmann::json::array();
    for (const auto& p : sweep) j["sweep"].push_back({{"zeta0", p.zeta0}, {"n_pairs", p.n_pairs}});
    if (cfg.eta) {
      const auto deg = degradation_within_regime(cfg.alpha, *cfg.eta);
      j["degradation"] = {{"eta", *cfg.eta},
                          {"max_db_degradation", deg.max_db_degradation},
                          {"min_reduction_ratio", deg.min_reduction_ratio}};
    }

    std::string svg;
    if (cfg.svg) {
      PlotSpec plot;
      plot.title = "Pairs inside the uniform regime";
      plot.x_label = "zeta0";
      plot.y_label = "pairs";
      PlotSeries s{"n_pairs", {}, {}, "#1f77b4", true};
      for (const auto& p : sweep) {
        s.x.push_back(p.zeta0);
        s.y.push_back(p.n_pairs);
      }
      plot.series.push_back(std::move(s));
      plot.x_marks.emplace_back(best.zeta0_star, "best");
      svg = render_svg(plot);
    }

    write_atomic(cfg.out, j.dump(2) + "\n");
    write_atomic(cfg.sweep_out, sweep_csv(sweep, info));
    if (cfg.svg) write_atomic(*cfg.svg, svg);

    out << "d2_norm=" << fmt(d2n) << " best zeta0=" << fmt(best.zeta0_star) << " n_pairs="
        << best.plan.n_pairs << " (k " << best.plan.k_min << ".." << best.plan.k_max
        << ", continuum estimate " << fmt(best.plan.estimate) << ")\n";
    out << "sweep n_pairs:";
    for (const auto& p : sweep) out << ' ' << p.n_pairs;
    out << '\n';
    return kExitOk;
  });
}

int cmd_fit(const FitConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded("fit", err, [&] {
    if (cfg.scan.empty()) throw std::invalid_argument("--scan is required");
    if (cfg.degree != 2 && cfg.degree != 3) throw std::invalid_argument("--degree must be 2 or 3");
    if (!(cfg.mad_cut > 0.0)) throw std::invalid_argument("--mad-cut must be > 0");
    if (cfg.kappa_hz && !(*cfg.kappa_hz > 0.0)) throw std::invalid_argument("--kappa-hz must be > 0");

    const auto scan = load_scan(cfg.scan);
    FitOptions opts;
    opts.degree = cfg.degree;
    opts.robust = cfg.robust;
    opts.linear_term = cfg.linear_term;
    opts.mad_cut = cfg.mad_cut;
    auto fit = detect_amx(scan, fit_background(scan, opts), cfg.threshold, cfg.kappa_hz);
    const double kappa = cfg.kappa_hz ? *cfg.kappa_hz : *scan.kappa_hz;

    RunInfo info{"fit", {}};
    info.add("scan", cfg.scan.string()).add("degree", std::to_string(cfg.degree));
    info.add("robust", cfg.robust ? "1" : "0").add("linear_term", cfg.linear_term ? "1" : "0");
    info.add("mad_cut", cfg.mad_cut).add("threshold", cfg.threshold).add("kappa_hz", kappa);

    // With a crossing FSR offset the crossings can be modelled, and the
    // background is refit jointly with them; report that fit.
    std::string device_json;
    std::vector<CrossingFit> clusters;
    const double background_d2 = fit.d2_fit_hz;
    bool refined = false;
    if (cfg.device_out || cfg.crossing_fsr_offset_hz != 0.0) {
      if (!(cfg.eta_e >= 0.0 && cfg.eta_e <= 1.0)) throw std::invalid_argument("--eta-e must lie in [0, 1]");
      DeviceBuildOptions bopts;
      bopts.fsr_hz = cfg.fsr_hz;
      bopts.crossing_fsr_offset_hz = cfg.crossing_fsr_offset_hz;
      auto dfit = to_device_model(scan, fit, kappa, ExtractionTable(cfg.eta_e), bopts);
      device_json = device_to_json(dfit.device).dump(2) + "\n";
      clusters = std::move(dfit.clusters);
      refined = std::any_of(clusters.begin(), clusters.end(), [](const auto& c) { return c.fitted; });
      if (refined) fit = std::move(dfit.refined);
    }
    info.add("crossing_fsr_offset_hz", cfg.crossing_fsr_offset_hz).add("refined", refined ? "1" : "0");

    std::string svg;
    if (cfg.svg) {
      PlotSpec plot;
      plot.title = "Residuals from the dispersion background";
      plot.x_label = "mode index k";
      plot.y_label = "residual (MHz)";
      PlotSeries s{"residual", {}, {}, "#1f77b4", true};
      for (std::size_t i = 0; i < scan.samples.size(); ++i) {
        s.x.push_back(scan.samples[i].k);
        s.y.push_back(fit.residuals_hz[i] * 1e-6);
      }
      plot.series.push_back(std::move(s));
      for (int k : fit.flagged) plot.x_marks.emplace_back(k, "");
      svg = render_svg(plot);
    }

    write_atomic(cfg.out, fit_report_csv(scan, fit, info));
    if (cfg.device_out) write_atomic(*cfg.device_out, device_json);
    if (cfg.svg) write_atomic(*cfg.svg, svg);

    if (refined) out << "background-only d2_fit_hz=" << fmt(background_d2) << " (before crossing refit)\n";
    out << "d2_fit_hz=" << fmt(fit.d2_fit_hz);
    if (cfg.degree == 3) out << " d3_fit_hz=" << fmt(fit.d3_fit_hz);
    out << " flagged=" << fit.flagged.size() << '\n';
    out << "windows:";
    for (const auto& w : fit.windows) out << ' ' << w.k_first << ".." << w.k_last << '(' << w.size() << ')';
    out << '\n';
    for (const auto& c : clusters) {
      out << "cluster " << c.cluster.k_first << ".." << c.cluster.k_last << ": ";
      if (c.fitted)
        out << "crossing g_hz=" << fmt(c.crossing.g_coupling / kTwoPi)
            << " kappa_c_hz=" << fmt(c.crossing.kappa_c / kTwoPi) << " k0=" << fmt(c.crossing.k0);
      else
        out << "raw offsets";
      if (!c.note.empty()) out << " (" << c.note << ")";
      out << '\n';
    }
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qmcomb: two-mode squeezing spectra of Kerr microcombs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "read options from a TOML or INI file (command-line flags win)");
  app.require_subcommand(1, 1);

  SpectrumConfig sc;
  std::string sc_out = sc.out.string(), sc_svg, sc_device;
  auto* sp = app.add_subcommand("spectrum", "per-pair squeezing spectrum to CSV");
  sp->add_option("--device", sc_device, "device JSON file (overrides the inline family flags)");
  sp->add_option("--fsr-hz", sc.device.fsr_hz, "free spectral range")->capture_default_str();
  sp->add_option("--d2-hz", sc.device.d2_hz, "second-order dispersion D2/2pi")->capture_default_str();
  sp->add_option("--d3-hz", sc.device.d3_hz, "third-order dispersion D3/2pi")->capture_default_str();
  sp->add_option("--kappa-hz", sc.device.kappa_hz, "loaded linewidth kappa/2pi")->capture_default_str();
  sp->add_option("--eta-e", sc.device.eta_e, "extraction efficiency");
  sp->add_option("--alpha", sc.alpha, "normalized parametric coupling, < 1")->capture_default_str();
  sp->add_option("--zeta0", sc.zeta0, "pump detuning in units of kappa/2")->capture_default_str();
  sp->add_option("--eta-d", sc.eta_d, "detection efficiency")->capture_default_str();
  sp->add_option("--k-first", sc.k_first)->capture_default_str();
  sp->add_option("--k-last", sc.k_last)->capture_default_str();
  sp->add_option("--warn-dkappa", sc.warn_dkappa, "flag pairs whose added loss exceeds this (kappa/2 units)")
      ->capture_default_str();
  sp->add_option("--out", sc_out, "output CSV")->capture_default_str();
  sp->add_option("--svg", sc_svg, "also write an SVG plot here");

  VerifyConfig vc;
  auto* vp = app.add_subcommand("verify", "closed form against the Langevin oracle");
  vp->add_option("--zeta-points", vc.zeta_points)->capture_default_str();
  vp->add_option("--delta-points", vc.delta_points)->capture_default_str();
  vp->add_option("--tolerance", vc.tolerance, "max relative discrepancy")->capture_default_str();
  vp->add_flag("--stochastic", vc.stochastic, "add Euler-Maruyama checks at fixed points");
  vp->add_option("--stochastic-duration", vc.stochastic_duration, "simulated time per point, 2/kappa units")
      ->capture_default_str();
  vp->add_option("--stochastic-step", vc.stochastic_step)->capture_default_str();
  vp->add_option("--seed", vc.seed)->capture_default_str();

  CalibrateConfig cc;
  std::string cc_out = cc.out.string();
  auto* cp = app.add_subcommand("calibrate", "pump power and transmission for target alpha, zeta0");
  cp->add_option("--alpha", cc.alpha)->capture_default_str();
  cp->add_option("--zeta0", cc.zeta0, "one or more pump detunings")->expected(1, -1)->delimiter(',');
  cp->add_option("--pth-uw", cc.pth_uw, "parametric threshold power in microwatts");
  cp->add_option("--eta-e", cc.eta_e)->capture_default_str();
  cp->add_option("--out", cc_out)->capture_default_str();

  PlanConfig pc;
  std::string pc_out = pc.out.string(), pc_sweep = pc.sweep_out.string(), pc_svg;
  auto* pp = app.add_subcommand("plan", "count pairs inside the uniform squeezing regime");
  pp->add_option("--alpha", pc.alpha)->capture_default_str();
  pp->add_option("--d2-norm", pc.d2_norm, "D2 in units of kappa/2");
  pp->add_option("--d2-hz", pc.d2_hz, "D2/2pi");
  pp->add_option("--wavelength-nm", pc.wavelength_nm);
  pp->add_option("--loaded-q", pc.loaded_q);
  pp->add_option("--zeta0-max", pc.zeta0_max)->capture_default_str();
  pp->add_option("--sweep-step", pc.sweep_step)->capture_default_str();
  pp->add_option("--optimize-step", pc.optimize_step)->capture_default_str();
  pp->add_option("--k-max", pc.k_max, "highest mode index available")->capture_default_str();
  pp->add_option("--eta", pc.eta, "total efficiency for the degradation report");
  pp->add_option("--out", pc_out, "plan JSON")->capture_default_str();
  pp->add_option("--sweep-out", pc_sweep, "zeta0 sweep CSV")->capture_default_str();
  pp->add_option("--svg", pc_svg);

  FitConfig fc;
  std::string fc_scan, fc_out = fc.out.string(), fc_dev, fc_svg;
  bool no_robust = false;
  auto* fp = app.add_subcommand("fit", "fit the dispersion background and flag crossings");
  fp->add_option("--scan", fc_scan, "CSV with header k,dint_hz")->required();
  fp->add_option("--degree", fc.degree)->capture_default_str();
  fp->add_flag("--no-robust", no_robust, "plain least squares, no outlier rejection");
  fp->add_flag("--linear-term", fc.linear_term, "fit a residual linear trend too");
  fp->add_option("--mad-cut", fc.mad_cut)->capture_default_str();
  fp->add_option("--threshold", fc.threshold, "flag threshold in linewidths (kappa/2)")->capture_default_str();
  fp->add_option("--kappa-hz", fc.kappa_hz, "loaded linewidth if the scan lacks it");
  fp->add_option("--out", fc_out)->capture_default_str();
  fp->add_option("--device-out", fc_dev, "write a device JSON with fitted crossings");
  fp->add_option("--fsr-hz", fc.fsr_hz, "target FSR recorded in the device file")->capture_default_str();
  fp->add_option("--crossing-fsr-offset-hz", fc.crossing_fsr_offset_hz,
                 "D1 difference of the crossing family, needed to fit crossings")
      ->capture_default_str();
  fp->add_option("--eta-e", fc.eta_e)->capture_default_str();
  fp->add_option("--svg", fc_svg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qmcomb: " << e.what() << '\n';
    return kExitUsage;
  }

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };
  if (sp->parsed()) {
    sc.out = sc_out;
    sc.svg = opt_path(sc_svg);
    sc.device.device_file = opt_path(sc_device);
    return cmd_spectrum(sc, out, err);
  }
  if (vp->parsed()) return cmd_verify(vc, out, err);
  if (cp->parsed()) {
    cc.out = cc_out;
    return cmd_calibrate(cc, out, err);
  }
  if (pp->parsed()) {
    pc.out = pc_out;
    pc.sweep_out = pc_sweep;
    pc.svg = opt_path(pc_svg);
    return cmd_plan(pc, out, err);
  }
  fc.scan = fc_scan;
  fc.out = fc_out;
  fc.robust = !no_robust;
  fc.device_out = opt_path(fc_dev);
  fc.svg = opt_path(fc_svg);
  return cmd_fit(fc, out, err);
}

}  // namespace qmc::cli
