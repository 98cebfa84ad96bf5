#include "qmc/dispersion_fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "qmc/nelder_mead.hpp"

namespace qmc {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  std::istringstream is(t);
  is >> out;
  return !is.fail() && is.eof() && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
  const std::string t = trim(text);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return !t.empty() && res.ec == std::errc{} && res.ptr == last;
}

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

struct PolyFit {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

// Weighted least squares; weight 0 drops a sample.
PolyFit least_squares(const DispersionScan& scan, const std::vector<double>& weight,
                      const FitOptions& opts) {
  std::vector<int> powers;
  if (opts.linear_term) powers.push_back(1);
  powers.push_back(2);
  if (opts.degree == 3) powers.push_back(3);

  const auto n_use = static_cast<Eigen::Index>(
      std::count_if(weight.begin(), weight.end(), [](double w) { return w > 0.0; }));
  const auto cols = static_cast<Eigen::Index>(powers.size());
  if (n_use < cols + 1)
    throw std::runtime_error("fit_background: degenerate design, " + std::to_string(n_use) +
                             " usable samples for " + std::to_string(cols) + " coefficients");

  double k_scale = 1.0;
  for (const auto& s : scan.samples) k_scale = std::max(k_scale, std::abs(static_cast<double>(s.k)));

  Eigen::MatrixXd a(n_use, cols);
  Eigen::VectorXd b(n_use);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    if (!(weight[i] > 0.0)) continue;
    const double x = scan.samples[i].k / k_scale;
    const double sw = std::sqrt(weight[i]);
    for (Eigen::Index c = 0; c < cols; ++c)
      a(row, c) = sw * std::pow(x, powers[static_cast<std::size_t>(c)]);
    b[row] = sw * scan.samples[i].d_int_hz;
    ++row;
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  PolyFit out;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const int p = powers[static_cast<std::size_t>(c)];
    const double v = coef[c] / std::pow(k_scale, p);
    if (p == 1) out.d1 = v;
    if (p == 2) out.d2 = 2.0 * v;
    if (p == 3) out.d3 = 6.0 * v;
  }
  return out;
}

PolyFit least_squares(const DispersionScan& scan, const std::vector<bool>& use,
                      const FitOptions& opts) {
  return least_squares(scan, std::vector<double>(use.begin(), use.end()), opts);
}

}  // namespace

DispersionScan parse_scan(std::istream& in, const std::string& source_name) {
  DispersionScan scan;
  std::map<int, int> seen;
  std::string line;
  int line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& msg, int at) -> ScanParseError {
    return ScanParseError(source_name + ":" + std::to_string(at) + ": " + msg, at);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto sep = body.find_first_of("=:");
      if (sep == std::string::npos) continue;
      const std::string key = trim(body.substr(0, sep));
      double value = 0.0;
      if (key != "kappa_hz" && key != "reference_wavelength_nm") continue;
      if (!parse_double(body.substr(sep + 1), value))
        throw fail("non-numeric value for metadata '" + key + "'", line_no);
      if (key == "kappa_hz") {
        if (!(value > 0.0)) throw fail("kappa_hz must be > 0", line_no);
        scan.kappa_hz = value;
      } else {
        scan.reference_wavelength_nm = value;
      }
      continue;
    }
    if (!header) {
      std::string h = t;
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\t'; }), h.end());
      if (h != "k,dint_hz") throw fail("expected header 'k,dint_hz', got '" + t + "'", line_no);
      header = true;
      continue;
    }
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw fail("expected two comma-separated fields", line_no);
    DispersionSample s;
    if (!parse_int(t.substr(0, comma), s.k)) throw fail("non-integer mode index '" + trim(t.substr(0, comma)) + "'", line_no);
    if (!parse_double(t.substr(comma + 1), s.d_int_hz))
      throw fail("non-numeric dint_hz '" + trim(t.substr(comma + 1)) + "'", line_no);
    if (auto it = seen.find(s.k); it != seen.end())
      throw fail("duplicate mode index k=" + std::to_string(s.k) + " (first on line " +
                     std::to_string(it->second) + ")",
                 line_no);
    seen.emplace(s.k, line_no);
    scan.samples.push_back(s);
  }
  if (!header) throw ScanParseError(source_name + ": empty file or missing header 'k,dint_hz'", 0);
  if (scan.samples.empty()) throw ScanParseError(source_name + ": no samples", 0);
  std::sort(scan.samples.begin(), scan.samples.end(),
            [](const auto& a, const auto& b) { return a.k < b.k; });
  return scan;
}

DispersionScan load_scan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScanParseError("cannot open scan file " + path.string(), 0);
  return parse_scan(in, path.string());
}

double FitReport::model(int k) const {
  const double x = k;
  return d1_fit_hz * x + d2_fit_hz * x * x / 2.0 + d3_fit_hz * x * x * x / 6.0;
}

FitReport fit_background(const DispersionScan& scan, const FitOptions& opts) {
  if (opts.degree != 2 && opts.degree != 3)
    throw std::invalid_argument("fit_background: degree must be 2 or 3");
  const std::size_t n = scan.samples.size();
  if (n < static_cast<std::size_t>(opts.degree + 2))
    throw std::invalid_argument("fit_background: need at least degree + 2 samples");

  double scale = 0.0;
  for (const auto& s : scan.samples) scale = std::max(scale, std::abs(s.d_int_hz));
  const double mad_floor = 1e-9 * scale;

  FitReport rep;
  rep.degree = opts.degree;
  rep.linear_term = opts.linear_term;
  std::vector<bool> use(n, true);
  auto apply = [&](const PolyFit& p) {
    rep.d1_fit_hz = p.d1;
    rep.d2_fit_hz = p.d2;
    rep.d3_fit_hz = p.d3;
    rep.fitted_hz.resize(n);
    rep.residuals_hz.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      rep.fitted_hz[i] = rep.model(scan.samples[i].k);
      rep.residuals_hz[i] = scan.samples[i].d_int_hz - rep.fitted_hz[i];
    }
  };

  apply(least_squares(scan, use, opts));
  rep.iterations = 1;
  if (!opts.robust || scale == 0.0) {  // all-zero data has nothing to reject
    rep.inlier = use;
    return rep;
  }

  // Start the rejection from an L1 fit (IRLS). An ordinary fit dragged by a
  // large crossing can settle the cut on the wrong side of the parabola.
  {
    std::vector<double> w(n);
    double prev = rep.d2_fit_hz;
    for (int it = 0; it < 200; ++it) {
      for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::max(std::abs(rep.residuals_hz[i]), mad_floor);
      apply(least_squares(scan, w, opts));
      if (std::abs(rep.d2_fit_hz - prev) <= 1e-12 * std::max(std::abs(prev), mad_floor)) break;
      prev = rep.d2_fit_hz;
    }
  }
  bool refit = false;
  while (rep.iterations < opts.max_iterations) {
    std::vector<double> res;
    for (std::size_t i = 0; i < n; ++i)
      if (use[i]) res.push_back(rep.residuals_hz[i]);
    const double center = median(res);
    for (auto& r : res) r = std::abs(r - center);
    const double mad = std::max(median(res), mad_floor);
    std::vector<bool> next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = std::abs(rep.residuals_hz[i] - center) <= opts.mad_cut * mad;
    if (refit && next == use) break;
    use = std::move(next);
    apply(least_squares(scan, use, opts));
    refit = true;
    ++rep.iterations;
  }
  rep.inlier = use;
  return rep;
}

std::vector<ModeWindow> unflagged_windows(const DispersionScan& scan, const std::vector<int>& flagged) {
  std::vector<ModeWindow> out;
  bool open = false;
  ModeWindow cur;
  int prev_k = 0;
  for (const auto& s : scan.samples) {
    const bool bad = std::binary_search(flagged.begin(), flagged.end(), s.k);
    if (bad || (open && s.k != prev_k + 1)) {
      if (open) out.push_back(cur);
      open = false;
    }
    if (!bad) {
      if (!open) cur.k_first = s.k;
      cur.k_last = s.k;
      open = true;
    }
    prev_k = s.k;
  }
  if (open) out.push_back(cur);
  return out;
}

std::vector<ModeWindow> flagged_clusters(const std::vector<int>& flagged, int max_gap) {
  std::vector<ModeWindow> out;
  for (int k : flagged) {
    if (!out.empty() && k - out.back().k_last <= max_gap + 1)
      out.back().k_last = k;
    else
      out.push_back({k, k});
  }
  return out;
}

FitReport detect_amx(const DispersionScan& scan, FitReport fit, double threshold_linewidths,
                     std::optional<double> kappa_hz) {
  const auto kappa = kappa_hz ? kappa_hz : scan.kappa_hz;
  if (!kappa)
    throw std::invalid_argument(
        "detect_amx: loaded linewidth unknown; add '# kappa_hz = <value>' to the scan or pass "
        "--kappa-hz");
  if (!(threshold_linewidths >= 0.0))
    throw std::invalid_argument("detect_amx: threshold must be >= 0");
  if (fit.residuals_hz.size() != scan.samples.size())
    throw std::invalid_argument("detect_amx: fit does not belong to this scan");
  fit.threshold_hz = threshold_linewidths * 0.5 * *kappa;
  fit.flagged.clear();
  for (std::size_t i = 0; i < scan.samples.size(); ++i)
    if (std::abs(fit.residuals_hz[i]) > fit.threshold_hz) fit.flagged.push_back(scan.samples[i].k);
  fit.windows = unflagged_windows(scan, fit.flagged);
  return fit;
}

double crossing_shift_hz(double g_hz, double kappa_c_hz, double k0, double dd1_hz, int k) {
  const double delta = (static_cast<double>(k) - k0) * dd1_hz;
  const double half = 0.5 * kappa_c_hz;
  return -g_hz * g_hz * delta / (half * half + delta * delta);
}

namespace {

// Variable projection: Nelder-Mead over (ln G, ln kappa_c, k0) of every fitted
// crossing, with the polynomial solved by least squares inside the cost.
// Modes carried as raw offsets stay out of the background.
FitReport refine_with_crossings(const DispersionScan& scan, const FitReport& fit,
                                std::vector<CrossingFit>& clusters, const std::map<int, double>& offsets,
                                double dd1, double scale, double x_tol) {
  const std::size_t n = scan.samples.size();
  FitOptions opts;
  opts.degree = fit.degree;
  opts.linear_term = fit.linear_term;

  std::vector<double> weight(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (offsets.count(scan.samples[i].k)) weight[i] = 0.0;

  std::vector<std::size_t> which;
  std::vector<double> x0, step, lo, hi;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (!clusters[c].fitted) continue;
    which.push_back(c);
    const auto& cr = clusters[c].crossing;
    x0.insert(x0.end(), {std::log(cr.g_coupling / kTwoPi), std::log(cr.kappa_c / kTwoPi), cr.k0});
    step.insert(step.end(), {0.05, 0.05, 0.05});
    lo.insert(lo.end(), {x0[x0.size() - 3] - 5, x0[x0.size() - 2] - 5, cr.k0 - 2});
    hi.insert(hi.end(), {x0[x0.size() - 3] + 5, x0[x0.size() - 2] + 5, cr.k0 + 2});
  }

  DispersionScan bare = scan;
  auto strip = [&](const std::vector<double>& p) {
    for (std::size_t i = 0; i < n; ++i) {
      double shift = 0.0;
      for (std::size_t j = 0; j < which.size(); ++j)
        shift += crossing_shift_hz(std::exp(p[3 * j]), std::exp(p[3 * j + 1]), p[3 * j + 2], dd1,
                                   scan.samples[i].k);
      bare.samples[i].d_int_hz = scan.samples[i].d_int_hz - shift;
    }
    return least_squares(bare, weight, opts);
  };
  auto cost = [&](const std::vector<double>& p) {
    const auto poly = strip(p);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] == 0.0) continue;
      const double k = scan.samples[i].k;
      const double model = poly.d1 * k + poly.d2 * k * k / 2.0 + poly.d3 * k * k * k / 6.0;
      const double e = (bare.samples[i].d_int_hz - model) / scale;
      s += e * e;
    }
    return s;
  };

  const auto best = nelder_mead(cost, x0, step, lo, hi, x_tol * 1e-2);
  const auto poly = strip(best.x);
  for (std::size_t j = 0; j < which.size(); ++j) {
    auto& cf = clusters[which[j]];
    cf.crossing.g_coupling = kTwoPi * std::exp(best.x[3 * j]);
    cf.crossing.kappa_c = kTwoPi * std::exp(best.x[3 * j + 1]);
    cf.crossing.k0 = best.x[3 * j + 2];
  }

  FitReport out = fit;
  out.d1_fit_hz = poly.d1;
  out.d2_fit_hz = poly.d2;
  out.d3_fit_hz = poly.d3;
  for (std::size_t i = 0; i < n; ++i) {
    out.fitted_hz[i] = out.model(scan.samples[i].k);
    out.residuals_hz[i] = scan.samples[i].d_int_hz - out.fitted_hz[i];
    out.inlier[i] = weight[i] > 0.0;
  }
  out.flagged.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(out.residuals_hz[i]) > fit.threshold_hz) out.flagged.push_back(scan.samples[i].k);
  out.windows = unflagged_windows(scan, out.flagged);
  return out;
}

}  // namespace

DeviceFit to_device_model(const DispersionScan& scan, const FitReport& fit, double kappa_hz,
                          const ExtractionTable& eta_e, const DeviceBuildOptions& opts) {
  if (!(kappa_hz > 0.0)) throw std::invalid_argument("to_device_model: kappa_hz must be > 0");
  if (!(opts.fsr_hz > 0.0)) throw std::invalid_argument("to_device_model: fsr_hz must be > 0");
  if (fit.residuals_hz.size() != scan.samples.size())
    throw std::invalid_argument("to_device_model: fit does not belong to this scan");

  ModeFamily target;
  if (scan.reference_wavelength_nm)
    target.omega0 = kTwoPi * kSpeedOfLight / (*scan.reference_wavelength_nm * 1e-9);
  target.d1 = kTwoPi * opts.fsr_hz;
  target.d2 = kTwoPi * fit.d2_fit_hz;
  target.d3 = kTwoPi * fit.d3_fit_hz;
  target.kappa = kTwoPi * kappa_hz;

  std::map<int, double> residual_at;
  for (std::size_t i = 0; i < scan.samples.size(); ++i)
    residual_at[scan.samples[i].k] = fit.residuals_hz[i];

  std::vector<CrossingFit> clusters;
  std::vector<CrossingFamily> crossings;
  std::map<int, double> offsets;
  const double dd1 = opts.crossing_fsr_offset_hz;

  for (const auto& cl : flagged_clusters(fit.flagged)) {
    CrossingFit cf;
    cf.cluster = cl;
    std::vector<int> members;
    for (int k : fit.flagged)
      if (k >= cl.k_first && k <= cl.k_last) members.push_back(k);

    auto fallback = [&](const std::string& why) {
      cf.fitted = false;
      cf.note = why;
      for (int k : members) offsets[k] = kTwoPi * residual_at.at(k);
    };

    if (static_cast<int>(members.size()) < opts.min_cluster_modes) {
      fallback("cluster has " + std::to_string(members.size()) + " flagged mode(s); kept raw offsets");
      clusters.push_back(cf);
      continue;
    }
    if (dd1 == 0.0) {
      fallback("no crossing FSR offset supplied; kept raw offsets");
      clusters.push_back(cf);
      continue;
    }

    std::vector<std::pair<int, double>> pts;
    for (const auto& [k, r] : residual_at)
      if (k >= cl.k_first - opts.context_modes && k <= cl.k_last + opts.context_modes)
        pts.emplace_back(k, r);

    double wsum = 0.0, ksum = 0.0, peak = 0.0;
    for (const auto& [k, r] : pts) {
      wsum += std::abs(r);
      ksum += k * std::abs(r);
      peak = std::max(peak, std::abs(r));
    }
    const double scale = 0.5 * kappa_hz;
    auto cost = [&](const std::vector<double>& p) {
      const double g = std::exp(p[0]);
      const double kc = std::exp(p[1]);
      double s = 0.0;
      for (const auto& [k, r] : pts) {
        const double e = (crossing_shift_hz(g, kc, p[2], dd1, k) - r) / scale;
        s += e * e;
      }
      return s;
    };

    const double centroid = ksum / wsum;
    const double lo_k = cl.k_first - 1.0;
    const double hi_k = cl.k_last + 1.0;
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (double width : {0.3, 1.0, 3.0}) {
      for (double shift : {-0.5, 0.0, 0.5}) {
        // peak |shift| = G^2 / kappa_c at |k - k0| = width, kappa_c = 2 width |dD1|
        const double kc = 2.0 * width * std::abs(dd1);
        const double g = std::sqrt(peak * kc);
        std::vector<double> x0{std::log(g), std::log(kc), std::clamp(centroid + shift, lo_k, hi_k)};
        auto r = nelder_mead(cost, x0, {0.3, 0.3, 0.3}, {x0[0] - 20, x0[1] - 20, lo_k},
                             {x0[0] + 20, x0[1] + 20, hi_k}, opts.x_tol);
        if (r.value < best.value) best = r;
      }
    }
    cf.fitted = true;
    cf.crossing.g_coupling = kTwoPi * std::exp(best.x[0]);
    cf.crossing.kappa_c = kTwoPi * std::exp(best.x[1]);
    cf.crossing.k0 = best.x[2];
    cf.crossing.d1_c = target.d1 + kTwoPi * dd1;
    cf.rms_residual_hz = scale * std::sqrt(best.value / static_cast<double>(pts.size()));
    cf.note = best.converged ? "fitted" : "fitted (simplex did not reach tolerance)";
    crossings.push_back(cf.crossing);
    clusters.push_back(cf);
  }

  FitReport refined = fit;
  if (!crossings.empty()) {
    refined = refine_with_crossings(scan, fit, clusters, offsets, dd1, 0.5 * kappa_hz, opts.x_tol);
    target.d2 = kTwoPi * refined.d2_fit_hz;
    target.d3 = kTwoPi * refined.d3_fit_hz;
    crossings.clear();
    for (const auto& c : clusters)
      if (c.fitted) crossings.push_back(c.crossing);
  }

  return DeviceFit{DeviceModel(target, std::move(crossings), eta_e, std::move(offsets)),
                   std::move(clusters), std::move(refined)};
}

}  // namespace qmc
