#include "qmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qmc/langevin_oracle.hpp"

namespace qmc::kernels {

namespace {

void check_range(int k_first, int k_last) {
  if (k_first < 1) throw std::invalid_argument("spectrum: k range must start at k >= 1");
  if (k_last < k_first) throw std::invalid_argument("spectrum: empty k range");
}

struct PointResult {
  double formula = 0.0;
  double oracle = 0.0;
  double rel = 0.0;
  double min_eig = 0.0;
  double product = 0.0;
};

PointResult evaluate_point(const GridPoint& p, double omega, const ClosedForm& formula) {
  auto dyn = drift_matrix(p.alpha, p.zeta_bar, p.delta);
  dyn.efficiencies = {p.eta_e, p.eta_e, p.eta_d};
  const auto out = output_covariance(dyn, omega);
  const auto sums = sum_quadratures(out);
  PointResult r;
  r.formula = formula(p.alpha, p.zeta_bar, p.delta, p.eta_e * p.eta_d);
  r.oracle = sums.squeezed;
  r.rel = std::abs(r.oracle - r.formula) / std::max(std::abs(r.formula), 1e-12);
  r.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(out.cov, Eigen::EigenvaluesOnly)
                  .eigenvalues()[0];
  r.product = sums.squeezed * sums.antisqueezed;
  return r;
}

GridReport reduce(const OracleGrid& grid, const std::vector<PointResult>& results) {
  GridReport rep;
  rep.points = results.size();
  rep.min_cov_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_uncertainty_product = std::numeric_limits<double>::infinity();
  rep.min_uncertainty_product_all = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.rel > rep.max_rel_error || i == 0) {
      rep.max_rel_error = r.rel;
      rep.worst = grid.at(i);
      rep.worst_formula = r.formula;
      rep.worst_oracle = r.oracle;
    }
    rep.min_cov_eigenvalue = std::min(rep.min_cov_eigenvalue, r.min_eig);
    rep.min_uncertainty_product_all = std::min(rep.min_uncertainty_product_all, r.product);
    const auto p = grid.at(i);
    if (p.eta_e == 1.0 && p.eta_d == 1.0)
      rep.min_uncertainty_product = std::min(rep.min_uncertainty_product, r.product);
  }
  return rep;
}

// Exceptions cannot cross an OpenMP region; keep the first and rethrow.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(qmc_exception_slot)
      if (!ptr_) ptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (ptr_) std::rethrow_exception(ptr_);
  }

 private:
  std::exception_ptr ptr_;
};

}  // namespace

std::vector<SpectrumRow> spectrum_serial(const DeviceModel& dev, const PumpCondition& pump,
                                         int k_first, int k_last, const SpectrumOptions& opts) {
  check_range(k_first, k_last);
  pump.validate();
  std::vector<SpectrumRow> rows;
  rows.reserve(static_cast<std::size_t>(k_last - k_first + 1));
  for (int k = k_first; k <= k_last; ++k) rows.push_back(spectrum_row(dev, pump, k, opts));
  return rows;
}

std::vector<SpectrumRow> spectrum_parallel(const DeviceModel& dev, const PumpCondition& pump,
                                           int k_first, int k_last, const SpectrumOptions& opts) {
  check_range(k_first, k_last);
  pump.validate();
  const int n = k_last - k_first + 1;
  std::vector<SpectrumRow> rows(static_cast<std::size_t>(n));
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    slot.run([&] { rows[static_cast<std::size_t>(i)] = spectrum_row(dev, pump, k_first + i, opts); });
  slot.rethrow();
  return rows;
}

double closed_form_variance(double alpha, double zeta_bar, double delta, double eta) {
  return sum_quadrature_variance(alpha, zeta_bar, delta, eta).variance;
}

GridPoint OracleGrid::at(std::size_t index) const {
  const std::size_t ne = efficiencies.size();
  const std::size_t nd = deltas.size();
  const std::size_t nz = zeta_bars.size();
  GridPoint p;
  const auto& eff = efficiencies[index % ne];
  index /= ne;
  p.delta = deltas[index % nd];
  index /= nd;
  p.zeta_bar = zeta_bars[index % nz];
  index /= nz;
  p.alpha = alphas[index];
  p.eta_e = eff.first;
  p.eta_d = eff.second;
  return p;
}

OracleGrid default_oracle_grid(std::size_t zeta_points, std::size_t delta_points) {
  auto linspace = [](double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
  };
  OracleGrid g;
  for (int i = 1; i <= 9; ++i) g.alphas.push_back(0.1 * i);
  g.zeta_bars = linspace(-1.0, 4.0, zeta_points);
  g.deltas = linspace(0.0, 5.0, delta_points);
  for (double e : {0.5, 0.85, 1.0})
    for (double d : {0.5, 0.85, 1.0}) g.efficiencies.emplace_back(e, d);
  return g;
}

GridReport oracle_grid_serial(const OracleGrid& grid, const ClosedForm& formula) {
  std::vector<PointResult> results(grid.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    results[i] = evaluate_point(grid.at(i), grid.omega, formula);
  return reduce(grid, results);
}

GridReport oracle_grid_parallel(const OracleGrid& grid, const ClosedForm& formula) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<PointResult> results(grid.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    slot.run([&] {
      results[static_cast<std::size_t>(i)] =
          evaluate_point(grid.at(static_cast<std::size_t>(i)), grid.omega, formula);
    });
  slot.rethrow();
  return reduce(grid, results);
}

std::vector<double> run_chain(const ChainSpec& spec, int chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(chain)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double h = spec.step;
  const double sqrt_h = std::sqrt(h);
  const Eigen::Matrix4d propagate = Eigen::Matrix4d::Identity() + h * spec.drift;
  const bool intrinsic = spec.coupling_i.squaredNorm() > 0.0;
  const Eigen::Vector4d readout = spec.direction.cwiseProduct(spec.coupling_e);
  const double sqrt_d = std::sqrt(spec.eta_d);
  const double sqrt_vac = std::sqrt(1.0 - spec.eta_d);

  const std::size_t n = spec.steps_per_window;
  std::vector<double> taper(n);
  double taper_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    taper[i] = s * s;
    taper_sq += taper[i] * taper[i];
  }
  const double norm = h * taper_sq;

  Eigen::Vector4d q = Eigen::Vector4d::Zero();
  Eigen::Vector4d xi_e;
  Eigen::Vector4d xi_i = Eigen::Vector4d::Zero();
  auto draw = [&] {
    for (int j = 0; j < 4; ++j) xi_e[j] = normal(rng);
    if (intrinsic)
      for (int j = 0; j < 4; ++j) xi_i[j] = normal(rng);
  };
  auto advance = [&] {
    q = propagate * q + sqrt_h * (spec.coupling_e.cwiseProduct(xi_e) + spec.coupling_i.cwiseProduct(xi_i));
  };

  for (std::size_t i = 0; i < spec.burn_steps; ++i) {
    draw();
    advance();
  }

  std::vector<double> samples;
  samples.reserve(spec.windows);
  for (std::size_t w = 0; w < spec.windows; ++w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      draw();
      // detected increment: sqrt(eta_d) (K q h - dW_e), projected
      acc += taper[i] * sqrt_d * (readout.dot(q) * h - sqrt_h * spec.direction.dot(xi_e));
      advance();
    }
    // detection vacuum is white and only enters the tapered sum
    acc += sqrt_vac * std::sqrt(norm) * normal(rng);
    samples.push_back(acc * acc / norm);
  }
  return samples;
}

std::vector<double> chains_serial(const ChainSpec& spec, int chains) {
  std::vector<double> all;
  for (int c = 0; c < chains; ++c) {
    auto s = run_chain(spec, c);
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

std::vector<double> chains_parallel(const ChainSpec& spec, int chains) {
  std::vector<std::vector<double>> per(static_cast<std::size_t>(chains));
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < chains; ++c) per[static_cast<std::size_t>(c)] = run_chain(spec, c);
  std::vector<double> all;
  for (auto& s : per) all.insert(all.end(), s.begin(), s.end());
  return all;
}

}  // namespace qmc::kernels
