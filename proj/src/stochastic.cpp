#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qmc/kernels.hpp"
#include "qmc/langevin_oracle.hpp"

namespace qmc {

StochasticEstimate stochastic_estimate(const PairDynamics& dyn, double duration, double step,
                                       std::uint64_t seed, const StochasticOptions& opts) {
  require_stable(dyn);
  if (!(step > 0.0)) throw std::invalid_argument("stochastic_estimate: step must be > 0");
  if (opts.chains < 1) throw std::invalid_argument("stochastic_estimate: chains must be >= 1");

  Eigen::EigenSolver<Eigen::Matrix4d> solver(dyn.drift, false);
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) max_abs = std::max(max_abs, std::abs(solver.eigenvalues()[i]));
  if (step * max_abs >= 0.1)
    throw std::invalid_argument("stochastic_estimate: step * max|eigenvalue| = " +
                                std::to_string(step * max_abs) + " must be < 0.1");

  const auto steps_per_window = static_cast<std::size_t>(std::llround(opts.window / step));
  const auto total_windows = static_cast<std::size_t>(duration / opts.window);
  const auto per_chain = total_windows / static_cast<std::size_t>(opts.chains);
  if (steps_per_window < 2 || per_chain < 2)
    throw std::invalid_argument(
        "stochastic_estimate: duration too short for two windows per chain");

  // Project on the squeezed quadrature of the omega = 0 response.
  const auto sums = sum_quadratures(output_covariance(dyn, 0.0));
  const double s = 1.0 / std::sqrt(2.0);
  const double c = std::cos(sums.phase) * s;
  const double sn = std::sin(sums.phase) * s;

  const double slowest = std::abs(slowest_eigenvalue(dyn.drift).real());
  const double burn = opts.burn_in >= 0.0 ? opts.burn_in : 20.0 / slowest;

  const auto& eff = dyn.efficiencies;
  kernels::ChainSpec spec;
  spec.drift = dyn.drift;
  const Eigen::Vector4d loss(dyn.loss_plus, dyn.loss_plus, dyn.loss_minus, dyn.loss_minus);
  const Eigen::Vector4d ext(eff.eta_e_plus, eff.eta_e_plus, eff.eta_e_minus, eff.eta_e_minus);
  spec.coupling_e = (loss.array() * ext.array()).sqrt();
  spec.coupling_i = (loss.array() * (1.0 - ext.array())).sqrt();
  spec.eta_d = eff.eta_d;
  spec.direction = Eigen::Vector4d(c, sn, c, sn);
  spec.step = step;
  spec.steps_per_window = steps_per_window;
  spec.windows = per_chain;
  spec.burn_steps = static_cast<std::size_t>(std::ceil(burn / step));
  spec.seed = seed;

  const auto samples = kernels::chains_parallel(spec, opts.chains);
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);

  StochasticEstimate est;
  est.variance = mean;
  est.standard_error = std::sqrt(ss / (n - 1.0) / n);
  est.windows = samples.size();
  est.phase = sums.phase;
  return est;
}

}  // namespace qmc
