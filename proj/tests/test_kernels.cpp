#include <doctest.h>

#include <cstring>

#include "qmc/kernels.hpp"
#include "qmc/langevin_oracle.hpp"

using namespace qmc;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

DeviceModel crossing_device() {
  ModeFamily t;
  t.d1 = kTwoPi * 25e9;
  t.d2 = kTwoPi * 26.5e3;
  t.d3 = kTwoPi * 80.0;
  t.kappa = kTwoPi * 12.14e6;
  CrossingFamily c;
  c.g_coupling = kTwoPi * 40e6;
  c.kappa_c = kTwoPi * 20e6;
  c.d1_c = kTwoPi * (25e9 + 300e6);
  c.k0 = -24.3;
  return DeviceModel(t, {c}, ExtractionTable(0.85, {{-24, 0.6}}));
}

}  // namespace

TEST_CASE("spectrum kernels agree bit for bit") {
  const auto dev = crossing_device();
  const PumpCondition pump{0.8, 0.4, 0.85, 0.9};
  const auto s = kernels::spectrum_serial(dev, pump, 1, 300, {});
  const auto p = kernels::spectrum_parallel(dev, pump, 1, 300, {});
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].detuning.k == p[i].detuning.k);
    CHECK(same_bits(s[i].result.variance, p[i].result.variance));
    CHECK(same_bits(s[i].detuning.delta, p[i].detuning.delta));
    CHECK(s[i].warn == p[i].warn);
  }
  CHECK_THROWS_AS(kernels::spectrum_parallel(dev, pump, 0, 3, {}), std::invalid_argument);
  CHECK_THROWS_AS(kernels::spectrum_serial(dev, pump, 5, 4, {}), std::invalid_argument);
}

TEST_CASE("oracle grid kernels agree bit for bit") {
  const auto grid = kernels::default_oracle_grid(11, 6);
  CHECK(grid.size() == 9 * 11 * 6 * 9);
  const auto s = kernels::oracle_grid_serial(grid, kernels::closed_form_variance);
  const auto p = kernels::oracle_grid_parallel(grid, kernels::closed_form_variance);
  CHECK(s.points == grid.size());
  CHECK(same_bits(s.max_rel_error, p.max_rel_error));
  CHECK(same_bits(s.min_cov_eigenvalue, p.min_cov_eigenvalue));
  CHECK(same_bits(s.min_uncertainty_product, p.min_uncertainty_product));
  CHECK(s.worst.alpha == p.worst.alpha);
  CHECK(s.worst.zeta_bar == p.worst.zeta_bar);
  CHECK(s.max_rel_error <= 1e-9);
}

TEST_CASE("default grid layout") {
  const auto grid = kernels::default_oracle_grid();
  CHECK(grid.size() == 86346);
  CHECK(grid.alphas.front() == doctest::Approx(0.1));
  CHECK(grid.alphas.back() == doctest::Approx(0.9));
  CHECK(grid.zeta_bars.front() == -1.0);
  CHECK(grid.zeta_bars.back() == 4.0);
  CHECK(grid.deltas.back() == 5.0);
  const auto last = grid.at(grid.size() - 1);
  CHECK(last.alpha == doctest::Approx(0.9));
  CHECK(last.delta == 5.0);
}

TEST_CASE("a corrupted formula is located") {
  const auto grid = kernels::default_oracle_grid(11, 6);
  const auto bad = [](double a, double z, double d, double e) {
    const double v = kernels::closed_form_variance(a, z, d, e);
    return a > 0.85 && z > 3.5 ? v * 1.01 : v;
  };
  const auto r = kernels::oracle_grid_parallel(grid, bad);
  CHECK(r.max_rel_error > 0.009);
  CHECK(r.max_rel_error < 0.011);
  CHECK(r.worst.alpha > 0.85);
  CHECK(r.worst.zeta_bar > 3.5);
}

TEST_CASE("chain kernels agree bit for bit") {
  const auto dyn = drift_matrix(0.5, 1.0, 0.2);
  kernels::ChainSpec spec;
  spec.drift = dyn.drift;
  spec.coupling_e = Eigen::Vector4d::Constant(std::sqrt(2.0 * 0.9));
  spec.coupling_i = Eigen::Vector4d::Constant(std::sqrt(2.0 * 0.1));
  spec.eta_d = 0.8;
  spec.direction = Eigen::Vector4d(1, 0, 1, 0) / std::sqrt(2.0);
  spec.step = 0.05;
  spec.steps_per_window = 2000;
  spec.windows = 3;
  spec.burn_steps = 100;
  spec.seed = 123;
  const auto s = kernels::chains_serial(spec, 6);
  const auto p = kernels::chains_parallel(spec, 6);
  REQUIRE(s.size() == 18);
  REQUIRE(p.size() == 18);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(same_bits(s[i], p[i]));
  const auto one = kernels::run_chain(spec, 2);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(same_bits(one[i], s[6 + i]));
}
