#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qmc/squeezing.hpp"

using namespace qmc;

namespace {

DeviceModel comb(std::vector<CrossingFamily> crossings = {}, ExtractionTable eta = ExtractionTable{}) {
  ModeFamily t;
  t.d1 = kTwoPi * 25e9;
  t.d2 = kTwoPi * 26.5e3;
  t.kappa = kTwoPi * 12.14e6;
  return DeviceModel(t, std::move(crossings), std::move(eta));
}

CrossingFamily crossing_m24() {
  CrossingFamily c;
  c.g_coupling = kTwoPi * 60e6;
  c.kappa_c = kTwoPi * 12.14e6;
  c.d1_c = kTwoPi * (25e9 + 600e6);
  c.k0 = -24;
  return c;
}

}  // namespace

TEST_CASE("lambda examples") {
  CHECK(lambda_k(0.0, 0.0, 0.0) == 1.0);
  CHECK(lambda_k(0.8, 1.6, 0.0) == doctest::Approx(0.1296).epsilon(1e-13));
  CHECK(lambda_k(0.8, 1.6, 10.0) == doctest::Approx(10328.1296).epsilon(1e-13));
}

TEST_CASE("sum quadrature variance examples") {
  for (double a : {0.1, 0.8}) CHECK(sum_quadrature_variance(a, 1.0, 2.0, 0.0).variance == 1.0);

  auto r = sum_quadrature_variance(0.8, 1.6, 0.0, 1.0);
  CHECK(r.variance == doctest::Approx(0.0123456790123).epsilon(1e-10));
  CHECK(r.sl_db == doctest::Approx(-19.08).epsilon(1e-3));
  CHECK(r.lambda == doctest::Approx(0.1296));

  r = sum_quadrature_variance(0.8, 1.6, 0.0, 0.7);
  CHECK(r.variance == doctest::Approx(0.308642).epsilon(1e-6));
  CHECK(r.sl_db == doctest::Approx(-5.106).epsilon(2e-4));

  r = sum_quadrature_variance(0.8, 1.6, 10.0, 0.7);
  CHECK(r.variance == doctest::Approx(0.978).epsilon(1e-3));
  CHECK(r.sl_db == doctest::Approx(-0.095).epsilon(2e-2));
}

TEST_CASE("alpha zero is the vacuum limit") {
  const auto r = sum_quadrature_variance(0.0, 0.3, 1.0, 0.9);
  CHECK(r.variance == 1.0);
  CHECK(r.sl_db == 0.0);
}

TEST_CASE("variance_no_amx") {
  const auto edge = variance_no_amx(0.8, 0.8, 0.7);
  // the exact value is 0.3575766, quoted to five figures as 0.35755
  CHECK(std::abs(edge.variance - 0.35755) < 5e-5);
  CHECK(edge.sl_db == doctest::Approx(-4.466).epsilon(1e-3));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.0, 0.99), uz(-1.0, 4.0), ue(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), z = uz(rng), e = ue(rng);
    CHECK(variance_no_amx(a, z, e).variance == sum_quadrature_variance(a, z, 0.0, e).variance);
  }

  for (double a : {0.2, 0.5, 0.8, 0.95}) {
    const double step = 1e-3;
    double best = 2.0, arg = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double z = -1.0 + i * step;
      const double v = variance_no_amx(a, z, 0.8).variance;
      if (v < best) best = v, arg = z;
    }
    CHECK(std::abs(arg - 2 * a) <= step);
  }
}

TEST_CASE("bounds and monotonicity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.01, 0.99), uz(-1.0, 4.0), ud(-6.0, 6.0), ue(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = ua(rng), z = uz(rng), d = ud(rng), e = ue(rng);
    const double v = sum_quadrature_variance(a, z, d, e).variance;
    CHECK(v <= 1.0);
    CHECK(v > 1.0 - e - 1e-15);
    const double l = lambda_k(a, z, d);
    CHECK(l >= 0.0);
    const double u = 1 - a * a + (z - 2 * a) * (z - 2 * a);
    CHECK(lambda_k(a, z, 0.0) == doctest::Approx(u * u).epsilon(1e-14));
    if (e < 0.99) CHECK(sum_quadrature_variance(a, z, d, e + 0.01).variance < v);
  }

  for (double a : {0.3, 0.6, 0.9})
    for (double z = -1.0; z <= 4.0; z += 0.05) {
      if ((z - 2 * a) * (z - 2 * a) >= 1 + a * a) continue;
      double prev = 0.0;
      for (double d = 0.0; d <= 5.0; d += 0.02) {
        const double v = sum_quadrature_variance(a, z, d, 0.85).variance;
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
}

TEST_CASE("pump condition validation") {
  PumpCondition p{1.2, 0.0, 0.8, 1.0};
  try {
    p.validate();
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("alpha < 1") != std::string::npos);
  }
  CHECK_THROWS_AS((PumpCondition{0.5, 0.0, 1.1, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PumpCondition{-0.1, 0.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((PumpCondition{0.0, 0.0, 0.0, 0.0}.validate()));
}

TEST_CASE("spectrum without crossings is minimal where zeta_bar is closest to 2 alpha") {
  const auto dev = comb({}, ExtractionTable(0.7));
  const PumpCondition pump{0.8, 0.0, 0.7, 1.0};
  const auto rows = spectrum(dev, pump, 1, 35);
  REQUIRE(rows.size() == 35);
  int arg = 0, closest = 0;
  double best = 2.0, gap = 1e9;
  for (const auto& r : rows) {
    CHECK(r.eta == doctest::Approx(0.7));
    CHECK_FALSE(r.warn);
    if (r.result.variance < best) best = r.result.variance, arg = r.detuning.k;
    if (std::abs(r.detuning.zeta_bar - 1.6) < gap) gap = std::abs(r.detuning.zeta_bar - 1.6), closest = r.detuning.k;
  }
  CHECK(arg == closest);
}

TEST_CASE("crossing at -24 spikes the variance at k = 24") {
  const auto dev = comb({crossing_m24()});
  const PumpCondition pump{0.8, 1.0, 0.7, 1.0};
  const auto rows = spectrum(dev, pump, 20, 28);
  const auto& at = rows[24 - 20];
  CHECK(at.result.variance > rows[23 - 20].result.variance);
  CHECK(at.result.variance > rows[25 - 20].result.variance);
  CHECK(at.result.sl_db > -1.0);
  CHECK(at.warn);
}

TEST_CASE("zero extraction on one side gives vacuum") {
  const auto dev = comb({}, ExtractionTable(0.9, {{-24, 0.0}}));
  const PumpCondition pump{0.8, 0.0, 1.0, 0.9};
  const auto row = spectrum_row(dev, pump, 24);
  CHECK(row.eta == 0.0);
  CHECK(row.result.variance == 1.0);
  CHECK(spectrum_row(dev, pump, 23).eta == doctest::Approx(0.81));
  CHECK(pair_extraction(ExtractionTable(0.5, {{3, 0.8}}), 3) == doctest::Approx(std::sqrt(0.4)));
}

TEST_CASE("warning threshold is configurable") {
  const auto dev = comb({crossing_m24()});
  const PumpCondition pump{0.5, 0.0, 1.0, 1.0};
  SpectrumOptions loose;
  loose.dkappa_warn = 1e9;
  const auto row = spectrum_row(dev, pump, 24, loose);
  CHECK_FALSE(row.warn);
  CHECK(spectrum_row(dev, pump, 24).warn);
}
