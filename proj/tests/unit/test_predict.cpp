#include <cmath>
#include <numbers>

#include "doctest.h"
#include "eulerfield/errors.hpp"
#include "eulerfield/predict.hpp"

using namespace eulerfield;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;
const double kRoot2Pi = std::sqrt(2.0 * kPi);

Domain scaled(Domain d, double ell) {
  d.metric_scale = ell;
  return d;
}
}  // namespace

TEST_CASE("GKF expected EC of sublevel sets") {
  for (double L : {1.0, 6.0}) {
    const Prediction p = expected_ec_sublevel(Domain::box({L, L}), 0.0);
    CHECK(p.value == Approx(0.5 + 2 * L * 0.398942280401432678 / kRoot2Pi).epsilon(1e-13));
    CHECK(p.formula_id == FormulaId::gkf_ec);
  }
  CHECK(expected_ec_sublevel(Domain::box({6, 6}), 0.0).value == Approx(2.4098593171027440).epsilon(1e-12));
  CHECK(expected_ec_sublevel(Domain::box({6, 6}), 1.0).value == Approx(0.613342849562228).epsilon(1e-10));
  CHECK(expected_ec_sublevel(Domain::box({6, 6}), -1.0).value == Approx(2.7034336135590658).epsilon(1e-10));
  CHECK(expected_ec_sublevel(Domain::box({6, 6}), 40.0).value == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(expected_ec_sublevel(Domain::box({6, 6}), -40.0).value) < 1e-300);
  // On the torus only the top term survives; it is odd in u and negative above 0.
  for (double u : {-1.0, 0.0, 0.7})
    CHECK(expected_ec_sublevel(Domain::torus({5, 5}), u).value ==
          Approx(-25.0 / (2 * kPi) * u * std::exp(-0.5 * u * u) / kRoot2Pi).epsilon(1e-12));
}

TEST_CASE("general Euler integral expectation") {
  const Domain box = Domain::box({3, 4});
  const std::vector<double> none;
  CHECK(expected_upper_integral_general(box, 1.7, none).value == Approx(1.7));
  // Identity transform: mean 0 and the first Minkowski integral is 1.
  const std::vector<double> identity = {1.0, 0.0};
  CHECK(expected_upper_integral_general(box, 0.0, identity).value == Approx(-7.0 / kRoot2Pi));
  // Chi-square inputs reproduce the chi-square formula.
  for (int k : {2, 3, 5}) {
    const std::vector<double> mink = {chi2_mink_integrals(k, 1), chi2_mink_integrals(k, 2)};
    CHECK(expected_upper_integral_general(box, k, mink).value ==
          Approx(expected_chi2_integral(box, k).value).epsilon(1e-10));
  }
}

TEST_CASE("real transforms") {
  const Domain line = Domain::box({10});
  const Prediction id = expected_upper_integral_real(line, PiecewiseC2Function::identity());
  CHECK(id.value == Approx(-10.0 / kRoot2Pi).epsilon(1e-10));
  CHECK(id.formula_id == FormulaId::cor_monotone);

  const double L = 3.0;
  const Prediction cube = expected_upper_integral_real(Domain::box({L, L}), PiecewiseC2Function::polynomial({0, 0, 0, 1}, Monotonicity::increasing));
  CHECK(cube.value == Approx(-6.0 * L / kRoot2Pi).epsilon(1e-9));

  // f and -f share a law, so G = -x has the same expectation as G = x.
  const Prediction neg = expected_upper_integral_real(line, PiecewiseC2Function::polynomial({0, -1}, Monotonicity::decreasing));
  CHECK(neg.value == Approx(-10.0 / kRoot2Pi).epsilon(1e-10));

  // Non-monotone G uses the general form only.
  const Prediction wiggle = expected_upper_integral_real(line, PiecewiseC2Function::polynomial({0, -1, 0, 1}));
  CHECK(wiggle.formula_id == FormulaId::thm_real);
  CHECK(std::isfinite(wiggle.value));
}

TEST_CASE("monotone shortcut equals the general form") {
  for (const auto& coeffs : {std::vector<double>{0, 1}, std::vector<double>{0, 1, 0, 1}, std::vector<double>{0, 5}}) {
    for (const Domain& d : {Domain::box({10}), Domain::box({4, 6})}) {
      const Prediction p = expected_upper_integral_real(d, PiecewiseC2Function::polynomial(coeffs, Monotonicity::increasing));
      CHECK(std::abs(p.value - p.inputs["general_form"].get<double>()) < 1e-7);
    }
  }
}

TEST_CASE("chi-square expectation") {
  for (double L : {2.0, 5.0})
    CHECK(expected_chi2_integral(Domain::box({L, L}), 2).value == Approx(2 - 2 * L + L * L / kPi).epsilon(1e-12));
  CHECK(expected_chi2_integral(Domain::box({4, 4}), 3).value == Approx(-2.09295817894065074460).epsilon(1e-12));
  CHECK_THROWS_AS(expected_chi2_integral(Domain::box({4, 4}), 1), DomainError);
}

TEST_CASE("signed sum of critical values") {
  CHECK(expected_signed_sum(Domain::box({10})).value == Approx(-3.98942280401432678).epsilon(1e-12));
  CHECK(expected_signed_sum(Domain::box({6, 6})).value == Approx(-12.0 / kRoot2Pi).epsilon(1e-12));
  CHECK(expected_signed_sum(Domain::torus({5, 5})).value == 0.0);
  CHECK(expected_signed_sum(scaled(Domain::box({10}), 2.0)).value == Approx(-5.0 / kRoot2Pi).epsilon(1e-12));
}

TEST_CASE("level-truncated laws on the 1-D box") {
  const Domain line = Domain::box({10});
  CHECK(expected_signed_sum_below(line, 0.0).value == Approx(-2.39365368240859).epsilon(1e-12));
  CHECK(expected_truncated_integral(line, 0.0).value == Approx(-2.39365368240859).epsilon(1e-12));
  CHECK(expected_barcode_ec(line, 0.0).value == Approx(2.39365368240859).epsilon(1e-12));
  CHECK(expected_signed_sum_below(line, 1.0).value == Approx(-2.63312711422209262109).epsilon(1e-12));
  CHECK(expected_signed_sum_below(line, -1.0).value == Approx(-1.84023713883052085790).epsilon(1e-12));
  CHECK(expected_truncated_integral(line, 1.0).value == Approx(-3.43979538659117464510).epsilon(1e-12));
  CHECK(expected_truncated_integral(line, -1.0).value == Approx(-1.71625835859852473107).epsilon(1e-12));
  CHECK(expected_truncated_integral(Domain::box({6, 6}), 0.5).value == Approx(-5.52522562440186976015).epsilon(1e-12));
}

TEST_CASE("level-truncated laws: limits") {
  for (const Domain& d : {Domain::box({10}), Domain::box({6, 6})}) {
    CHECK(std::abs(expected_signed_sum_below(d, 8.0).value - expected_signed_sum(d).value) < 1e-10);
    CHECK(std::abs(expected_signed_sum_below(d, -8.0).value) < 1e-10);
    CHECK(std::abs(expected_truncated_integral(d, 8.0).value - expected_signed_sum(d).value) < 1e-10);
    CHECK(std::abs(expected_truncated_integral(d, -8.0).value - (-8.0)) < 1e-10);
    CHECK(std::abs(expected_barcode_ec(d, -8.0).value) < 1e-10);
  }
  // Far tail stays finite.
  CHECK(std::isfinite(expected_signed_sum_below(Domain::box({10}), -60.0).value));
}

TEST_CASE("torus barcode expectation") {
  const Domain t = Domain::torus({5, 5});
  for (double a : {-1.0, 0.0, 0.3, 2.0})
    CHECK(expected_barcode_ec(t, a).value == Approx(25.0 * std::exp(-0.5 * a * a) / kRoot2Pi / (2 * kPi)).epsilon(1e-12));
  CHECK(expected_barcode_ec(t, 0.3).value == Approx(1.51749390163904977893).epsilon(1e-12));
}

TEST_CASE("consistency web between the expectation formulas") {
  for (const Domain& d : {Domain::box({10}), Domain::box({6, 6}), Domain::torus({5, 5}), Domain::sphere(2.0),
                          scaled(Domain::box({3, 5}), 0.7)}) {
    const double chi = lk_curvatures(d)[0];
    for (double a = -3.0; a <= 3.0; a += 0.25) {
      const double trunc = expected_truncated_integral(d, a).value;
      const double ec = expected_ec_sublevel(d, a).value;
      CHECK(trunc + a * ec - a * chi == Approx(expected_signed_sum_below(d, a).value).epsilon(1e-12));
      CHECK(expected_barcode_ec(d, a).value == Approx(a * chi - trunc).epsilon(1e-12));
    }
  }
}

TEST_CASE("predictions follow the metric scaling law") {
  const Domain base = Domain::box({4, 6});
  for (double ell : {0.5, 2.0}) {
    Domain manual = base;
    // Rescaling the metric is the same as rescaling the physical sides.
    manual.side_lengths = {4.0 / ell, 6.0 / ell};
    const Domain d = scaled(base, ell);
    CHECK(expected_signed_sum(d).value == Approx(expected_signed_sum(manual).value).epsilon(1e-13));
    CHECK(expected_ec_sublevel(d, 0.4).value == Approx(expected_ec_sublevel(manual, 0.4).value).epsilon(1e-13));
    CHECK(expected_chi2_integral(d, 3).value == Approx(expected_chi2_integral(manual, 3).value).epsilon(1e-13));
    CHECK(expected_barcode_ec(d, 0.2).value == Approx(expected_barcode_ec(manual, 0.2).value).epsilon(1e-13));
  }
}

TEST_CASE("f_max barcode expectation and serialization") {
  const Prediction p = expected_barcode_ec_max(Domain::box({10}), 2.5);
  CHECK(p.value == Approx(2.5 + 10.0 / kRoot2Pi));
  const nlohmann::json j = p;
  CHECK(j["formula_id"] == "thm_barcode_ec_max");
  CHECK(j["inputs"]["expected_fmax"] == 2.5);
  CHECK(formula_from_string("lemma_Ga") == FormulaId::lemma_Ga);
  CHECK_THROWS_AS(formula_from_string("nope"), ConfigError);
}
