#include <cmath>
#include <numbers>

#include "doctest.h"
#include "eulerfield/errors.hpp"
#include "eulerfield/geometry.hpp"

using namespace eulerfield;
using doctest::Approx;

namespace {
void check_lk(const LKCurvatures& lk, std::vector<double> expected) {
  REQUIRE(lk.values.size() == expected.size());
  for (std::size_t j = 0; j < expected.size(); ++j) CHECK(lk.values[j] == Approx(expected[j]).epsilon(1e-14));
}
}  // namespace

TEST_CASE("lk curvatures of boxes") {
  check_lk(lk_curvatures(Domain::box({1, 1})), {1, 2, 1});
  check_lk(lk_curvatures(Domain::box({10})), {1, 10});
  for (int d = 1; d <= 2; ++d) {
    const double L = 3.5;
    const LKCurvatures lk = lk_curvatures(Domain::box(std::vector<double>(d, L)));
    CHECK(lk[1] == Approx(d * L));
  }
  check_lk(lk_curvatures(Domain::box({2, 3})), {1, 5, 6});
}

TEST_CASE("lk curvatures of tori and spheres") {
  check_lk(lk_curvatures(Domain::torus({5, 5})), {0, 0, 25});
  check_lk(lk_curvatures(Domain::torus({7})), {0, 7});
  check_lk(lk_curvatures(Domain::sphere(1.5)), {2, 0, 4 * std::numbers::pi * 2.25});
}

TEST_CASE("lk curvatures: L_0 is the Euler characteristic and L_j beyond d vanish") {
  for (const Domain& d : {Domain::box({2}), Domain::box({2, 4}), Domain::torus({3, 3}), Domain::sphere(2)}) {
    const LKCurvatures lk = lk_curvatures(d);
    CHECK(lk[0] == euler_characteristic(d));
    CHECK(lk[5] == 0.0);
  }
}

TEST_CASE("lk curvatures: metric scaling law") {
  for (double ell : {0.5, 2.0, 3.0}) {
    for (const Domain& unit : {Domain::box({4, 6}), Domain::torus({5, 2}), Domain::sphere(1.2), Domain::box({10})}) {
      Domain scaled = unit;
      scaled.metric_scale = ell;
      const LKCurvatures a = lk_curvatures(unit);
      const LKCurvatures b = lk_curvatures(scaled);
      for (int j = 0; j <= a.dim(); ++j) CHECK(b[j] == Approx(a[j] * std::pow(ell, -j)).epsilon(1e-14));
    }
  }
  Domain d = Domain::box({10});
  d.metric_scale = 2.0;
  CHECK(lk_curvatures(d)[1] == Approx(5.0));
}

TEST_CASE("unit ball volumes and flag coefficients") {
  CHECK(unit_ball_volume(0) == Approx(1.0));
  CHECK(unit_ball_volume(1) == Approx(2.0));
  CHECK(unit_ball_volume(2) == Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(flag_coefficient(2, 1) == Approx(std::numbers::pi / 2.0));
  for (int n = 0; n <= 5; ++n) CHECK(flag_coefficient(n, 0) == Approx(1.0));
  CHECK_THROWS_AS(flag_coefficient(2, 3), DomainError);
}

TEST_CASE("tube volume of rectangles") {
  CHECK(tube_volume_box2d({1, 1}, 0) == Approx(1.0));
  CHECK(tube_volume_box2d({1, 1}, 1) == Approx(5.0 + std::numbers::pi));
  CHECK(tube_volume_box2d({2, 3}, 0.5) == Approx(11.0 + std::numbers::pi / 4.0));
  for (double a : {0.5, 1.0, 4.0})
    for (double b : {0.2, 3.0})
      for (double r : {0.0, 0.3, 2.0})
        CHECK(tube_volume_box2d({a, b}, r) == Approx(a * b + 2 * (a + b) * r + std::numbers::pi * r * r).epsilon(1e-13));
}

TEST_CASE("domain validation and JSON") {
  CHECK_THROWS_AS(Domain::box({0, 1}).validate(), DomainError);
  CHECK_THROWS_AS(Domain::box({1, 1, 1}).validate(), DomainError);
  CHECK_THROWS_AS(Domain::sphere(-1).validate(), DomainError);
  Domain neg = Domain::box({1});
  neg.metric_scale = 0;
  CHECK_THROWS_AS(neg.validate(), DomainError);

  const Domain d = Domain::torus({5, 4}, 2.0);
  const Domain back = nlohmann::json(d).get<Domain>();
  CHECK(back.kind == DomainKind::flat_torus);
  CHECK(back.side_lengths == d.side_lengths);
  CHECK(back.metric_scale == 2.0);
  CHECK(nlohmann::json::parse(R"({"kind":"torus","side_lengths":[3]})").get<Domain>().kind == DomainKind::flat_torus);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"kind":"blob"})").get<Domain>(), DomainError);
}
