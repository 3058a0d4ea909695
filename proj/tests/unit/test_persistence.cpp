#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "eulerfield/errors.hpp"
#include "eulerfield/euler_calc.hpp"
#include "eulerfield/persistence.hpp"

using namespace eulerfield;
using doctest::Approx;

namespace {

const GridField kLine3 = GridField::line({0.0, 1.0, 0.5});

std::vector<std::pair<double, double>> pairs(const std::vector<Bar>& bars) {
  std::vector<std::pair<double, double>> out;
  for (const Bar& b : bars) out.emplace_back(b.birth, b.death);
  std::sort(out.begin(), out.end());
  return out;
}

// Number of degree-k bars alive at u.
long alive(const Barcode& bc, int degree, double u) {
  long n = 0;
  for (const Bar& b : bc.bars)
    if (b.degree == degree && b.birth <= u && u < b.death) ++n;
  return n;
}

}  // namespace

TEST_CASE("three-point line barcode") {
  const Barcode bc = sublevel_persistence(CubicalFiltration::lower_star(kLine3));
  const auto zero = bc.of_degree(0);
  REQUIRE(zero.size() == 2);
  CHECK(zero[0] == Bar{0, 0.0, kInfiniteDeath});
  CHECK(zero[1] == Bar{0, 0.5, 1.0});
  CHECK(bc.of_degree(1).empty());
  CHECK(bc.infinite_count(0) == 1);
}

TEST_CASE("constant field has one essential class") {
  const Barcode bc = sublevel_persistence(
      CubicalFiltration::lower_star(GridField({3, 4}, 1.0, false, std::vector<double>(12, -0.25))));
  REQUIRE(bc.bars.size() == 1);
  CHECK(bc.bars[0] == Bar{0, -0.25, kInfiniteDeath});
}

TEST_CASE("dome on 5x5: boundary minima merge and the top closes one loop") {
  std::vector<double> v;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) v.push_back(-((i - 2) * (i - 2) + (j - 2) * (j - 2)) + 0.01 * (i + 5 * j) / 25.0);
  const GridField f({5, 5}, 1.0, false, v);
  const Barcode bc = sublevel_persistence(CubicalFiltration::lower_star(f));
  // Sublevel sets grow inward from the boundary ring, so just below the peak
  // they form an annulus; the loop dies when the peak enters.
  for (double u : f.values) {
    const auto b = oracle::betti_at(f, u);
    CHECK(alive(bc, 0, u) == b.b0);
    CHECK(alive(bc, 1, u) == b.b1);
  }
  CHECK(bc.infinite_count(0) == 1);
  const auto loops = bc.of_degree(1);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].death == *std::max_element(v.begin(), v.end()));
}

TEST_CASE("single-basin bowl gives one component and no loops") {
  std::vector<double> v;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) v.push_back(std::hypot(i - 2.0, j - 2.1));
  const Barcode bc = sublevel_persistence(CubicalFiltration::lower_star(GridField({5, 5}, 1.0, false, v)));
  CHECK(bc.of_degree(0).size() == 1);
  CHECK(bc.of_degree(1).empty());
}

TEST_CASE("matrix reduction agrees with boundary ranks at every level") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n0 = 3 + seed % 5, n1 = 3 + (seed / 5) % 4;
    const bool periodic = seed % 3 == 2;
    const GridField f = oracle::random_field({n0, n1}, seed, periodic, seed % 4 == 1 ? 3 : 0);
    const Barcode bc = sublevel_persistence(CubicalFiltration::lower_star(f));
    for (double u : f.values) {
      const auto b = oracle::betti_at(f, u);
      CHECK(alive(bc, 0, u) == b.b0);
      CHECK(alive(bc, 1, u) == b.b1);
      CHECK(alive(bc, 2, u) == b.b2);
    }
  }
}

TEST_CASE("degree-0 bars: matrix reduction equals union-find on 16x16 grids") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GridField f = oracle::random_field({16, 16}, 500 + seed, false, seed % 10 == 0 ? 5 : 0);
    const auto filt = CubicalFiltration::lower_star(f);
    CHECK(pairs(sublevel_persistence(filt).of_degree(0)) == pairs(zeroth_persistence_union_find(filt).of_degree(0)));
  }
}

TEST_CASE("elder rule: the younger component dies at a merge") {
  // Minima at 0 (left) and 0.2 (right) merge at 1; the later one dies.
  const Barcode bc = zeroth_persistence_union_find(CubicalFiltration::lower_star(GridField::line({0.0, 1.0, 0.2})));
  const auto bars = bc.of_degree(0);
  REQUIRE(bars.size() == 2);
  CHECK(bars[0] == Bar{0, 0.0, kInfiniteDeath});
  CHECK(bars[1] == Bar{0, 0.2, 1.0});
}

TEST_CASE("barcode Euler characteristic") {
  CHECK(barcode_euler_char(Barcode{}, 3.0) == 0.0);
  const Barcode two{{{0, 0.0, kInfiniteDeath}, {0, 0.5, 1.0}}};
  CHECK(barcode_euler_char(two, 1.0) == 1.5);
  CHECK(barcode_euler_char(Barcode{{{0, 0.0, 2.0}}}, 1.0) == 1.0);
  CHECK(barcode_euler_char(Barcode{{{1, 0.0, 2.0}}}, 1.0) == -1.0);
  CHECK(barcode_euler_char(Barcode{{{0, 2.0, 3.0}}}, 1.0) == 0.0);
}

TEST_CASE("barcode Euler characteristic equals a chi(X) minus the truncated integral") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GridField f = oracle::random_field({6, 6}, 900 + seed, seed % 2 == 1);
    const auto filt = CubicalFiltration::lower_star(f);
    const ECCurve c = ec_curve(filt);
    const Barcode bc = sublevel_persistence(filt);
    const double fmax = *std::max_element(f.values.begin(), f.values.end());
    const double chi = static_cast<double>(c.total_chi);
    CHECK(barcode_euler_char(bc, fmax) == Approx(fmax * chi - upper_integral(c)).epsilon(1e-12));
    for (double a = -2.5; a <= 2.5; a += 0.5)
      CHECK(barcode_euler_char(bc, a) == Approx(a * chi - truncated_upper_integral(c, a)).epsilon(1e-12));
  }
}

TEST_CASE("Euler-Poincare check") {
  const auto filt = CubicalFiltration::lower_star(kLine3);
  CHECK(verify_euler_poincare(filt, sublevel_persistence(filt)).ok);
  CHECK(sublevel_persistence(filt).signed_count(0.7) == 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = CubicalFiltration::lower_star(oracle::random_field({6, 6}, seed));
    CHECK(verify_euler_poincare(g, sublevel_persistence(g)).ok);
  }
  // A barcode missing a bar is caught, with the failing level.
  const auto broken = verify_euler_poincare(filt, Barcode{{{0, 0.0, kInfiniteDeath}}});
  CHECK_FALSE(broken.ok);
  REQUIRE(broken.first_failure.has_value());
  CHECK(*broken.first_failure == 0.5);
}

TEST_CASE("non-monotone cell values are rejected") {
  const GridField h = GridField::line({1.0, 0.0, 1.0});
  CHECK_THROWS_AS(sublevel_persistence(CubicalFiltration::upper_star(h)), DomainError);
}

TEST_CASE("barcode CSV round-trip") {
  const Barcode bc = sublevel_persistence(CubicalFiltration::lower_star(kLine3));
  const std::string text = barcode_csv(bc);
  CHECK(text.rfind("degree,birth,death\n", 0) == 0);
  CHECK(text.find("inf") != std::string::npos);
  const Barcode back = parse_barcode_csv(text);
  CHECK(pairs(back.bars) == pairs(bc.bars));
}
