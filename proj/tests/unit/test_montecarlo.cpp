#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "eulerfield/errors.hpp"
#include "eulerfield/montecarlo.hpp"

using namespace eulerfield;
using doctest::Approx;

namespace {

ExperimentConfig line_config(std::size_t n) {
  ExperimentConfig c;
  c.name = "line";
  c.domain = Domain::box({10});
  c.points_per_axis = {201};
  c.replicates = n;
  c.seed = 2024;
  return c;
}

}  // namespace

TEST_CASE("summary statistics and the pass rule") {
  ExperimentReport r;
  r.values = {1.0, 2.0, 3.0, 4.0};
  r.predicted = 2.0;
  r.discretization_margin = 0.0;
  summarize(r);
  CHECK(r.n == 4);
  CHECK(r.empirical_mean == 2.5);
  CHECK(r.std_error == Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(r.z_score == Approx(0.5 / r.std_error));
  CHECK(r.pass);
  r.predicted = 2.5 + 3.0 * r.std_error + 0.01;
  summarize(r);
  CHECK_FALSE(r.pass);
  r.discretization_margin = 0.02;
  summarize(r);
  CHECK(r.pass);
}

TEST_CASE("constant stub sampler gives an exact, zero-variance report") {
  ExperimentConfig c = line_config(100);
  c.statistic = StatisticKind::ec_at;
  c.u = 0.0;
  const FieldSource zero = [](std::uint64_t) { return GridField::line(std::vector<double>(201, 0.0), 0.05); };
  const ExperimentReport r = run_experiment(c, zero);
  CHECK(r.empirical_mean == 1.0);
  CHECK(r.std_error == 0.0);
  for (double v : r.values) CHECK(v == 1.0);
  CHECK(r.identities.fields == 100);

  const FieldSource one = [](std::uint64_t) { return GridField::line(std::vector<double>(201, 1.0), 0.05); };
  const ExperimentReport below = run_experiment(c, one);
  CHECK(below.empirical_mean == 0.0);
  CHECK(below.std_error == 0.0);
  c.u = 1.0;
  CHECK(run_experiment(c, one).empirical_mean == 1.0);
}

TEST_CASE("reports are bit-reproducible and independent of the worker count") {
  ExperimentConfig c = line_config(60);
  const ExperimentReport a = run_experiment(c);
  const ExperimentReport b = run_experiment(c);
  c.workers = 3;
  const ExperimentReport d = run_experiment(c);
  CHECK(a.values == b.values);
  CHECK(a.values == d.values);
  CHECK(nlohmann::json(a).dump() == nlohmann::json(d).dump());
}

TEST_CASE("upper integral experiment on the 1-D box") {
  const ExperimentReport r = run_experiment(line_config(1000));
  CHECK(r.predicted == Approx(-3.98942280401432678));
  CHECK(r.prediction.formula_id == FormulaId::thm_signed_sum);
  CHECK(r.discretization_margin == Approx(0.05 * 3.98942280401432678));
  CHECK(r.pass);
}

TEST_CASE("replicate halves agree") {
  const ExperimentReport r = run_experiment(line_config(1000));
  ExperimentReport h1, h2;
  h1.values.assign(r.values.begin(), r.values.begin() + 500);
  h2.values.assign(r.values.begin() + 500, r.values.end());
  summarize(h1);
  summarize(h2);
  CHECK(std::abs(h1.empirical_mean - h2.empirical_mean) <= 3.0 * std::hypot(h1.std_error, h2.std_error));
}

TEST_CASE("EC curve experiment uses common random numbers") {
  ExperimentConfig c;
  c.name = "ec";
  c.domain = Domain::box({6, 6});
  c.points_per_axis = {25, 25};
  c.replicates = 100;
  c.seed = 5;
  const std::vector<double> us = {-8.0, 0.0, 8.0};
  const auto reports = ec_curve_experiment(c, us);
  REQUIRE(reports.size() == 3);
  CHECK(std::abs(reports[0].predicted) < 1e-12);
  CHECK(reports[0].empirical_mean == 0.0);
  CHECK(reports[2].predicted == Approx(1.0));
  CHECK(reports[2].empirical_mean == 1.0);
  CHECK(reports[1].predicted == Approx(2.4098593171027440));
  // The u = 0 column equals a standalone run on the same seed.
  ExperimentConfig single = c;
  single.statistic = StatisticKind::ec_at;
  single.u = 0.0;
  CHECK(run_experiment(single).values == reports[1].values);
  const std::vector<double> empty;
  CHECK_THROWS_AS(ec_curve_experiment(c, empty), ConfigError);
}

TEST_CASE("transforms and chi-square fields") {
  ExperimentConfig c = line_config(200);
  c.transform = TransformSpec{{0, 1, 0, 1}, Monotonicity::increasing};
  const ExperimentReport r = run_experiment(c);
  CHECK(r.prediction.formula_id == FormulaId::cor_monotone);
  CHECK(r.predicted == Approx(-4.0 * 10.0 / std::sqrt(2.0 * 3.141592653589793)).epsilon(1e-8));

  ExperimentConfig k = c;
  k.transform.reset();
  k.statistic = StatisticKind::chi2_integral;
  k.k = 2;
  k.domain = Domain::box({2, 2});
  k.points_per_axis = {9, 9};
  k.replicates = 20;
  const ExperimentReport chi = run_experiment(k);
  CHECK(chi.prediction.formula_id == FormulaId::thm_chi2);
  for (double v : chi.values) CHECK(std::isfinite(v));
}

TEST_CASE("barcode experiment asserts the identity on every replicate") {
  ExperimentConfig c = line_config(50);
  c.statistic = StatisticKind::barcode_ec;
  c.a = 0.0;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.predicted == Approx(2.39365368240859));
  CHECK(r.identities.fields == 50);
}

TEST_CASE("exact identities on random 8x8 fields") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GridField f = oracle::random_field({8, 8}, 7000 + seed, seed % 2 == 1, seed % 5 == 0 ? 4 : 0);
    CHECK(check_exact_identities(f, seed) > 20);
  }
}

TEST_CASE("errors carry the replicate index") {
  ExperimentConfig c = line_config(10);
  const FieldSource bad = [](std::uint64_t i) {
    if (i == 7) throw NumericalError("boom");
    return GridField::line(std::vector<double>(201, 0.0), 0.05);
  };
  try {
    run_experiment(c, bad);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).rfind("replicate 7: boom", 0) == 0);
  }
}

TEST_CASE("configuration validation and JSON") {
  ExperimentConfig c = line_config(50);
  c.acceptance = true;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // fewer than 100 replicates
  c.replicates = 100;
  CHECK_NOTHROW(c.validate());
  c.points_per_axis = {41};  // spacing 0.25 > ell/8
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto j = nlohmann::json::parse(R"({
    "name": "t", "domain": {"kind": "torus", "side_lengths": [5, 5]},
    "points_per_axis": [64, 64], "replicates": 100, "seed": 3, "statistic": "barcode_ec", "a": 0.5
  })");
  const ExperimentConfig parsed = j.get<ExperimentConfig>();
  CHECK(parsed.cov.kind == CovarianceKind::periodic_squared_exponential);
  CHECK(parsed.statistic == StatisticKind::barcode_ec);
  CHECK(parsed.a == 0.5);
  CHECK(parsed.margin() == 0.10);
  const ExperimentConfig again = nlohmann::json(parsed).get<ExperimentConfig>();
  CHECK(nlohmann::json(again) == nlohmann::json(parsed));
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"domain": {"kind":"box","side_lengths":[1]}, "points_per_axis":[9], "statistic":"median"})")
                      .get<ExperimentConfig>(),
                  ConfigError);
}

TEST_CASE("per-replicate CSV") {
  ExperimentReport r;
  r.values = {1.5, -2.0};
  CHECK(replicate_csv(r) == "replicate,value\n0,1.5\n1,-2\n");
}
