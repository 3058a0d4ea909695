#pragma once

// Monte Carlo harness: sample fields replicate by replicate, compute a
// topological statistic on each, and compare the mean with a closed-form
// prediction. Results are reduced in replicate-index order, so reports are
// bit-reproducible for a given seed regardless of the worker count.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulerfield/cubical.hpp"
#include "eulerfield/geometry.hpp"
#include "eulerfield/grf.hpp"
#include "eulerfield/predict.hpp"
#include "eulerfield/special_fn.hpp"
#include "json.hpp"

namespace eulerfield {

enum class StatisticKind {
  upper_integral,
  signed_sum_below,
  truncated_integral,
  barcode_ec,
  ec_at,
  chi2_integral,
};

const char* to_string(StatisticKind kind);
StatisticKind statistic_from_string(const std::string& name);

/// Polynomial transform G applied pointwise before the upper integral.
struct TransformSpec {
  std::vector<double> coefficients;  // c0 + c1 x + c2 x^2 + ...
  Monotonicity monotonicity = Monotonicity::none;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Domain domain;  // physical domain; the metric scale follows the covariance
  CovarianceModel cov;
  std::vector<std::size_t> points_per_axis;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  StatisticKind statistic = StatisticKind::upper_integral;
  double a = 0.0;
  double u = 0.0;
  int k = 1;
  std::optional<TransformSpec> transform;
  /// Fraction of |predicted| added to the 3 SE band; defaults to 0.05 in 1-D
  /// and 0.10 in 2-D.
  std::optional<double> margin_fraction;
  /// Assert the exact identities on every replicate.
  bool check_identities = true;
  /// Enforce N >= 100 and spacing <= ell/8.
  bool acceptance = false;
  unsigned workers = 1;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
  double margin() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

struct IdentityTally {
  std::size_t fields = 0;
  std::size_t checks = 0;
};

struct ExperimentReport {
  std::string name;
  std::string statistic;
  Prediction prediction;
  double predicted = 0.0;
  double empirical_mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double z_score = 0.0;
  double discretization_margin = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  IdentityTally identities;
  std::vector<double> values;  // per replicate, in index order
};

void to_json(nlohmann::json& j, const ExperimentReport& r);

/// Fills mean, standard error, z-score and pass from `values`, `predicted`
/// and `discretization_margin`.
void summarize(ExperimentReport& report);

/// Produces the field for replicate i. The default source samples the
/// configured Gaussian field (k components combined into a chi-square field
/// for chi2_integral, transformed by G if one is given).
using FieldSource = std::function<GridField(std::uint64_t replicate)>;

FieldSource default_source(const ExperimentConfig& cfg);

/// Prediction attached to an experiment, on the covariance-induced domain.
Prediction predict_for(const ExperimentConfig& cfg);
/// Statistic of one field under the configuration.
double compute_statistic(const ExperimentConfig& cfg, const GridField& field);

/// Errors thrown while processing replicate i are rethrown as
/// std::runtime_error prefixed with "replicate i: ".
ExperimentReport run_experiment(const ExperimentConfig& cfg, const FieldSource& source = {});

/// One ec_at report per level, all evaluated on the same sampled fields.
std::vector<ExperimentReport> ec_curve_experiment(const ExperimentConfig& cfg, std::span<const double> u_list,
                                                  const FieldSource& source = {});

/// Checks, on one field, that
///  - the barcode Euler characteristic equals a chi(X) - int min(f, a) for
///    a = f_max and for a grid of levels,
///  - the signed bar count equals chi(f <= u) at every breakpoint,
///  - the signed sum below a equals int min(f, a) + a chi(f <= a) - a chi(X),
///  - breakpoint and level-set forms of the upper and lower integrals agree,
///  - the upper integral is additive against a cell-aligned integer step.
/// Relative tolerance 1e-9. Returns the number of checks made; throws
/// std::logic_error naming the first failing identity.
std::size_t check_exact_identities(const GridField& field, std::uint64_t salt = 0);

/// "replicate,value" lines.
std::string replicate_csv(const ExperimentReport& report);
void write_report(const ExperimentReport& report, const std::filesystem::path& json_path,
                  const std::optional<std::filesystem::path>& csv_path = std::nullopt);

/// Calls task(i) for i in [0, count) on `workers` threads. The first
/// exception (lowest index) is rethrown after all threads finish.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace eulerfield
