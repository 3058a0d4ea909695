#pragma once

// Exact sampling of zero-mean, unit-variance Gaussian random fields on grids
// over boxes (separable squared-exponential kernel) and flat tori (periodized
// squared-exponential kernel), and Gaussian-related fields built from them.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eulerfield/cubical.hpp"
#include "eulerfield/geometry.hpp"
#include "json.hpp"

namespace eulerfield {

enum class CovarianceKind { squared_exponential, periodic_squared_exponential };

struct CovarianceModel {
  CovarianceKind kind = CovarianceKind::squared_exponential;
  double length_scale = 1.0;

  /// Correlation at lag s; `period` is used only by the periodic kind.
  double correlation(double lag, double period = 0.0) const;
};

/// Factor by which the covariance rescales Euclidean lengths: the mixed
/// second derivative of exp(-(s-t)^2 / (2 ell^2)) at s = t is 1/ell^2, so
/// lengths scale by 1/ell.
double induced_metric_scale(const CovarianceModel& cov);

/// Copy of `physical` whose metric_scale matches the field's induced metric.
Domain induced_domain(const Domain& physical, const CovarianceModel& cov);

struct SampleSpec {
  Domain domain;
  std::vector<std::size_t> points_per_axis;
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
};

/// Grid spacing implied by a domain and point counts: side/(n-1) on boxes,
/// side/n on tori. Throws DomainError if the axes disagree.
double grid_spacing(const Domain& domain, std::span<const std::size_t> points_per_axis);

/// Per-axis factors computed once, then shared read-only by any number of
/// concurrent `sample` calls.
class FieldSampler {
 public:
  FieldSampler(const Domain& domain, std::vector<std::size_t> points_per_axis, CovarianceModel cov);

  /// Deterministic in (seed, replicate, component). Distinct components of
  /// the same replicate are independent draws.
  GridField sample(std::uint64_t seed, std::uint64_t replicate, std::uint32_t component = 0) const;

  double spacing() const { return spacing_; }
  const Domain& domain() const { return domain_; }
  const CovarianceModel& covariance() const { return cov_; }
  const std::vector<std::size_t>& points_per_axis() const { return points_; }
  /// Matrix A_k with A_k A_k^T equal to the axis-k correlation matrix.
  const Eigen::MatrixXd& axis_factor(int axis) const { return factors_[axis]; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Domain domain_;
  std::vector<std::size_t> points_;
  CovarianceModel cov_;
  double spacing_ = 0.0;
  std::vector<Eigen::MatrixXd> factors_;
  std::vector<std::string> warnings_;
};

GridField sample_field(const SampleSpec& spec, const CovarianceModel& cov);

/// Pointwise g = G(f_1, ..., f_k). Throws ShapeError on mismatched grids.
GridField gaussian_related(std::span<const GridField> fields,
                           const std::function<double(std::span<const double>)>& g);

/// Chi-square field: sum of squares of the components.
GridField chi_square_field(std::span<const GridField> fields);

void to_json(nlohmann::json& j, const CovarianceModel& c);
void from_json(const nlohmann::json& j, CovarianceModel& c);

}  // namespace eulerfield
