#pragma once

// Parameter domains and their Lipschitz-Killing curvatures in the metric
// induced by a squared-exponential field with correlation length ell.

#include <array>
#include <vector>

#include "json.hpp"

namespace eulerfield {

enum class DomainKind { box, flat_torus, sphere };

/// Box or flat torus given by physical side lengths, or a round 2-sphere.
/// `metric_scale` is the correlation length ell of the inducing covariance:
/// distances are measured in units of ell, so L_j picks up a factor ell^-j.
struct Domain {
  DomainKind kind = DomainKind::box;
  std::vector<double> side_lengths;
  double radius = 0.0;
  double metric_scale = 1.0;

  static Domain box(std::vector<double> sides, double ell = 1.0);
  static Domain torus(std::vector<double> sides, double ell = 1.0);
  static Domain sphere(double radius, double ell = 1.0);

  int dim() const;
  /// Throws DomainError on non-positive lengths or unsupported kind/dim.
  void validate() const;
};

struct LKCurvatures {
  std::vector<double> values;  // L_0 .. L_d

  int dim() const { return static_cast<int>(values.size()) - 1; }
  /// L_j, with L_j = 0 for j > d.
  double operator[](int j) const { return j < static_cast<int>(values.size()) ? values[j] : 0.0; }
};

LKCurvatures lk_curvatures(const Domain& domain);

/// Euler characteristic of the domain (= L_0).
int euler_characteristic(const Domain& domain);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// binom(n, k) * omega_n / (omega_k * omega_{n-k}).
double flag_coefficient(int n, int k);

/// Lebesgue area of the r-tube around an a-by-b rectangle, assembled from the
/// Euclidean Lipschitz-Killing curvatures of the rectangle.
double tube_volume_box2d(std::array<double, 2> sides, double r);

void to_json(nlohmann::json& j, const Domain& d);
void from_json(const nlohmann::json& j, Domain& d);

const char* to_string(DomainKind kind);

}  // namespace eulerfield
