#pragma once

// Gaussian special functions: probabilists' Hermite polynomials, the standard
// normal density and distribution, Gaussian Minkowski functionals of
// half-lines and chi-square sublevel sets, and Gaussian-weighted quadrature.

#include <functional>
#include <span>
#include <vector>

namespace eulerfield {

inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677940;

struct QuadratureConfig {
  double lower = -10.0;
  double upper = 10.0;
  double abs_tol = 1e-10;
  int max_subdivisions = 20;     // maximum bisection depth per segment
  std::vector<double> breakpoints;  // non-smooth points of the integrand

  /// Throws DomainError when lower >= upper, abs_tol <= 0, or a breakpoint is
  /// unsorted or outside [lower, upper].
  void validate() const;
};

enum class Monotonicity { increasing, decreasing, none };

/// A real function that is C^2 except at a finite list of breakpoints.
///
/// Construction checks continuity across each breakpoint and agreement of the
/// supplied derivative with a central finite difference on a fixed probe grid
/// over [-10, 10]; either failure throws DomainError.
class PiecewiseC2Function {
 public:
  using Fn = std::function<double(double)>;

  PiecewiseC2Function(Fn value, Fn derivative, std::vector<double> breakpoints = {},
                      Monotonicity monotonicity = Monotonicity::none);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  Monotonicity monotonicity() const { return monotonicity_; }

  /// Polynomial c[0] + c[1] x + ... with its exact derivative.
  static PiecewiseC2Function polynomial(std::vector<double> coefficients,
                                        Monotonicity monotonicity = Monotonicity::none);
  static PiecewiseC2Function identity();

 private:
  Fn value_;
  Fn derivative_;
  std::vector<double> breakpoints_;
  Monotonicity monotonicity_;
};

/// Probabilists' Hermite polynomial H_n for n >= 0 by forward recurrence;
/// n = -1 gives the Mills-ratio convention (1 - Phi(x)) / phi(x).
double hermite(int n, double x);

double gaussian_pdf(double x);
double gaussian_cdf(double x);
/// 1 - Phi(x), accurate in the upper tail.
double gaussian_sf(double x);

/// Gaussian Minkowski functional of the half-line (-inf, u]:
/// Phi(u) for j = 0, (-1)^(j-1) H_{j-1}(u) phi(u) for j >= 1.
double mink_halfline(int j, double u);

/// Integral of f(x) phi(x) over [cfg.lower, cfg.upper], split at cfg.breakpoints
/// and at `extra_breakpoints`. Throws AccuracyError when a segment does not
/// converge to its share of cfg.abs_tol.
double gaussian_integral(const std::function<double(double)>& f, const QuadratureConfig& cfg,
                         std::span<const double> extra_breakpoints = {});

/// <H_n, G> = integral of H_n(x) G(x) phi(x) dx.
double inner_product_hermite(const PiecewiseC2Function& g, int n, const QuadratureConfig& cfg = {});

/// Points in (lower, upper) where G' changes sign, located by scanning and
/// bisection. Used to keep |G'|-type integrands from straddling a kink.
std::vector<double> derivative_sign_changes(const PiecewiseC2Function& g,
                                            const QuadratureConfig& cfg = {});

/// Integral over u of the j-th Gaussian Minkowski functional of the chi-square
/// sublevel set {sum x_i^2 <= u} in R^k. Requires k >= j >= 1.
double chi2_mink_integrals(int k, int j);

}  // namespace eulerfield
