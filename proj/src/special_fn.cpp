#include "eulerfield/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eulerfield/errors.hpp"

namespace eulerfield {

namespace {

constexpr double kInvSqrt2 = 0.707106781186547524401;

// Mills ratio (1 - Phi(x)) / phi(x) for large positive x, by backward
// evaluation of the Laplace continued fraction.
double mills_ratio_cf(double x) {
  double t = x;
  for (int k = 80; k >= 1; --k) t = x + k / t;
  return 1.0 / t;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void QuadratureConfig::validate() const {
  if (!(lower < upper)) throw DomainError("quadrature: lower must be < upper");
  if (!(abs_tol > 0.0)) throw DomainError("quadrature: abs_tol must be positive");
  if (max_subdivisions < 1) throw DomainError("quadrature: max_subdivisions must be >= 1");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw DomainError("quadrature: breakpoints must be sorted");
  for (double b : breakpoints)
    if (b < lower || b > upper) throw DomainError("quadrature: breakpoint outside [lower, upper]");
}

PiecewiseC2Function::PiecewiseC2Function(Fn value, Fn derivative, std::vector<double> breakpoints,
                                         Monotonicity monotonicity)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      breakpoints_(std::move(breakpoints)),
      monotonicity_(monotonicity) {
  if (!value_ || !derivative_) throw DomainError("PiecewiseC2Function: empty callable");
  std::sort(breakpoints_.begin(), breakpoints_.end());

  // Continuity: compare first-order extrapolations from both sides.
  constexpr double delta = 1e-7;
  for (double b : breakpoints_) {
    const double left = value_(b - delta) + delta * derivative_(b - delta);
    const double right = value_(b + delta) - delta * derivative_(b + delta);
    const double scale = std::max({1.0, std::abs(left), std::abs(right)});
    if (std::abs(left - right) > 1e-8 * scale)
      throw DomainError("PiecewiseC2Function: discontinuous at breakpoint " + std::to_string(b));
  }

  constexpr int probes = 64;
  for (int i = 0; i < probes; ++i) {
    const double x = -10.0 + 20.0 * (i + 0.5) / probes;
    const bool near_break = std::any_of(breakpoints_.begin(), breakpoints_.end(),
                                        [x](double b) { return std::abs(x - b) < 1e-3; });
    if (near_break) continue;
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    const double fd = (value_(x + h) - value_(x - h)) / (2.0 * h);
    const double d = derivative_(x);
    if (std::abs(fd - d) > 1e-5 * std::max(1.0, std::abs(d)))
      throw DomainError("PiecewiseC2Function: derivative disagrees with finite difference at x = " +
                        std::to_string(x));
  }
}

PiecewiseC2Function PiecewiseC2Function::polynomial(std::vector<double> c, Monotonicity m) {
  auto value = [c](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  auto deriv = [c](double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * c[i];
    return acc;
  };
  return PiecewiseC2Function(value, deriv, {}, m);
}

PiecewiseC2Function PiecewiseC2Function::identity() {
  return polynomial({0.0, 1.0}, Monotonicity::increasing);
}

double hermite(int n, double x) {
  if (n < -1) throw DomainError("hermite: degree must be >= -1");
  if (n == -1) {
    if (x > 25.0) return mills_ratio_cf(x);
    return gaussian_sf(x) / gaussian_pdf(x);
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double gaussian_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double gaussian_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double mink_halfline(int j, double u) {
  if (j < 0) throw DomainError("mink_halfline: j must be >= 0");
  if (j == 0) return gaussian_cdf(u);
  const double sign = (j % 2 == 1) ? 1.0 : -1.0;
  return sign * hermite(j - 1, u) * gaussian_pdf(u);
}

double gaussian_integral(const std::function<double(double)>& f, const QuadratureConfig& cfg,
                         std::span<const double> extra_breakpoints) {
  cfg.validate();
  std::vector<double> cuts{cfg.lower, cfg.upper};
  for (double b : cfg.breakpoints) cuts.push_back(b);
  for (double b : extra_breakpoints)
    if (b > cfg.lower && b < cfg.upper) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&f](double x) { return f(x) * gaussian_pdf(x); };
  const double width = cfg.upper - cfg.lower;
  double total = 0.0;
  double total_err = 0.0;
  bool failed = false;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    double err = 0.0;
    const double part = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, a, b, static_cast<unsigned>(cfg.max_subdivisions), 1e-13, &err);
    total += part;
    total_err += err;
    if (!(err <= cfg.abs_tol * (b - a) / width) && err > cfg.abs_tol * 1e-3) failed = true;
  }
  if (failed || !std::isfinite(total))
    throw AccuracyError("gaussian_integral: adaptive quadrature did not converge", total, total_err);
  return total;
}

double inner_product_hermite(const PiecewiseC2Function& g, int n, const QuadratureConfig& cfg) {
  if (n < -1) throw DomainError("inner_product_hermite: n must be >= -1");
  return gaussian_integral([&](double x) { return hermite(n, x) * g(x); }, cfg, g.breakpoints());
}

std::vector<double> derivative_sign_changes(const PiecewiseC2Function& g, const QuadratureConfig& cfg) {
  constexpr int scan = 4000;
  std::vector<double> out;
  double xa = cfg.lower;
  int sa = sign_of(g.derivative(xa));
  for (int i = 1; i <= scan; ++i) {
    const double xb = cfg.lower + (cfg.upper - cfg.lower) * i / scan;
    const int sb = sign_of(g.derivative(xb));
    if (sb != sa) {
      double lo = xa;
      double hi = xb;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sign_of(g.derivative(mid)) == sa) lo = mid; else hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    sa = sb;
  }
  return out;
}

double chi2_mink_integrals(int k, int j) {
  if (j < 1) throw DomainError("chi2_mink_integrals: j must be >= 1");
  if (k < j) throw DomainError("chi2_mink_integrals: requires k >= j");
  if (j == 1) return 2.0 * std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * k));
  // 2 * int_0^inf t p_k'(t) dt = -2 * int_0^inf p_k(t) dt = -2 after integrating by parts.
  if (j == 2) return -2.0;
  return 0.0;
}

}  // namespace eulerfield
