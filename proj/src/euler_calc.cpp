#include "eulerfield/euler_calc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eulerfield {

std::vector<CriticalDelta> critical_deltas(const ECCurve& curve) {
  std::vector<CriticalDelta> out;
  long prev = 0;
  for (std::size_t k = 0; k < curve.breakpoints.size(); ++k) {
    const long d = curve.chi_values[k] - prev;
    if (d != 0) out.push_back({curve.breakpoints[k], d});
    prev = curve.chi_values[k];
  }
  return out;
}

double upper_integral(const ECCurve& curve) {
  double sum = 0.0;
  for (const auto& cd : critical_deltas(curve)) sum += static_cast<double>(cd.delta) * cd.value;
  return sum;
}

double upper_integral_by_levels(const ECCurve& curve) {
  const auto& b = curve.breakpoints;
  const auto& chi = curve.chi_values;
  const double total = static_cast<double>(curve.total_chi);
  double integral = 0.0;
  // Step i holds chi[i] on [b[i], b[i+1]); the last step extends to +inf,
  // where the integrand chi(X) - chi vanishes.
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double lo = b[i];
    const double hi = i + 1 < b.size() ? b[i + 1] : std::numeric_limits<double>::infinity();
    const double c = static_cast<double>(chi[i]);
    // negative part: -int over [lo, min(hi, 0)) of chi
    if (lo < 0.0) integral -= c * (std::min(hi, 0.0) - lo);
    // positive part: int over [max(lo, 0), hi) of (chi(X) - chi)
    if (hi > 0.0 && c != total) integral += (total - c) * (hi - std::max(lo, 0.0));
  }
  // Below the first breakpoint chi = 0; on [0, b[0]) that contributes chi(X) * b[0].
  if (!b.empty() && b.front() > 0.0) integral += total * b.front();
  return integral;
}

void check_upper_integral_forms(const ECCurve& curve) {
  const double a = upper_integral(curve);
  const double b = upper_integral_by_levels(curve);
  double scale = 1.0;
  for (std::size_t k = 0; k < curve.breakpoints.size(); ++k)
    scale = std::max(scale, std::abs(curve.breakpoints[k] * static_cast<double>(curve.chi_values[k])));
  if (std::abs(a - b) > 1e-9 * scale * static_cast<double>(curve.breakpoints.size() + 1))
    throw std::logic_error("upper integral: breakpoint sum and level-set integral disagree");
}

double lower_integral(const ECCurve& curve_of_negated) { return -upper_integral(curve_of_negated); }

double lower_integral_by_levels(const ECCurve& curve_of_negated) {
  // With C the curve of -f: chi(f >= u) = C(-u) and chi(f < -u) = chi(X) - C(u),
  // so the integrand over u >= 0 is C(-u) + C(u) - chi(X).
  const auto& b = curve_of_negated.breakpoints;
  const auto& c = curve_of_negated.chi_values;
  const double total = static_cast<double>(curve_of_negated.total_chi);
  const double inf = std::numeric_limits<double>::infinity();
  double integral = 0.0;
  // Piece C(-u) on u >= 0, i.e. C(v) on v <= 0.
  for (std::size_t i = 0; i < b.size() && b[i] < 0.0; ++i) {
    const double hi = std::min(i + 1 < b.size() ? b[i + 1] : inf, 0.0);
    integral += static_cast<double>(c[i]) * (hi - b[i]);
  }
  // Piece C(u) - chi(X) on u >= 0; below the first breakpoint C = 0.
  if (b.empty() || b.front() > 0.0) integral -= total * (b.empty() ? 0.0 : b.front());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double hi = i + 1 < b.size() ? b[i + 1] : inf;
    if (hi <= 0.0 || static_cast<double>(c[i]) == total) continue;
    integral += (static_cast<double>(c[i]) - total) * (hi - std::max(b[i], 0.0));
  }
  return integral;
}

double truncated_upper_integral(const ECCurve& curve, double a) {
  double sum = 0.0;
  for (const auto& cd : critical_deltas(curve)) {
    if (cd.value >= a) break;
    sum += static_cast<double>(cd.delta) * cd.value;
  }
  return sum + a * static_cast<double>(curve.total_chi - curve.before(a));
}

SignedSum signed_sum_below(const ECCurve& curve, double a) {
  SignedSum out;
  out.level = a;
  const auto& b = curve.breakpoints;
  if (std::binary_search(b.begin(), b.end(), a)) {
    out.shifted = true;
    double up = a + 1e-12;
    if (up <= a) up = std::nextafter(a, std::numeric_limits<double>::infinity());
    const auto next = std::upper_bound(b.begin(), b.end(), a);
    if (next != b.end() && up >= *next) up = 0.5 * (a + *next);
    out.level = up;
  }
  for (const auto& cd : critical_deltas(curve)) {
    if (cd.value >= out.level) break;
    out.value += static_cast<double>(cd.delta) * cd.value;
  }
  return out;
}

nlohmann::json integrals_report(const ECCurve& curve, const ECCurve& curve_of_negated) {
  nlohmann::json deltas = nlohmann::json::array();
  for (const auto& cd : critical_deltas(curve)) deltas.push_back({cd.value, cd.delta});
  return {{"upper_integral", upper_integral(curve)},
          {"lower_integral", lower_integral(curve_of_negated)},
          {"deltas", deltas}};
}

}  // namespace eulerfield
