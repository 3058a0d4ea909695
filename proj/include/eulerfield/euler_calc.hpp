#pragma once

// Upper and lower Euler integrals of grid fields, computed exactly from the
// jumps of the sublevel Euler-characteristic curve.

#include <vector>

#include "eulerfield/cubical.hpp"
#include "json.hpp"

namespace eulerfield {

/// Jump of chi(f <= u) as u crosses `value` from below.
struct CriticalDelta {
  double value = 0.0;
  long delta = 0;
};

/// Nonzero jumps of the curve, increasing in value; the first is measured from 0.
std::vector<CriticalDelta> critical_deltas(const ECCurve& curve);

/// Sum over critical values of delta * value.
double upper_integral(const ECCurve& curve);

/// The same integral evaluated level by level:
///   int_0^inf (chi(X) - chi(f <= u)) du - int_{-inf}^0 chi(f <= u) du,
/// exact on the step function.
double upper_integral_by_levels(const ECCurve& curve);

/// Lower Euler integral of f, given the curve of -f.
double lower_integral(const ECCurve& curve_of_negated);

/// Lower integral of f evaluated level by level from closed superlevel sets,
///   int_0^inf (chi(f >= u) - chi(f < -u)) du,  chi(f < v) := chi(X) - chi(f >= v),
/// where chi(f >= u) is read off the curve of -f at -u.
double lower_integral_by_levels(const ECCurve& curve_of_negated);

/// Upper integral of min(f, a).
double truncated_upper_integral(const ECCurve& curve, double a);

struct SignedSum {
  double value = 0.0;
  double level = 0.0;    // level actually used
  bool shifted = false;  // true if `a` sat on a breakpoint and was moved up
};

/// Sum of delta * value over critical values strictly below a. A level that
/// coincides with a breakpoint is moved to a + 1e-12 (or the next
/// representable value above a breakpoint-free gap) and reported.
SignedSum signed_sum_below(const ECCurve& curve, double a);

/// Throws std::logic_error if the breakpoint and level-set evaluations of the
/// upper integral disagree beyond rounding.
void check_upper_integral_forms(const ECCurve& curve);

/// {"upper_integral", "lower_integral", "deltas": [[v, delta], ...]}.
nlohmann::json integrals_report(const ECCurve& curve, const ECCurve& curve_of_negated);

}  // namespace eulerfield
