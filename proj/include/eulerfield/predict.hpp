#pragma once

// Closed-form expectations for Euler integrals, EC curves, signed sums of
// critical values and barcode Euler characteristics of Gaussian and
// Gaussian-related fields. Every formula is assembled from lk_curvatures and
// the special functions, so each symbol has a single implementation.

#include <optional>
#include <span>
#include <string>

#include "eulerfield/geometry.hpp"
#include "eulerfield/special_fn.hpp"
#include "json.hpp"

namespace eulerfield {

enum class FormulaId {
  gkf_ec,
  thm_general,
  thm_real,
  cor_monotone,
  thm_chi2,
  thm_signed_sum,
  thm_signed_sum_level,
  lemma_Ga,
  thm_barcode_ec_level,
  thm_barcode_ec_max,
};

const char* to_string(FormulaId id);
FormulaId formula_from_string(const std::string& name);

struct Prediction {
  double value = 0.0;
  FormulaId formula_id = FormulaId::gkf_ec;
  nlohmann::json inputs;
};

void to_json(nlohmann::json& j, const Prediction& p);

/// E chi(f <= u) = sum_j (2 pi)^{-j/2} L_j M_j((-inf, u]).
Prediction expected_ec_sublevel(const Domain& dom, double u);

/// chi(M) E[g] - sum_{j>=1} (2 pi)^{-j/2} L_j int M_j(D_u) du.
/// `mink_integrals[j-1]` holds the j-th integral; missing entries count as 0.
Prediction expected_upper_integral_general(const Domain& dom, double mean_g,
                                           std::span<const double> mink_integrals);

/// Real-valued transform g = G(f). Evaluates the general form with
/// <H_{j-1}, sign(G')^j G'>; for monotone G also the <H_j, G> shortcut and
/// throws std::logic_error if they differ by more than 1e-7.
Prediction expected_upper_integral_real(const Domain& dom, const PiecewiseC2Function& g,
                                        const QuadratureConfig& cfg = {});

/// Chi-square field with k degrees of freedom; requires k >= dim.
Prediction expected_chi2_integral(const Domain& dom, int k);

/// -L_1 / sqrt(2 pi).
Prediction expected_signed_sum(const Domain& dom);

/// Expected sum of delta * v over critical values v < a.
Prediction expected_signed_sum_below(const Domain& dom, double a);

/// Expected upper integral of min(f, a).
Prediction expected_truncated_integral(const Domain& dom, double a);

/// Expected Euler characteristic of the barcode truncated at level a.
Prediction expected_barcode_ec(const Domain& dom, double a);

/// E[f_max] chi(M) + L_1 / sqrt(2 pi), with a caller-supplied E[f_max].
Prediction expected_barcode_ec_max(const Domain& dom, double expected_fmax);

}  // namespace eulerfield
