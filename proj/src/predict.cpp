#include "eulerfield/predict.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eulerfield/errors.hpp"

namespace eulerfield {

namespace {

// (2 pi)^{-j/2}
double gkf_weight(int j) { return std::pow(2.0 * std::numbers::pi, -0.5 * j); }

nlohmann::json base_inputs(const Domain& dom, const LKCurvatures& lk) {
  return {{"domain", dom}, {"lk", lk.values}};
}

Prediction make(FormulaId id, double value, nlohmann::json inputs) {
  if (!std::isfinite(value)) throw DomainError(std::string("prediction ") + to_string(id) + " is not finite");
  return Prediction{value, id, std::move(inputs)};
}

}  // namespace

const char* to_string(FormulaId id) {
  switch (id) {
    case FormulaId::gkf_ec: return "gkf_ec";
    case FormulaId::thm_general: return "thm_general";
    case FormulaId::thm_real: return "thm_real";
    case FormulaId::cor_monotone: return "cor_monotone";
    case FormulaId::thm_chi2: return "thm_chi2";
    case FormulaId::thm_signed_sum: return "thm_signed_sum";
    case FormulaId::thm_signed_sum_level: return "thm_signed_sum_level";
    case FormulaId::lemma_Ga: return "lemma_Ga";
    case FormulaId::thm_barcode_ec_level: return "thm_barcode_ec_level";
    case FormulaId::thm_barcode_ec_max: return "thm_barcode_ec_max";
  }
  return "?";
}

FormulaId formula_from_string(const std::string& name) {
  for (FormulaId id : {FormulaId::gkf_ec, FormulaId::thm_general, FormulaId::thm_real,
                       FormulaId::cor_monotone, FormulaId::thm_chi2, FormulaId::thm_signed_sum,
                       FormulaId::thm_signed_sum_level, FormulaId::lemma_Ga,
                       FormulaId::thm_barcode_ec_level, FormulaId::thm_barcode_ec_max})
    if (name == to_string(id)) return id;
  throw ConfigError("formula: unknown id '" + name + "'");
}

void to_json(nlohmann::json& j, const Prediction& p) {
  j = nlohmann::json{{"formula_id", to_string(p.formula_id)}, {"value", p.value}, {"inputs", p.inputs}};
}

Prediction expected_ec_sublevel(const Domain& dom, double u) {
  const LKCurvatures lk = lk_curvatures(dom);
  double value = 0.0;
  for (int j = 0; j <= lk.dim(); ++j) value += gkf_weight(j) * lk[j] * mink_halfline(j, u);
  auto inputs = base_inputs(dom, lk);
  inputs["u"] = u;
  return make(FormulaId::gkf_ec, value, std::move(inputs));
}

Prediction expected_upper_integral_general(const Domain& dom, double mean_g,
                                           std::span<const double> mink_integrals) {
  const LKCurvatures lk = lk_curvatures(dom);
  double value = lk[0] * mean_g;
  for (int j = 1; j <= lk.dim(); ++j) {
    const double m = static_cast<std::size_t>(j - 1) < mink_integrals.size() ? mink_integrals[j - 1] : 0.0;
    value -= gkf_weight(j) * lk[j] * m;
  }
  auto inputs = base_inputs(dom, lk);
  inputs["mean_g"] = mean_g;
  inputs["mink_integrals"] = std::vector<double>(mink_integrals.begin(), mink_integrals.end());
  return make(FormulaId::thm_general, value, std::move(inputs));
}

Prediction expected_upper_integral_real(const Domain& dom, const PiecewiseC2Function& g,
                                        const QuadratureConfig& cfg) {
  const LKCurvatures lk = lk_curvatures(dom);
  const int d = lk.dim();
  const double mean_g = inner_product_hermite(g, 0, cfg);

  std::vector<double> cuts = derivative_sign_changes(g, cfg);
  cuts.insert(cuts.end(), g.breakpoints().begin(), g.breakpoints().end());

  double general = lk[0] * mean_g;
  std::vector<double> terms;
  for (int j = 1; j <= d; ++j) {
    // sign(G')^j G' is |G'| for odd j and G' for even j.
    const bool odd = j % 2 == 1;
    const double ip = gaussian_integral(
        [&](double x) {
          const double dg = g.derivative(x);
          return hermite(j - 1, x) * (odd ? std::abs(dg) : dg);
        },
        cfg, cuts);
    terms.push_back(ip);
    general += (odd ? -1.0 : 1.0) * lk[j] * ip * gkf_weight(j);
  }

  auto inputs = base_inputs(dom, lk);
  inputs["mean_g"] = mean_g;
  inputs["hermite_derivative_products"] = terms;
  inputs["general_form"] = general;

  if (g.monotonicity() == Monotonicity::none) return make(FormulaId::thm_real, general, std::move(inputs));

  const bool increasing = g.monotonicity() == Monotonicity::increasing;
  double shortcut = 0.0;
  for (int j = 0; j <= d; ++j) {
    const double sign = increasing && j % 2 == 1 ? -1.0 : 1.0;
    shortcut += sign * lk[j] * inner_product_hermite(g, j, cfg) * gkf_weight(j);
  }
  inputs["monotone_form"] = shortcut;
  if (std::abs(shortcut - general) > 1e-7 * std::max(1.0, std::abs(general)))
    throw std::logic_error("expected_upper_integral_real: monotone shortcut disagrees with general form");
  return make(FormulaId::cor_monotone, shortcut, std::move(inputs));
}

Prediction expected_chi2_integral(const Domain& dom, int k) {
  const LKCurvatures lk = lk_curvatures(dom);
  if (k < 1 || k < lk.dim()) throw DomainError("expected_chi2_integral: requires k >= dim(M)");
  const double gamma_ratio = std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * k));
  const double value = k * lk[0] - 2.0 / std::sqrt(std::numbers::pi) * gamma_ratio * lk[1] +
                       lk[2] / std::numbers::pi;
  auto inputs = base_inputs(dom, lk);
  inputs["k"] = k;
  return make(FormulaId::thm_chi2, value, std::move(inputs));
}

Prediction expected_signed_sum(const Domain& dom) {
  const LKCurvatures lk = lk_curvatures(dom);
  // Adding 0.0 turns a -0 from a vanishing L_1 into +0.
  return make(FormulaId::thm_signed_sum, 0.0 - lk[1] * gkf_weight(1), base_inputs(dom, lk));
}

Prediction expected_signed_sum_below(const Domain& dom, double a) {
  const LKCurvatures lk = lk_curvatures(dom);
  const double phi = gaussian_pdf(a);
  double sum = 0.0;
  for (int j = 1; j <= lk.dim(); ++j) {
    // phi(a) H_{-1}(-a) is Phi(a); evaluate that product directly so the
    // j = 1 term stays finite far in the lower tail.
    const double lead = j == 1 ? gaussian_cdf(a) : phi * hermite(j - 2, -a);
    sum += gkf_weight(j) * lk[j] * (lead - a * phi * hermite(j - 1, -a));
  }
  auto inputs = base_inputs(dom, lk);
  inputs["a"] = a;
  return make(FormulaId::thm_signed_sum_level, -phi * lk[0] - sum, std::move(inputs));
}

Prediction expected_truncated_integral(const Domain& dom, double a) {
  const LKCurvatures lk = lk_curvatures(dom);
  const double phi = gaussian_pdf(a);
  double sum = 0.0;
  for (int j = 1; j <= lk.dim(); ++j)
    sum += gkf_weight(j) * lk[j] * (j == 1 ? gaussian_cdf(a) : phi * hermite(j - 2, -a));
  const double value = lk[0] * (a - a * gaussian_cdf(a) - phi) - sum;
  auto inputs = base_inputs(dom, lk);
  inputs["a"] = a;
  return make(FormulaId::lemma_Ga, value, std::move(inputs));
}

Prediction expected_barcode_ec(const Domain& dom, double a) {
  const LKCurvatures lk = lk_curvatures(dom);
  const double phi = gaussian_pdf(a);
  double sum = 0.0;
  for (int j = 1; j <= lk.dim(); ++j)
    sum += gkf_weight(j) * lk[j] * (j == 1 ? gaussian_cdf(a) : phi * hermite(j - 2, -a));
  const double value = lk[0] * (phi + a * gaussian_cdf(a)) + sum;
  auto inputs = base_inputs(dom, lk);
  inputs["a"] = a;
  return make(FormulaId::thm_barcode_ec_level, value, std::move(inputs));
}

Prediction expected_barcode_ec_max(const Domain& dom, double expected_fmax) {
  const LKCurvatures lk = lk_curvatures(dom);
  auto inputs = base_inputs(dom, lk);
  inputs["expected_fmax"] = expected_fmax;
  return make(FormulaId::thm_barcode_ec_max, expected_fmax * lk[0] + lk[1] * gkf_weight(1),
              std::move(inputs));
}

}  // namespace eulerfield
