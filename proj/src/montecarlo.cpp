#include "eulerfield/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "eulerfield/errors.hpp"
#include "eulerfield/euler_calc.hpp"
#include "eulerfield/persistence.hpp"
#include "eulerfield/rng.hpp"

namespace eulerfield {

namespace {

constexpr double kIdentityTol = 1e-9;

bool close(double x, double y) {
  return std::abs(x - y) <= kIdentityTol * std::max({1.0, std::abs(x), std::abs(y)});
}

void require(bool ok, const std::string& what, double lhs, double rhs) {
  if (ok) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << "identity violated: " << what << " (" << lhs << " vs " << rhs << ")";
  throw std::logic_error(msg.str());
}

GridField clipped(const GridField& f, double a) {
  GridField g = f;
  for (double& v : g.values) v = std::min(v, a);
  return g;
}

GridField negated(const GridField& f) {
  GridField g = f;
  for (double& v : g.values) v = -v;
  return g;
}

double upper_of(const GridField& f) { return upper_integral(ec_curve(CubicalFiltration::lower_star(f))); }

// Integer step function: number of random axis-aligned vertex boxes covering
// each vertex. Its upper-star values are constant on closed cells.
GridField random_step(const GridField& like, std::uint64_t salt) {
  CounterStream rng(salt, 0x5eed, 7);
  GridField h = like;
  std::fill(h.values.begin(), h.values.end(), 0.0);
  const std::size_t n0 = like.extents[0];
  const std::size_t n1 = like.dim() == 2 ? like.extents[1] : 1;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
  const int boxes = 1 + static_cast<int>(pick(3));
  for (int b = 0; b < boxes; ++b) {
    const std::size_t i0 = pick(n0), j0 = pick(n1);
    const std::size_t i1 = std::min(n0, i0 + 1 + pick(n0 / 2 + 1));
    const std::size_t j1 = std::min(n1, j0 + 1 + pick(n1 / 2 + 1));
    for (std::size_t i = i0; i < i1; ++i)
      for (std::size_t j = j0; j < j1; ++j) h.values[i * n1 + j] += 1.0;
  }
  return h;
}

void check_config(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError("\"" + key + "\": " + msg);
}

Monotonicity monotonicity_from_string(const std::string& s) {
  if (s == "increasing") return Monotonicity::increasing;
  if (s == "decreasing") return Monotonicity::decreasing;
  if (s == "none") return Monotonicity::none;
  throw ConfigError("\"monotonicity\": expected increasing, decreasing or none");
}

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::none: return "none";
  }
  return "none";
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

}  // namespace

const char* to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::upper_integral: return "upper_integral";
    case StatisticKind::signed_sum_below: return "signed_sum_below";
    case StatisticKind::truncated_integral: return "truncated_integral";
    case StatisticKind::barcode_ec: return "barcode_ec";
    case StatisticKind::ec_at: return "ec_at";
    case StatisticKind::chi2_integral: return "chi2_integral";
  }
  return "?";
}

StatisticKind statistic_from_string(const std::string& name) {
  for (StatisticKind k : {StatisticKind::upper_integral, StatisticKind::signed_sum_below,
                          StatisticKind::truncated_integral, StatisticKind::barcode_ec, StatisticKind::ec_at,
                          StatisticKind::chi2_integral})
    if (name == to_string(k)) return k;
  throw ConfigError("\"statistic\": unknown statistic '" + name + "'");
}

void ExperimentConfig::validate() const {
  try {
    domain.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("\"domain\": ") + e.what());
  }
  check_config(domain.kind != DomainKind::sphere, "domain", "sampling on spheres is not supported");
  check_config(points_per_axis.size() == domain.side_lengths.size(), "points_per_axis",
               "must have one entry per domain axis");
  check_config(replicates >= 1, "replicates", "must be at least 1");
  check_config(cov.length_scale > 0.0, "covariance", "length_scale must be positive");
  double h = 0.0;
  try {
    h = grid_spacing(domain, points_per_axis);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("\"points_per_axis\": ") + e.what());
  }
  if (acceptance) {
    check_config(replicates >= 100, "replicates", "acceptance runs need at least 100 replicates");
    check_config(h <= cov.length_scale / 8.0 * (1.0 + 1e-12), "points_per_axis",
                 "acceptance runs need grid spacing <= length_scale/8");
  }
  if (statistic == StatisticKind::chi2_integral)
    check_config(k >= 1 && k >= domain.dim(), "k", "chi-square degrees of freedom must be >= dimension");
  if (transform) {
    check_config(statistic == StatisticKind::upper_integral, "transform",
                 "a transform is only supported with the upper_integral statistic");
    check_config(!transform->coefficients.empty(), "transform", "polynomial needs coefficients");
  }
  if (margin_fraction) check_config(*margin_fraction >= 0.0, "margin_fraction", "must be nonnegative");
  check_config(workers >= 1, "workers", "must be at least 1");
}

double ExperimentConfig::margin() const {
  return margin_fraction.value_or(domain.side_lengths.size() == 1 ? 0.05 : 0.10);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"name", c.name},
                     {"domain", c.domain},
                     {"covariance", c.cov},
                     {"points_per_axis", c.points_per_axis},
                     {"replicates", c.replicates},
                     {"seed", c.seed},
                     {"statistic", to_string(c.statistic)},
                     {"a", c.a},
                     {"u", c.u},
                     {"k", c.k},
                     {"check_identities", c.check_identities},
                     {"acceptance", c.acceptance},
                     {"workers", c.workers}};
  if (c.transform)
    j["transform"] = {{"poly", c.transform->coefficients}, {"monotonicity", to_string(c.transform->monotonicity)}};
  if (c.margin_fraction) j["margin_fraction"] = *c.margin_fraction;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  check_config(j.is_object(), "experiment", "expected an object");
  check_config(j.contains("domain"), "domain", "missing");
  check_config(j.contains("points_per_axis"), "points_per_axis", "missing");
  try {
    c.domain = j.at("domain").get<Domain>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("\"domain\": ") + e.what());
  }
  if (j.contains("covariance")) {
    try {
      c.cov = j.at("covariance").get<CovarianceModel>();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("\"covariance\": ") + e.what());
    }
  } else {
    c.cov.kind = c.domain.kind == DomainKind::flat_torus ? CovarianceKind::periodic_squared_exponential
                                                          : CovarianceKind::squared_exponential;
    c.cov.length_scale = 1.0;
  }
  auto field = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("\"") + key + "\": " + e.what());
    }
  };
  field("name", c.name);
  field("points_per_axis", c.points_per_axis);
  field("replicates", c.replicates);
  field("seed", c.seed);
  std::string stat = to_string(c.statistic);
  field("statistic", stat);
  c.statistic = statistic_from_string(stat);
  field("a", c.a);
  field("u", c.u);
  field("k", c.k);
  field("check_identities", c.check_identities);
  field("acceptance", c.acceptance);
  field("workers", c.workers);
  if (j.contains("margin_fraction")) {
    double m = 0.0;
    field("margin_fraction", m);
    c.margin_fraction = m;
  }
  if (j.contains("transform")) {
    const auto& t = j.at("transform");
    check_config(t.is_object() && t.contains("poly"), "transform", "expected {\"poly\": [...]}");
    TransformSpec spec;
    try {
      t.at("poly").get_to(spec.coefficients);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("\"poly\": ") + e.what());
    }
    spec.monotonicity = monotonicity_from_string(t.value("monotonicity", std::string("none")));
    c.transform = spec;
  }
  c.validate();
}

void summarize(ExperimentReport& r) {
  r.n = r.values.size();
  double sum = 0.0;
  for (double v : r.values) sum += v;
  r.empirical_mean = r.n ? sum / static_cast<double>(r.n) : 0.0;
  double ss = 0.0;
  for (double v : r.values) ss += (v - r.empirical_mean) * (v - r.empirical_mean);
  const double sd = r.n > 1 ? std::sqrt(ss / static_cast<double>(r.n - 1)) : 0.0;
  r.std_error = r.n ? sd / std::sqrt(static_cast<double>(r.n)) : 0.0;
  const double diff = r.empirical_mean - r.predicted;
  if (r.std_error > 0.0) r.z_score = diff / r.std_error;
  else r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  r.pass = std::abs(diff) <= 3.0 * r.std_error + r.discretization_margin;
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"statistic", r.statistic},
                     {"predicted", r.predicted},
                     {"empirical_mean", r.empirical_mean},
                     {"std_error", r.std_error},
                     {"n", r.n},
                     {"z_score", finite_or_null(r.z_score)},
                     {"discretization_margin", r.discretization_margin},
                     {"pass", r.pass},
                     {"seed", r.seed},
                     {"prediction", r.prediction},
                     {"identities", {{"fields", r.identities.fields}, {"checks", r.identities.checks}}}};
}

FieldSource default_source(const ExperimentConfig& cfg) {
  auto sampler = std::make_shared<const FieldSampler>(cfg.domain, cfg.points_per_axis, cfg.cov);
  const std::uint64_t seed = cfg.seed;
  if (cfg.statistic == StatisticKind::chi2_integral) {
    const int k = cfg.k;
    return [sampler, seed, k](std::uint64_t i) {
      std::vector<GridField> parts;
      for (int c = 0; c < k; ++c) parts.push_back(sampler->sample(seed, i, static_cast<std::uint32_t>(c)));
      return chi_square_field(parts);
    };
  }
  if (cfg.transform) {
    const std::vector<double> coef = cfg.transform->coefficients;
    return [sampler, seed, coef](std::uint64_t i) {
      GridField f = sampler->sample(seed, i);
      for (double& v : f.values) {
        double acc = 0.0;
        for (auto c = coef.rbegin(); c != coef.rend(); ++c) acc = acc * v + *c;
        v = acc;
      }
      return f;
    };
  }
  return [sampler, seed](std::uint64_t i) { return sampler->sample(seed, i); };
}

Prediction predict_for(const ExperimentConfig& cfg) {
  const Domain dom = induced_domain(cfg.domain, cfg.cov);
  switch (cfg.statistic) {
    case StatisticKind::upper_integral:
      if (cfg.transform) {
        const auto g = PiecewiseC2Function::polynomial(cfg.transform->coefficients, cfg.transform->monotonicity);
        return expected_upper_integral_real(dom, g);
      }
      return expected_signed_sum(dom);
    case StatisticKind::signed_sum_below: return expected_signed_sum_below(dom, cfg.a);
    case StatisticKind::truncated_integral: return expected_truncated_integral(dom, cfg.a);
    case StatisticKind::barcode_ec: return expected_barcode_ec(dom, cfg.a);
    case StatisticKind::ec_at: return expected_ec_sublevel(dom, cfg.u);
    case StatisticKind::chi2_integral: return expected_chi2_integral(dom, cfg.k);
  }
  throw std::logic_error("predict_for: unknown statistic");
}

double compute_statistic(const ExperimentConfig& cfg, const GridField& field) {
  const auto filt = CubicalFiltration::lower_star(field);
  const ECCurve curve = ec_curve(filt);
  switch (cfg.statistic) {
    case StatisticKind::upper_integral:
    case StatisticKind::chi2_integral: return upper_integral(curve);
    case StatisticKind::signed_sum_below: return signed_sum_below(curve, cfg.a).value;
    case StatisticKind::truncated_integral: return truncated_upper_integral(curve, cfg.a);
    case StatisticKind::ec_at: return static_cast<double>(curve.at(cfg.u));
    case StatisticKind::barcode_ec: {
      const double value = barcode_euler_char(sublevel_persistence(filt), cfg.a);
      // Always asserted: a disagreement means the reduction is wrong.
      const double rhs = cfg.a * static_cast<double>(curve.total_chi) - upper_of(clipped(field, cfg.a));
      require(close(value, rhs), "barcode EC = a chi(X) - int min(f, a)", value, rhs);
      return value;
    }
  }
  throw std::logic_error("compute_statistic: unknown statistic");
}

std::size_t check_exact_identities(const GridField& f, std::uint64_t salt) {
  std::size_t checks = 0;
  const auto filt = CubicalFiltration::lower_star(f);
  const ECCurve curve = ec_curve(filt);
  const double chi_x = static_cast<double>(curve.total_chi);
  const Barcode bars = sublevel_persistence(filt);

  const auto ep = verify_euler_poincare(filt, bars);
  if (!ep.ok) throw std::logic_error("identity violated: Euler-Poincare: " + ep.diagnostic);
  ++checks;

  const double upper = upper_integral(curve);
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  const double fmax = *hi;
  const double fmin = *lo;
  {
    const double bec = barcode_euler_char(bars, fmax);
    require(close(bec, fmax * chi_x - upper), "barcode EC at f_max = f_max chi(X) - upper integral", bec,
            fmax * chi_x - upper);
    ++checks;
  }
  std::vector<double> levels = {fmin - 1.0, fmin, 0.0, fmax + 1.0};
  for (double q : {0.25, 0.5, 0.75}) levels.push_back(fmin + q * (fmax - fmin));
  for (double a : levels) {
    const double trunc_direct = upper_of(clipped(f, a));
    const double trunc_curve = truncated_upper_integral(curve, a);
    require(close(trunc_direct, trunc_curve), "int min(f, a) from clipped field vs from curve", trunc_direct,
            trunc_curve);
    const double bec = barcode_euler_char(bars, a);
    require(close(bec, a * chi_x - trunc_direct), "barcode EC = a chi(X) - int min(f, a)", bec,
            a * chi_x - trunc_direct);
    const SignedSum ss = signed_sum_below(curve, a);
    const double b = ss.level;
    const double rhs = upper_of(clipped(f, b)) + b * static_cast<double>(curve.at(b)) - b * chi_x;
    require(close(ss.value, rhs), "signed sum below a = int min(f, a) + a chi(f <= a) - a chi(X)", ss.value,
            rhs);
    checks += 3;
  }

  check_upper_integral_forms(curve);
  ++checks;
  // Upper integral of f against minus the level-set lower integral of -f.
  const double dual = -lower_integral_by_levels(curve);
  require(close(upper, dual), "upper integral of f = -lower integral of -f", upper, dual);
  const ECCurve curve_neg = ec_curve(CubicalFiltration::lower_star(negated(f)));
  const double lower_a = lower_integral(curve_neg);
  const double lower_b = lower_integral_by_levels(curve_neg);
  require(close(lower_a, lower_b), "lower integral breakpoint vs level-set form", lower_a, lower_b);
  checks += 2;

  const GridField h = random_step(f, salt);
  const auto h_cells = CubicalFiltration::upper_star(h);
  const double joint = upper_integral(ec_curve(h_cells + filt));
  const double separate = upper_integral(ec_curve(h_cells)) + upper;
  require(close(joint, separate), "additivity against a cell-aligned step", joint, separate);
  ++checks;
  return checks;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    for (unsigned w = 0; w < n; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

template <class PerReplicate>
void run_replicates(const ExperimentConfig& cfg, const FieldSource& source, IdentityTally& tally,
                    PerReplicate&& per_replicate) {
  std::vector<std::size_t> checks(cfg.replicates, 0);
  parallel_for(cfg.replicates, cfg.workers, [&](std::size_t i) {
    try {
      const GridField field = source(i);
      if (cfg.check_identities) checks[i] = check_exact_identities(field, cfg.seed ^ (i * 0x9E3779B97F4A7C15ULL));
      per_replicate(i, field);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  for (std::size_t c : checks) {
    tally.checks += c;
    if (c) ++tally.fields;
  }
}

ExperimentReport blank_report(const ExperimentConfig& cfg, const Prediction& p) {
  ExperimentReport r;
  r.name = cfg.name;
  r.statistic = to_string(cfg.statistic);
  r.prediction = p;
  r.predicted = p.value;
  r.discretization_margin = cfg.margin() * std::abs(p.value);
  r.seed = cfg.seed;
  return r;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const FieldSource& source) {
  cfg.validate();
  const FieldSource src = source ? source : default_source(cfg);
  ExperimentReport r = blank_report(cfg, predict_for(cfg));
  r.values.assign(cfg.replicates, 0.0);
  run_replicates(cfg, src, r.identities,
                 [&](std::size_t i, const GridField& field) { r.values[i] = compute_statistic(cfg, field); });
  summarize(r);
  return r;
}

std::vector<ExperimentReport> ec_curve_experiment(const ExperimentConfig& cfg, std::span<const double> u_list,
                                                  const FieldSource& source) {
  if (u_list.empty()) throw ConfigError("\"u_list\": must be nonempty");
  ExperimentConfig base = cfg;
  base.statistic = StatisticKind::ec_at;
  base.validate();
  const FieldSource src = source ? source : default_source(base);
  std::vector<std::vector<double>> per_u(u_list.size(), std::vector<double>(cfg.replicates, 0.0));
  IdentityTally tally;
  run_replicates(base, src, tally, [&](std::size_t i, const GridField& field) {
    const ECCurve curve = ec_curve(CubicalFiltration::lower_star(field));
    for (std::size_t k = 0; k < u_list.size(); ++k) per_u[k][i] = static_cast<double>(curve.at(u_list[k]));
  });
  std::vector<ExperimentReport> out;
  for (std::size_t k = 0; k < u_list.size(); ++k) {
    ExperimentConfig at = base;
    at.u = u_list[k];
    ExperimentReport r = blank_report(at, predict_for(at));
    std::ostringstream name;
    name << cfg.name << "[u=" << u_list[k] << "]";
    r.name = name.str();
    r.values = std::move(per_u[k]);
    r.identities = tally;
    summarize(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string replicate_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "replicate,value\n";
  for (std::size_t i = 0; i < report.values.size(); ++i) out << i << ',' << report.values[i] << '\n';
  return out.str();
}

void write_report(const ExperimentReport& report, const std::filesystem::path& json_path,
                  const std::optional<std::filesystem::path>& csv_path) {
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << nlohmann::json(report).dump(2) << '\n';
  if (csv_path) {
    std::ofstream cs(*csv_path);
    if (!cs) throw std::runtime_error("cannot write " + csv_path->string());
    cs << replicate_csv(report);
  }
}

}  // namespace eulerfield
