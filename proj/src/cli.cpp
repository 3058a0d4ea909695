#include "eulerfield/cli.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "eulerfield/cubical.hpp"
#include "eulerfield/errors.hpp"
#include "eulerfield/euler_calc.hpp"
#include "eulerfield/geometry.hpp"
#include "eulerfield/grf.hpp"
#include "eulerfield/montecarlo.hpp"
#include "eulerfield/persistence.hpp"
#include "eulerfield/predict.hpp"
#include "eulerfield/sensing.hpp"

namespace fs = std::filesystem;

namespace eulerfield::cli {

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;
  std::string field;  // integrate / persist input
};

// A configuration problem anchored to a file and, when known, a line.
struct AnchoredError {
  std::string file;
  int line = 0;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AnchoredError{path, 0, "cannot open configuration file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Key named at the start of an error message: either quoted ("key": ...) or
// a bare identifier followed by a colon (key: ...).
std::string leading_key(const std::string& msg) {
  if (msg.size() >= 2 && msg[0] == '"') {
    const auto end = msg.find('"', 1);
    return end == std::string::npos ? std::string{} : msg.substr(1, end - 1);
  }
  const auto colon = msg.find(':');
  if (colon == std::string::npos || colon == 0) return {};
  const std::string key = msg.substr(0, colon);
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return {};
  return key;
}

struct LoadedConfig {
  std::string path;
  std::string text;
  nlohmann::json json;
};

LoadedConfig load(const std::string& path) {
  if (path.empty()) throw AnchoredError{"<none>", 0, "--config is required"};
  LoadedConfig c{path, read_text(path), {}};
  try {
    c.json = parse_config_text(c.text);
  } catch (const ConfigError& e) {
    throw AnchoredError{path, e.line(), e.what()};
  }
  return c;
}

// Runs `fn`, turning configuration errors into errors anchored in `cfg`.
template <class Fn>
auto anchored(const LoadedConfig& cfg, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw AnchoredError{cfg.path, e.line() ? e.line() : line_of_key(cfg.text, leading_key(e.what())), e.what()};
  } catch (const DomainError& e) {
    throw AnchoredError{cfg.path, line_of_key(cfg.text, leading_key(e.what())), e.what()};
  } catch (const nlohmann::json::exception& e) {
    throw AnchoredError{cfg.path, 0, e.what()};
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw AnchoredError{dir.string(), 0, "output directory is not writable"};
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void log(const Options& o, const std::string& msg) {
  if (o.verbose) std::cerr << msg << '\n';
}

fs::path field_stem(const std::string& arg) {
  fs::path p(arg);
  const auto ext = p.extension();
  if (ext == ".csv" || ext == ".bin" || ext == ".json") p.replace_extension();
  return p;
}

std::uint64_t sidecar_seed(const fs::path& stem) {
  std::ifstream in(fs::path(stem.string() + ".json"));
  if (!in) return 0;
  try {
    return nlohmann::json::parse(in).value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception&) {
    return 0;
  }
}

GridField load_field(const std::string& arg) {
  if (arg.empty()) throw AnchoredError{"<none>", 0, "a field path is required"};
  try {
    return read_field(field_stem(arg));
  } catch (const std::exception& e) {
    throw AnchoredError{arg, 0, e.what()};
  }
}

// ---- subcommands --------------------------------------------------------------

int cmd_simulate(const Options& o) {
  const LoadedConfig cfg = load(o.config);
  struct Sim {
    Domain domain;
    CovarianceModel cov;
    std::vector<std::size_t> points;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    FieldFormat format = FieldFormat::csv;
  };
  const Sim sim = anchored(cfg, [&] {
    const auto& j = cfg.json;
    Sim s;
    if (!j.contains("domain")) throw ConfigError("\"domain\": missing");
    s.domain = j.at("domain").get<Domain>();
    if (j.contains("covariance")) s.cov = j.at("covariance").get<CovarianceModel>();
    else if (s.domain.kind == DomainKind::flat_torus) s.cov.kind = CovarianceKind::periodic_squared_exponential;
    if (!j.contains("points_per_axis")) throw ConfigError("\"points_per_axis\": missing");
    s.points = j.at("points_per_axis").get<std::vector<std::size_t>>();
    s.count = j.value("count", std::size_t{1});
    s.seed = resolve_seed(o.seed, j.value("seed", std::uint64_t{0}));
    const std::string fmt = j.value("format", std::string("csv"));
    if (fmt == "bin" || fmt == "binary") s.format = FieldFormat::binary;
    else if (fmt != "csv") throw ConfigError("\"format\": expected csv or bin");
    grid_spacing(s.domain, s.points);
    return s;
  });
  const FieldSampler sampler = anchored(cfg, [&] { return FieldSampler(sim.domain, sim.points, sim.cov); });
  for (const auto& w : sampler.warnings()) std::cerr << "warning: " << w << '\n';
  ensure_dir(o.out);
  for (std::size_t i = 0; i < sim.count; ++i) {
    const fs::path stem = fs::path(o.out) / ("field_" + std::to_string(i));
    write_field(sampler.sample(sim.seed, i), stem, sim.format, sim.seed);
    log(o, "wrote " + stem.string());
  }
  std::cout << nlohmann::json{{"fields", sim.count}, {"seed", sim.seed}, {"out", o.out}}.dump() << '\n';
  return kExitOk;
}

int cmd_integrate(const Options& o) {
  const GridField f = load_field(o.field);
  const auto filt = CubicalFiltration::lower_star(f);
  const ECCurve curve = ec_curve(filt);
  GridField neg = f;
  for (double& v : neg.values) v = -v;
  const ECCurve curve_neg = ec_curve(CubicalFiltration::lower_star(neg));
  check_upper_integral_forms(curve);
  nlohmann::json report = integrals_report(curve, curve_neg);
  report["euler_characteristic"] = curve.total_chi;
  report["seed"] = o.seed ? *o.seed : sidecar_seed(field_stem(o.field));
  ensure_dir(o.out);
  write_ec_curve(curve, fs::path(o.out) / "ec_curve.csv");
  write_json(fs::path(o.out) / "integrals.json", report);
  std::cout << nlohmann::json{{"upper_integral", report["upper_integral"]},
                              {"lower_integral", report["lower_integral"]},
                              {"seed", report["seed"]}}
                   .dump()
            << '\n';
  return kExitOk;
}

int cmd_persist(const Options& o) {
  const GridField f = load_field(o.field);
  const auto filt = CubicalFiltration::lower_star(f);
  const Barcode bars = sublevel_persistence(filt);
  const auto ep = verify_euler_poincare(filt, bars);
  ensure_dir(o.out);
  write_barcode(bars, fs::path(o.out) / "barcode.csv");
  const std::uint64_t seed = o.seed ? *o.seed : sidecar_seed(field_stem(o.field));
  std::cout << nlohmann::json{{"bars", bars.bars.size()}, {"euler_poincare", ep.ok}, {"seed", seed}}.dump() << '\n';
  return ep.ok ? kExitOk : kExitCheckFailed;
}

int cmd_predict(const Options& o) {
  const LoadedConfig cfg = load(o.config);
  const Prediction p = anchored(cfg, [&] {
    const auto& j = cfg.json;
    if (!j.contains("formula")) throw ConfigError("\"formula\": missing");
    const FormulaId id = formula_from_string(j.at("formula").get<std::string>());
    if (!j.contains("domain")) throw ConfigError("\"domain\": missing");
    Domain dom = j.at("domain").get<Domain>();
    if (j.contains("covariance")) dom = induced_domain(dom, j.at("covariance").get<CovarianceModel>());
    const double a = j.value("a", 0.0);
    switch (id) {
      case FormulaId::gkf_ec: return expected_ec_sublevel(dom, j.value("u", 0.0));
      case FormulaId::thm_general: {
        const auto mink = j.value("mink_integrals", std::vector<double>{});
        return expected_upper_integral_general(dom, j.value("mean_g", 0.0), mink);
      }
      case FormulaId::thm_real:
      case FormulaId::cor_monotone: {
        if (!j.contains("transform")) throw ConfigError("\"transform\": missing");
        const auto& t = j.at("transform");
        const std::string m = t.value("monotonicity", std::string("none"));
        const Monotonicity mono = m == "increasing"   ? Monotonicity::increasing
                                  : m == "decreasing" ? Monotonicity::decreasing
                                                      : Monotonicity::none;
        return expected_upper_integral_real(
            dom, PiecewiseC2Function::polynomial(t.at("poly").get<std::vector<double>>(), mono));
      }
      case FormulaId::thm_chi2: return expected_chi2_integral(dom, j.value("k", 1));
      case FormulaId::thm_signed_sum: return expected_signed_sum(dom);
      case FormulaId::thm_signed_sum_level: return expected_signed_sum_below(dom, a);
      case FormulaId::lemma_Ga: return expected_truncated_integral(dom, a);
      case FormulaId::thm_barcode_ec_level: return expected_barcode_ec(dom, a);
      case FormulaId::thm_barcode_ec_max: {
        if (!j.contains("expected_fmax")) throw ConfigError("\"expected_fmax\": missing");
        return expected_barcode_ec_max(dom, j.at("expected_fmax").get<double>());
      }
    }
    throw ConfigError("\"formula\": unsupported");
  });
  nlohmann::json out = p;
  out["seed"] = resolve_seed(o.seed, cfg.json.value("seed", std::uint64_t{0}));
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

struct SuiteResult {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

SuiteResult record(const Options& o, const ExperimentReport& r) {
  const fs::path base = fs::path(o.out) / r.name;
  write_report(r, base.string() + ".json", fs::path(base.string() + ".csv"));
  std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << ": mean " << r.empirical_mean << " predicted "
            << r.predicted << " se " << r.std_error << '\n';
  return {r.name, r.pass, nlohmann::json(r)};
}

NoisyTrialConfig noisy_config(const nlohmann::json& j, const Options& o) {
  NoisyTrialConfig n;
  if (!j.contains("scene")) throw ConfigError("\"scene\": missing");
  n.scene = j.at("scene").get<TargetScene>();
  if (!j.contains("domain")) throw ConfigError("\"domain\": missing");
  n.domain = j.at("domain").get<Domain>();
  if (j.contains("covariance")) n.cov = j.at("covariance").get<CovarianceModel>();
  n.trials = j.value("trials", std::size_t{500});
  n.seed = resolve_seed(o.seed, j.value("seed", std::uint64_t{0}));
  n.w = j.value("w", 1L);
  n.margin = j.value("margin", 0.15);
  n.workers = o.workers;
  const double h = grid_spacing(n.domain, n.scene.extents);
  if (std::abs(h - n.scene.spacing) > 1e-12 * h) throw ConfigError("\"spacing\": scene spacing must match the domain grid");
  return n;
}

struct ExactEnumeration {
  std::size_t scenes = 0;
  std::size_t exact = 0;
  std::uint64_t seed = 0;
};

ExactEnumeration exact_enumeration(const nlohmann::json& j, const Options& o) {
  SceneGeneratorConfig g;
  g.extents = j.value("extents", g.extents);
  g.min_targets = j.value("min_targets", g.min_targets);
  g.max_targets = j.value("max_targets", g.max_targets);
  g.max_size = j.value("max_size", g.max_size);
  ExactEnumeration e;
  e.scenes = j.value("scenes", std::size_t{200});
  e.seed = resolve_seed(o.seed, j.value("seed", std::uint64_t{0}));
  for (std::size_t i = 0; i < e.scenes; ++i) {
    const TargetScene s = random_scene(g, e.seed, i);
    const RationalCount c = enumerate_targets(render_sensor_field(s));
    if (c.denominator == 1 && c.numerator == static_cast<long>(s.targets.size())) ++e.exact;
  }
  return e;
}

int cmd_validate(const Options& o) {
  const LoadedConfig cfg = load(o.config);
  struct Planned {
    ExperimentConfig exp;
    std::vector<double> u_list;
  };
  std::vector<Planned> plans;
  std::vector<NoisyTrialConfig> noisy;
  std::optional<nlohmann::json> exact;
  anchored(cfg, [&] {
    const auto& j = cfg.json;
    for (const auto& e : j.value("experiments", nlohmann::json::array())) {
      Planned p;
      p.exp = e.get<ExperimentConfig>();
      p.exp.seed = resolve_seed(o.seed, p.exp.seed);
      p.exp.workers = o.workers;
      p.u_list = e.value("u_list", std::vector<double>{});
      plans.push_back(std::move(p));
    }
    for (const auto& s : j.value("sensing", nlohmann::json::array())) noisy.push_back(noisy_config(s, o));
    if (j.contains("enumeration")) exact = j.at("enumeration");
    return 0;
  });
  ensure_dir(o.out);
  std::vector<SuiteResult> results;
  for (const auto& p : plans) {
    log(o, "running " + p.exp.name);
    if (p.u_list.empty()) results.push_back(record(o, run_experiment(p.exp)));
    else
      for (const auto& r : ec_curve_experiment(p.exp, p.u_list)) results.push_back(record(o, r));
  }
  for (const auto& n : noisy) results.push_back(record(o, noisy_trials(n)));
  if (exact) {
    const ExactEnumeration e = exact_enumeration(*exact, o);
    const bool ok = e.exact == e.scenes;
    std::cerr << (ok ? "PASS " : "FAIL ") << "exact_enumeration: " << e.exact << "/" << e.scenes << '\n';
    results.push_back({"exact_enumeration", ok, {{"scenes", e.scenes}, {"exact", e.exact}, {"seed", e.seed}}});
  }
  bool all = true;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    summary.push_back({{"name", r.name}, {"pass", r.pass}});
  }
  write_json(fs::path(o.out) / "summary.json", {{"pass", all}, {"results", summary}});
  std::cout << nlohmann::json{{"pass", all}, {"checks", results.size()}}.dump() << '\n';
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_enumerate(const Options& o) {
  const LoadedConfig cfg = load(o.config);
  ensure_dir(o.out);
  nlohmann::json out;
  bool ok = true;
  std::optional<NoisyTrialConfig> noisy;
  std::optional<TargetScene> scene;
  std::optional<nlohmann::json> random;
  anchored(cfg, [&] {
    const auto& j = cfg.json;
    if (j.contains("scene")) scene = j.at("scene").get<TargetScene>();
    if (j.contains("random")) random = j.at("random");
    if (j.contains("noise")) {
      nlohmann::json n = j.at("noise");
      n["scene"] = j.at("scene");
      noisy = noisy_config(n, o);
    }
    if (!scene && !random) throw ConfigError("\"scene\": expected a scene or a random block");
    if (scene) {
      const SceneCheck c = check_scene(*scene);
      if (!c.ok) throw ConfigError("\"targets\": " + c.message);
    }
    return 0;
  });
  if (scene) {
    const RationalCount c = enumerate_targets(render_sensor_field(*scene));
    out["count"] = {{"numerator", c.numerator}, {"denominator", c.denominator}, {"value", c.value()}};
    out["targets"] = scene->targets.size();
  }
  if (random) {
    const ExactEnumeration e = exact_enumeration(*random, o);
    out["random"] = {{"scenes", e.scenes}, {"exact", e.exact}, {"seed", e.seed}};
    ok = ok && e.exact == e.scenes;
  }
  if (noisy) {
    const ExperimentReport r = noisy_trials(*noisy);
    write_report(r, fs::path(o.out) / "noisy_enumeration.json", fs::path(o.out) / "noisy_enumeration.csv");
    out["noisy"] = r;
    ok = ok && r.pass;
  }
  out["seed"] = resolve_seed(o.seed, cfg.json.value("seed", std::uint64_t{0}));
  write_json(fs::path(o.out) / "enumeration.json", out);
  std::cout << out.dump(2) << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

nlohmann::json parse_config_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(e.what(), line);
  }
}

int line_of_key(const std::string& text, const std::string& key) {
  if (key.empty()) return 0;
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t from_config) {
  if (flag) return *flag;
  if (const char* env = std::getenv("EULERFIELD_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("EULERFIELD_SEED is not an unsigned integer");
    }
  }
  return from_config;
}

int run(int argc, char** argv) {
  CLI::App app{"Euler integrals, EC curves and barcodes of random fields on grids"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed_value = 0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON configuration file");
    if (needs_config) c->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", seed_value, "seed override");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", o.verbose, "progress on stderr");
  };
  auto* simulate = app.add_subcommand("simulate", "sample Gaussian fields and write them");
  add_common(simulate, true);
  auto* integrate = app.add_subcommand("integrate", "EC curve and Euler integrals of a field");
  add_common(integrate, false);
  integrate->add_option("field", o.field, "field path (stem, .csv, .bin or .json)")->required();
  auto* persist = app.add_subcommand("persist", "sublevel barcode of a field");
  add_common(persist, false);
  persist->add_option("field", o.field, "field path (stem, .csv, .bin or .json)")->required();
  auto* predict = app.add_subcommand("predict", "closed-form prediction as JSON");
  add_common(predict, true);
  auto* validate = app.add_subcommand("validate", "run an experiment suite");
  add_common(validate, true);
  auto* enumerate = app.add_subcommand("enumerate", "count targets in sensor scenes");
  add_common(enumerate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : {simulate, integrate, persist, predict, validate, enumerate})
    if (sub->parsed() && sub->count("--seed")) o.seed = seed_value;

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (integrate->parsed()) return cmd_integrate(o);
    if (persist->parsed()) return cmd_persist(o);
    if (predict->parsed()) return cmd_predict(o);
    if (validate->parsed()) return cmd_validate(o);
    if (enumerate->parsed()) return cmd_enumerate(o);
  } catch (const AnchoredError& e) {
    std::cerr << e.file;
    if (e.line > 0) std::cerr << ':' << e.line;
    std::cerr << ": " << e.message << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfig;
}

}  // namespace eulerfield::cli
