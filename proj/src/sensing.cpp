#include "eulerfield/sensing.hpp"

#include <cmath>
#include <sstream>

#include "eulerfield/errors.hpp"
#include "eulerfield/euler_calc.hpp"
#include "eulerfield/predict.hpp"
#include "eulerfield/rng.hpp"

namespace eulerfield {

namespace {

std::size_t cols(const TargetScene& s) { return s.extents.size() == 2 ? s.extents[1] : 1; }

GridField blank(const TargetScene& s) {
  std::size_t n = 1;
  for (std::size_t e : s.extents) n *= e;
  return GridField(s.extents, s.spacing, false, std::vector<double>(n, 0.0));
}

long chi_of_cells(const CubicalFiltration& cells) {
  long chi = 0;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (cells.value(c) != 0.0) chi += (cells.cell_dim(c) % 2 ? -1 : 1) * std::lround(cells.value(c));
  return chi;
}

}  // namespace

bool Target::covers(std::span<const long> v) const {
  if (kind == Kind::rect) {
    for (std::size_t a = 0; a < v.size(); ++a)
      if (v[a] < origin[a] || v[a] > origin[a] + size[a]) return false;
    return true;
  }
  long r2 = 0;
  for (std::size_t a = 0; a < v.size(); ++a) r2 += (v[a] - origin[a]) * (v[a] - origin[a]);
  return r2 <= size[0] * size[0];
}

void to_json(nlohmann::json& j, const TargetScene& s) {
  nlohmann::json targets = nlohmann::json::array();
  for (const Target& t : s.targets) {
    nlohmann::json size = t.kind == Target::Kind::disk ? nlohmann::json(t.size[0]) : nlohmann::json(t.size);
    targets.push_back({{"kind", t.kind == Target::Kind::rect ? "rect" : "disk"}, {"origin", t.origin}, {"size", size}});
  }
  j = nlohmann::json{{"grid", {{"extents", s.extents}, {"spacing", s.spacing}}}, {"targets", targets}};
}

void from_json(const nlohmann::json& j, TargetScene& s) {
  if (!j.contains("grid")) throw ConfigError("\"grid\": missing");
  try {
    j.at("grid").at("extents").get_to(s.extents);
    s.spacing = j.at("grid").value("spacing", 1.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("\"grid\": ") + e.what());
  }
  if (s.extents.empty() || s.extents.size() > 2) throw ConfigError("\"extents\": dimension must be 1 or 2");
  s.targets.clear();
  for (const auto& t : j.value("targets", nlohmann::json::array())) {
    Target tg;
    const std::string kind = t.value("kind", std::string("rect"));
    if (kind == "rect") tg.kind = Target::Kind::rect;
    else if (kind == "disk") tg.kind = Target::Kind::disk;
    else throw ConfigError("\"kind\": unknown target kind '" + kind + "'");
    try {
      t.at("origin").get_to(tg.origin);
      const auto& sz = t.at("size");
      tg.size = sz.is_array() ? sz.get<std::vector<long>>() : std::vector<long>{sz.get<long>()};
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("\"targets\": ") + e.what());
    }
    if (tg.origin.size() != s.extents.size()) throw ConfigError("\"origin\": needs one index per grid axis");
    if (tg.kind == Target::Kind::rect && tg.size.size() == 1 && s.extents.size() == 2)
      tg.size.push_back(tg.size[0]);
    if (tg.kind == Target::Kind::rect && tg.size.size() != s.extents.size())
      throw ConfigError("\"size\": needs one entry per grid axis");
    s.targets.push_back(std::move(tg));
  }
}

GridField target_indicator(const TargetScene& scene, std::size_t t) {
  GridField out = blank(scene);
  const std::size_t n1 = cols(scene);
  std::vector<long> v(scene.extents.size());
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    v[0] = static_cast<long>(k / n1);
    if (v.size() == 2) v[1] = static_cast<long>(k % n1);
    if (scene.targets[t].covers(v)) out.values[k] = 1.0;
  }
  return out;
}

GridField render_sensor_field(const TargetScene& scene) {
  GridField h = blank(scene);
  for (std::size_t t = 0; t < scene.targets.size(); ++t) {
    const GridField ind = target_indicator(scene, t);
    for (std::size_t k = 0; k < h.values.size(); ++k) h.values[k] += ind.values[k];
  }
  return h;
}

SceneCheck check_scene(const TargetScene& scene, long w) {
  auto fail = [](std::string m) { return SceneCheck{false, std::move(m)}; };
  for (std::size_t t = 0; t < scene.targets.size(); ++t) {
    const Target& tg = scene.targets[t];
    const std::string name = "target " + std::to_string(t);
    for (std::size_t a = 0; a < scene.extents.size(); ++a) {
      const long lo = tg.kind == Target::Kind::rect ? tg.origin[a] : tg.origin[a] - tg.size[0];
      const long hi = tg.kind == Target::Kind::rect ? tg.origin[a] + tg.size[a] : tg.origin[a] + tg.size[0];
      if (lo < 0 || hi >= static_cast<long>(scene.extents[a])) return fail(name + " leaves the grid");
    }
    for (long s : tg.size)
      if (s < 1) return fail(name + " must span at least one cell");
    const auto cells = CubicalFiltration::upper_star(target_indicator(scene, t));
    const long chi = chi_of_cells(cells);
    if (chi != w) return fail(name + " has Euler characteristic " + std::to_string(chi));
  }
  const auto rendered = CubicalFiltration::upper_star(render_sensor_field(scene));
  std::vector<double> summed(rendered.size(), 0.0);
  for (std::size_t t = 0; t < scene.targets.size(); ++t) {
    const auto cells = CubicalFiltration::upper_star(target_indicator(scene, t));
    for (std::size_t c = 0; c < cells.size(); ++c) summed[c] += cells.value(c);
  }
  for (std::size_t c = 0; c < rendered.size(); ++c)
    if (rendered.value(c) != summed[c])
      return fail("cell " + std::to_string(c) + " is covered only by touching targets");
  return {};
}

RationalCount enumerate_targets(const GridField& h, long w) {
  if (w == 0) throw DomainError("enumerate_targets: w must be nonzero");
  for (double v : h.values)
    if (v < 0.0 || v != std::floor(v)) throw DomainError("enumerate_targets: sensor field must be a nonnegative integer");
  const double y = upper_integral(ec_curve(CubicalFiltration::upper_star(h)));
  RationalCount out{std::lround(y), w};
  if (out.denominator < 0) {
    out.numerator = -out.numerator;
    out.denominator = -out.denominator;
  }
  return out;
}

double noisy_enumerate(const GridField& h, const GridField& noise, const Domain& dom, long w) {
  if (w == 0) throw DomainError("noisy_enumerate: w must be nonzero");
  if (!h.same_geometry(noise)) throw ShapeError("noisy_enumerate: sensor and noise grids differ");
  const auto cells = CubicalFiltration::upper_star(h) + CubicalFiltration::lower_star(noise);
  const double y = upper_integral(ec_curve(cells));
  return (y - expected_signed_sum(dom).value) / static_cast<double>(w);
}

TargetScene random_scene(const SceneGeneratorConfig& cfg, std::uint64_t seed, std::uint64_t index) {
  CounterStream rng(seed, index, 11);
  auto below = [&](long n) { return static_cast<long>(rng.uniform() * static_cast<double>(n)); };
  const long span = static_cast<long>(cfg.max_targets - cfg.min_targets + 1);
  const std::size_t count = cfg.min_targets + static_cast<std::size_t>(below(span));
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    TargetScene scene{cfg.extents, cfg.spacing, {}};
    for (std::size_t t = 0; t < count; ++t) {
      Target tg;
      tg.kind = cfg.extents.size() == 2 && rng.uniform() < 0.4 ? Target::Kind::disk : Target::Kind::rect;
      if (tg.kind == Target::Kind::disk) {
        const long r = 1 + below(cfg.max_size);
        tg.size = {r};
        for (std::size_t e : cfg.extents) tg.origin.push_back(r + below(static_cast<long>(e) - 2 * r));
      } else {
        for (std::size_t e : cfg.extents) {
          const long s = 1 + below(cfg.max_size);
          tg.size.push_back(s);
          tg.origin.push_back(below(static_cast<long>(e) - s));
        }
      }
      scene.targets.push_back(std::move(tg));
    }
    if (check_scene(scene).ok) return scene;
  }
  throw DomainError("random_scene: no valid scene within the attempt budget");
}

ExperimentReport noisy_trials(const NoisyTrialConfig& cfg) {
  const SceneCheck check = check_scene(cfg.scene, cfg.w);
  if (!check.ok) throw DomainError("noisy_trials: invalid scene: " + check.message);
  const GridField h = render_sensor_field(cfg.scene);
  const double truth = static_cast<double>(cfg.scene.targets.size());
  std::vector<std::size_t> points = cfg.scene.extents;
  const FieldSampler sampler(cfg.domain, points, cfg.cov);
  if (std::abs(sampler.spacing() - h.spacing) > 1e-12 * h.spacing)
    throw ShapeError("noisy_trials: scene spacing does not match the noise grid");
  const Domain metric = induced_domain(cfg.domain, cfg.cov);

  ExperimentReport r;
  r.name = "noisy_enumeration";
  r.statistic = "estimate_minus_truth";
  r.prediction = expected_signed_sum(metric);
  r.predicted = 0.0;
  r.discretization_margin = cfg.margin;
  r.seed = cfg.seed;
  r.values.assign(cfg.trials, 0.0);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    try {
      GridField noise = sampler.sample(cfg.seed, i);
      noise.spacing = h.spacing;
      r.values[i] = noisy_enumerate(h, noise, metric, cfg.w) - truth;
    } catch (const std::exception& e) {
      throw std::runtime_error("trial " + std::to_string(i) + ": " + e.what());
    }
  });
  summarize(r);
  return r;
}

}  // namespace eulerfield
