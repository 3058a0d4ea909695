#pragma once

// Target enumeration by Euler integration of an integer sensor field, and a
// bias-corrected estimator for sensor readings corrupted by Gaussian noise.
//
// A target is a closed union of grid cells given by its vertex set. The
// sensor field h counts, at each vertex, the targets covering it; cells take
// the minimum over their corners, so each target contributes its closed
// support and the Euler integral of h sums the targets' Euler
// characteristics.

#include <cstdint>
#include <string>
#include <vector>

#include "eulerfield/cubical.hpp"
#include "eulerfield/geometry.hpp"
#include "eulerfield/grf.hpp"
#include "eulerfield/montecarlo.hpp"
#include "json.hpp"

namespace eulerfield {

struct Target {
  enum class Kind { rect, disk };
  Kind kind = Kind::rect;
  /// rect: lowest vertex index per axis; disk: centre vertex.
  std::vector<long> origin;
  /// rect: number of cells spanned per axis (>= 1); disk: radius in cells
  /// (only size[0] is used).
  std::vector<long> size;

  bool covers(std::span<const long> vertex) const;
};

struct TargetScene {
  std::vector<std::size_t> extents;
  double spacing = 1.0;
  std::vector<Target> targets;
};

void to_json(nlohmann::json& j, const TargetScene& s);
void from_json(const nlohmann::json& j, TargetScene& s);

/// Vertex field counting covering targets.
GridField render_sensor_field(const TargetScene& scene);

/// Indicator of one target on the scene grid.
GridField target_indicator(const TargetScene& scene, std::size_t target);

struct SceneCheck {
  bool ok = true;
  std::string message;
};

/// A scene is valid when every target lies in the grid, covers at least one
/// cell, has Euler characteristic w, and the rendered field reproduces the
/// sum of the targets' closed supports cell by cell (no spurious cells
/// bridging two touching targets).
SceneCheck check_scene(const TargetScene& scene, long w = 1);

struct RationalCount {
  long numerator = 0;
  long denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

/// (1/w) times the Euler integral of h. Throws DomainError for w = 0 or a
/// field that is not nonnegative-integer valued.
RationalCount enumerate_targets(const GridField& h, long w = 1);

/// (Y - E[noise integral]) / w with Y the Euler integral of h plus the noise
/// field's lower-star values. `dom` must carry the noise's induced metric.
/// Throws ShapeError when the grids differ and DomainError for w = 0.
double noisy_enumerate(const GridField& h, const GridField& noise, const Domain& dom, long w = 1);

struct SceneGeneratorConfig {
  std::vector<std::size_t> extents = {32, 32};
  double spacing = 1.0;
  std::size_t min_targets = 1;
  std::size_t max_targets = 5;
  long max_size = 8;  // largest rect side or disk radius, in cells
  int max_attempts = 1000;
};

/// Valid random scene, deterministic in (seed, index). Mixes rects and disks;
/// targets may overlap or be disjoint.
TargetScene random_scene(const SceneGeneratorConfig& cfg, std::uint64_t seed, std::uint64_t index);

struct NoisyTrialConfig {
  TargetScene scene;
  Domain domain;  // physical domain matching the scene grid
  CovarianceModel cov;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  long w = 1;
  double margin = 0.15;  // absolute, in targets
  unsigned workers = 1;
};

/// Per-trial estimation errors (estimate - true count) summarized against a
/// predicted error of 0.
ExperimentReport noisy_trials(const NoisyTrialConfig& cfg);

}  // namespace eulerfield
