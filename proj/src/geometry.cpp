#include "eulerfield/geometry.hpp"

#include <cmath>
#include <numbers>

#include "eulerfield/errors.hpp"

namespace eulerfield {

Domain Domain::box(std::vector<double> sides, double ell) {
  Domain d;
  d.kind = DomainKind::box;
  d.side_lengths = std::move(sides);
  d.metric_scale = ell;
  d.validate();
  return d;
}

Domain Domain::torus(std::vector<double> sides, double ell) {
  Domain d;
  d.kind = DomainKind::flat_torus;
  d.side_lengths = std::move(sides);
  d.metric_scale = ell;
  d.validate();
  return d;
}

Domain Domain::sphere(double radius, double ell) {
  Domain d;
  d.kind = DomainKind::sphere;
  d.radius = radius;
  d.metric_scale = ell;
  d.validate();
  return d;
}

int Domain::dim() const {
  return kind == DomainKind::sphere ? 2 : static_cast<int>(side_lengths.size());
}

void Domain::validate() const {
  if (!(metric_scale > 0.0) || !std::isfinite(metric_scale))
    throw DomainError("domain: metric_scale must be positive");
  switch (kind) {
    case DomainKind::box:
    case DomainKind::flat_torus:
      if (side_lengths.empty() || side_lengths.size() > 2)
        throw DomainError("domain: box/torus must have dimension 1 or 2");
      for (double s : side_lengths)
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("domain: side lengths must be positive");
      break;
    case DomainKind::sphere:
      if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("domain: radius must be positive");
      if (!side_lengths.empty()) throw DomainError("domain: sphere takes no side lengths");
      break;
  }
}

LKCurvatures lk_curvatures(const Domain& domain) {
  domain.validate();
  const double ell = domain.metric_scale;
  const int d = domain.dim();
  LKCurvatures out;
  out.values.assign(d + 1, 0.0);
  switch (domain.kind) {
    case DomainKind::box: {
      // Elementary symmetric polynomials of the rescaled sides.
      std::vector<double>& e = out.values;
      e[0] = 1.0;
      for (double side : domain.side_lengths) {
        const double t = side / ell;
        for (int j = d; j >= 1; --j) e[j] += e[j - 1] * t;
      }
      break;
    }
    case DomainKind::flat_torus: {
      double volume = 1.0;
      for (double side : domain.side_lengths) volume *= side / ell;
      out.values[d] = volume;
      break;
    }
    case DomainKind::sphere: {
      const double r = domain.radius / ell;
      out.values = {2.0, 0.0, 4.0 * std::numbers::pi * r * r};
      break;
    }
  }
  return out;
}

int euler_characteristic(const Domain& domain) {
  return static_cast<int>(std::lround(lk_curvatures(domain)[0]));
}

double unit_ball_volume(int n) {
  if (n < 0) throw DomainError("unit_ball_volume: n must be >= 0");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double flag_coefficient(int n, int k) {
  if (k < 0 || k > n) throw DomainError("flag_coefficient: requires 0 <= k <= n");
  const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  return std::round(binom) * unit_ball_volume(n) / (unit_ball_volume(k) * unit_ball_volume(n - k));
}

double tube_volume_box2d(std::array<double, 2> sides, double r) {
  if (r < 0.0) throw DomainError("tube_volume_box2d: radius must be >= 0");
  const LKCurvatures lk = lk_curvatures(Domain::box({sides[0], sides[1]}, 1.0));
  double total = 0.0;
  for (int j = 0; j <= 2; ++j) total += unit_ball_volume(j) * lk[2 - j] * std::pow(r, j);
  return total;
}

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::box: return "box";
    case DomainKind::flat_torus: return "flat_torus";
    case DomainKind::sphere: return "sphere";
  }
  return "?";
}

void to_json(nlohmann::json& j, const Domain& d) {
  j = nlohmann::json{{"kind", to_string(d.kind)},
                     {"side_lengths", d.side_lengths},
                     {"radius", d.radius},
                     {"metric_scale", d.metric_scale}};
}

void from_json(const nlohmann::json& j, Domain& d) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box") d.kind = DomainKind::box;
  else if (kind == "flat_torus" || kind == "torus") d.kind = DomainKind::flat_torus;
  else if (kind == "sphere") d.kind = DomainKind::sphere;
  else throw DomainError("domain: unknown kind '" + kind + "'");
  d.side_lengths = j.value("side_lengths", std::vector<double>{});
  d.radius = j.value("radius", 0.0);
  d.metric_scale = j.value("metric_scale", 1.0);
  d.validate();
}

}  // namespace eulerfield
