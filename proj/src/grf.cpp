#include "eulerfield/grf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eulerfield/errors.hpp"
#include "eulerfield/rng.hpp"

namespace eulerfield {

namespace {

constexpr double kJitter = 1e-10;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double se(double lag, double ell) { return std::exp(-0.5 * lag * lag / (ell * ell)); }

// Periodized kernel: sum of images, normalized to unit variance.
double periodic_se(double lag, double ell, double period) {
  const int images = static_cast<int>(std::ceil(9.0 * ell / period)) + 1;
  double num = 0.0;
  double den = 0.0;
  for (int m = -images; m <= images; ++m) {
    num += se(lag + m * period, ell);
    den += se(m * period, ell);
  }
  return num / den;
}

Eigen::MatrixXd box_factor(std::size_t n, double h, double ell, int axis) {
  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      k(i, j) = se((static_cast<double>(i) - static_cast<double>(j)) * h, ell);
  k.diagonal().array() += kJitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success)
    throw NumericalError("grf: Cholesky factorization failed on axis " + std::to_string(axis));
  return llt.matrixL();
}

// Symmetric square root of the circulant correlation matrix via its
// real cosine spectrum.
Eigen::MatrixXd circulant_factor(std::size_t n, double h, double ell, double period, int axis) {
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = periodic_se(static_cast<double>(k) * h, ell, period);
  std::vector<double> root_eig(n);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    double lambda = kJitter;
    for (std::size_t k = 0; k < n; ++k) lambda += c[k] * std::cos(w * static_cast<double>(m * k % n));
    if (lambda < -1e-8)
      throw NumericalError("grf: circulant factorization failed on axis " + std::to_string(axis));
    root_eig[m] = std::sqrt(std::max(lambda, 0.0));
  }
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += root_eig[m] * std::cos(w * static_cast<double>(m * k % n));
    r[k] = acc / static_cast<double>(n);
  }
  Eigen::MatrixXd s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = r[(i + n - j) % n];
  return s;
}

}  // namespace

double CovarianceModel::correlation(double lag, double period) const {
  if (kind == CovarianceKind::periodic_squared_exponential) {
    if (!(period > 0.0)) throw DomainError("covariance: periodic kernel needs a positive period");
    return periodic_se(lag, length_scale, period);
  }
  return se(lag, length_scale);
}

double induced_metric_scale(const CovarianceModel& cov) {
  if (!(cov.length_scale > 0.0)) throw DomainError("covariance: length_scale must be positive");
  return 1.0 / cov.length_scale;
}

Domain induced_domain(const Domain& physical, const CovarianceModel& cov) {
  Domain d = physical;
  d.metric_scale = 1.0 / induced_metric_scale(cov);
  return d;
}

double grid_spacing(const Domain& domain, std::span<const std::size_t> points) {
  domain.validate();
  if (domain.kind == DomainKind::sphere) throw DomainError("grf: sampling on spheres is not supported");
  if (points.size() != domain.side_lengths.size())
    throw DomainError("grf: points_per_axis must match the domain dimension");
  double h = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    if (points[a] < 2) throw DomainError("grf: need at least 2 points per axis");
    const double n = static_cast<double>(points[a]);
    const double ha = domain.kind == DomainKind::box ? domain.side_lengths[a] / (n - 1.0)
                                                     : domain.side_lengths[a] / n;
    if (a == 0) h = ha;
    else if (std::abs(ha - h) > 1e-12 * h) throw DomainError("grf: axes must share one grid spacing");
  }
  return h;
}

FieldSampler::FieldSampler(const Domain& domain, std::vector<std::size_t> points, CovarianceModel cov)
    : domain_(domain), points_(std::move(points)), cov_(cov) {
  if (!(cov_.length_scale > 0.0)) throw DomainError("covariance: length_scale must be positive");
  const bool torus = domain_.kind == DomainKind::flat_torus;
  const bool periodic_kernel = cov_.kind == CovarianceKind::periodic_squared_exponential;
  if (torus != periodic_kernel)
    throw DomainError("grf: periodic kernel is required on tori and only allowed there");
  spacing_ = grid_spacing(domain_, points_);
  if (spacing_ > cov_.length_scale / 4.0) {
    std::ostringstream msg;
    msg << "grid spacing " << spacing_ << " exceeds ell/4 = " << cov_.length_scale / 4.0;
    warnings_.push_back(msg.str());
  }
  for (std::size_t a = 0; a < points_.size(); ++a) {
    const int axis = static_cast<int>(a);
    factors_.push_back(torus ? circulant_factor(points_[a], spacing_, cov_.length_scale,
                                                domain_.side_lengths[a], axis)
                             : box_factor(points_[a], spacing_, cov_.length_scale, axis));
  }
}

GridField FieldSampler::sample(std::uint64_t seed, std::uint64_t replicate, std::uint32_t component) const {
  CounterStream rng(seed, replicate, component);
  const std::size_t n0 = points_[0];
  GridField out;
  out.extents = points_;
  out.spacing = spacing_;
  out.periodic = domain_.kind == DomainKind::flat_torus;
  if (points_.size() == 1) {
    Eigen::VectorXd z(n0);
    for (std::size_t i = 0; i < n0; ++i) z(i) = rng.normal();
    const Eigen::VectorXd f = factors_[0] * z;
    out.values.assign(f.data(), f.data() + n0);
  } else {
    const std::size_t n1 = points_[1];
    RowMajor z(n0, n1);
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) z(i, j) = rng.normal();
    const RowMajor f = factors_[0] * z * factors_[1].transpose();
    out.values.assign(f.data(), f.data() + n0 * n1);
  }
  return out;
}

GridField sample_field(const SampleSpec& spec, const CovarianceModel& cov) {
  return FieldSampler(spec.domain, spec.points_per_axis, cov).sample(spec.seed, spec.replicate_index);
}

GridField gaussian_related(std::span<const GridField> fields,
                           const std::function<double(std::span<const double>)>& g) {
  if (fields.empty()) throw ShapeError("gaussian_related: no input fields");
  for (const GridField& f : fields)
    if (!f.same_geometry(fields[0])) throw ShapeError("gaussian_related: input grids differ");
  GridField out = fields[0];
  std::vector<double> point(fields.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    for (std::size_t k = 0; k < fields.size(); ++k) point[k] = fields[k].values[i];
    out.values[i] = g(point);
  }
  return out;
}

GridField chi_square_field(std::span<const GridField> fields) {
  return gaussian_related(fields, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  });
}

void to_json(nlohmann::json& j, const CovarianceModel& c) {
  j = nlohmann::json{{"kind", c.kind == CovarianceKind::squared_exponential ? "squared_exponential"
                                                                             : "periodic_squared_exponential"},
                     {"length_scale", c.length_scale}};
}

void from_json(const nlohmann::json& j, CovarianceModel& c) {
  const std::string kind = j.value("kind", std::string("squared_exponential"));
  if (kind == "squared_exponential") c.kind = CovarianceKind::squared_exponential;
  else if (kind == "periodic_squared_exponential") c.kind = CovarianceKind::periodic_squared_exponential;
  else throw DomainError("covariance: unknown kind '" + kind + "'");
  c.length_scale = j.value("length_scale", 1.0);
  if (!(c.length_scale > 0.0)) throw DomainError("covariance: length_scale must be positive");
}

}  // namespace eulerfield
