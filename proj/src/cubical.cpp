#include "eulerfield/cubical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "eulerfield/errors.hpp"
#include "json.hpp"

namespace eulerfield {

// ---- GridField --------------------------------------------------------------

GridField::GridField(std::vector<std::size_t> ext, double h, bool per, std::vector<double> vals)
    : extents(std::move(ext)), spacing(h), periodic(per), values(std::move(vals)) {
  validate();
}

GridField GridField::line(std::vector<double> vals, double h, bool per) {
  const std::size_t n = vals.size();
  return GridField({n}, h, per, std::move(vals));
}

bool GridField::same_geometry(const GridField& other) const {
  return extents == other.extents && periodic == other.periodic && spacing == other.spacing;
}

void GridField::validate() const {
  if (extents.empty() || extents.size() > 2) throw DomainError("grid field: dimension must be 1 or 2");
  std::size_t n = 1;
  for (std::size_t e : extents) {
    if (e < 2) throw DomainError("grid field: every extent must be >= 2");
    n *= e;
  }
  if (values.size() != n) throw DomainError("grid field: value count does not match extents");
  if (!(spacing > 0.0)) throw DomainError("grid field: spacing must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("grid field: non-finite sample");
}

// ---- CubicalFiltration ------------------------------------------------------

CubicalFiltration::CubicalFiltration(std::vector<std::size_t> extents, bool periodic)
    : extents_(std::move(extents)), periodic_(periodic) {
  const std::size_t n0 = extents_[0];
  const std::size_t n1 = extents_.size() == 2 ? extents_[1] : 1;
  const std::size_t e0 = edges_along(0);
  const std::size_t e1 = extents_.size() == 2 ? edges_along(1) : 0;
  block_[0] = 0;
  block_[1] = n0 * n1;
  block_[2] = block_[1] + e0 * n1;
  block_[3] = block_[2] + n0 * e1;
  block_[4] = block_[3] + e0 * e1;
  values_.resize(block_[4]);
}

std::size_t CubicalFiltration::edges_along(int axis) const {
  return periodic_ ? extents_[axis] : extents_[axis] - 1;
}

int CubicalFiltration::cell_dim(std::size_t c) const {
  if (c < block_[1]) return 0;
  if (c < block_[3]) return 1;
  return 2;
}

CubicalFiltration::Cell CubicalFiltration::cell(std::size_t c) const {
  const std::size_t n1 = extents_.size() == 2 ? extents_[1] : 1;
  const std::size_t e1 = extents_.size() == 2 ? edges_along(1) : 0;
  Cell out;
  out.value = values_[c];
  if (c < block_[1]) {
    out.dim = 0;
    out.anchor = {c / n1, c % n1};
  } else if (c < block_[2]) {
    const std::size_t k = c - block_[1];
    out.dim = 1;
    out.axis = 0;
    out.anchor = {k / n1, k % n1};
  } else if (c < block_[3]) {
    const std::size_t k = c - block_[2];
    out.dim = 1;
    out.axis = 1;
    out.anchor = {k / e1, k % e1};
  } else {
    const std::size_t k = c - block_[3];
    out.dim = 2;
    out.anchor = {k / e1, k % e1};
  }
  return out;
}

std::array<std::size_t, 3> CubicalFiltration::cell_counts() const {
  return {block_[1], block_[3] - block_[1], block_[4] - block_[3]};
}

int CubicalFiltration::vertices(std::size_t c, std::array<std::size_t, 4>& out) const {
  const std::size_t n0 = extents_[0];
  const std::size_t n1 = extents_.size() == 2 ? extents_[1] : 1;
  const Cell cl = cell(c);
  const std::size_t i = cl.anchor[0];
  const std::size_t j = cl.anchor[1];
  const std::size_t i1 = (i + 1) % n0;
  const std::size_t j1 = n1 > 1 ? (j + 1) % n1 : 0;
  switch (cl.dim) {
    case 0:
      out[0] = c;
      return 1;
    case 1:
      out[0] = i * n1 + j;
      out[1] = cl.axis == 0 ? i1 * n1 + j : i * n1 + j1;
      return 2;
    default:
      out = {i * n1 + j, i1 * n1 + j, i * n1 + j1, i1 * n1 + j1};
      return 4;
  }
}

int CubicalFiltration::boundary(std::size_t c, std::array<std::size_t, 4>& out) const {
  const int d = cell_dim(c);
  if (d == 0) return 0;
  if (d == 1) return vertices(c, out);
  const std::size_t n0 = extents_[0];
  const std::size_t n1 = extents_[1];
  const std::size_t e1 = edges_along(1);
  const Cell cl = cell(c);
  const std::size_t i = cl.anchor[0];
  const std::size_t j = cl.anchor[1];
  out[0] = block_[1] + i * n1 + j;
  out[1] = block_[1] + i * n1 + (j + 1) % n1;
  out[2] = block_[2] + i * e1 + j;
  out[3] = block_[2] + ((i + 1) % n0) * e1 + j;
  return 4;
}

long CubicalFiltration::euler_characteristic() const {
  const auto n = cell_counts();
  return static_cast<long>(n[0]) - static_cast<long>(n[1]) + static_cast<long>(n[2]);
}

bool CubicalFiltration::is_monotone() const {
  std::array<std::size_t, 4> faces{};
  for (std::size_t c = block_[1]; c < size(); ++c) {
    const int m = boundary(c, faces);
    for (int k = 0; k < m; ++k)
      if (values_[faces[k]] > values_[c]) return false;
  }
  return true;
}

template <class Reduce>
CubicalFiltration CubicalFiltration::star(const GridField& field, Reduce reduce) {
  field.validate();
  CubicalFiltration f(field.extents, field.periodic);
  std::array<std::size_t, 4> vs{};
  for (std::size_t c = 0; c < f.size(); ++c) {
    const int m = f.vertices(c, vs);
    double v = field.values[vs[0]];
    for (int k = 1; k < m; ++k) v = reduce(v, field.values[vs[k]]);
    f.values_[c] = v;
  }
  return f;
}

CubicalFiltration CubicalFiltration::lower_star(const GridField& field) {
  return star(field, [](double a, double b) { return std::max(a, b); });
}

CubicalFiltration CubicalFiltration::upper_star(const GridField& field) {
  return star(field, [](double a, double b) { return std::min(a, b); });
}

CubicalFiltration operator+(const CubicalFiltration& a, const CubicalFiltration& b) {
  if (a.extents_ != b.extents_ || a.periodic_ != b.periodic_)
    throw ShapeError("cubical: cannot add cell functions on different complexes");
  CubicalFiltration out = a;
  for (std::size_t c = 0; c < out.size(); ++c) out.values_[c] += b.values_[c];
  return out;
}

// ---- Euler characteristic curves -------------------------------------------

long ECCurve::at(double u) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
  if (it == breakpoints.begin()) return 0;
  return chi_values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

long ECCurve::before(double u) const {
  const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), u);
  if (it == breakpoints.begin()) return 0;
  return chi_values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

ECCurve ec_curve(const CubicalFiltration& filt) {
  std::vector<std::pair<double, int>> events(filt.size());
  for (std::size_t c = 0; c < filt.size(); ++c)
    events[c] = {filt.value(c), filt.cell_dim(c) % 2 == 0 ? 1 : -1};
  std::sort(events.begin(), events.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  ECCurve curve;
  long chi = 0;
  std::size_t k = 0;
  while (k < events.size()) {
    const double v = events[k].first;
    long step = 0;
    for (; k < events.size() && events[k].first == v; ++k) step += events[k].second;
    if (step == 0) continue;
    chi += step;
    curve.breakpoints.push_back(v);
    curve.chi_values.push_back(chi);
  }
  curve.total_chi = chi;
  return curve;
}

long euler_char_at(const CubicalFiltration& filt, double u) {
  long chi = 0;
  for (std::size_t c = 0; c < filt.size(); ++c)
    if (filt.value(c) <= u) chi += filt.cell_dim(c) % 2 == 0 ? 1 : -1;
  return chi;
}

long euler_char_above(const CubicalFiltration& filt, double u) {
  return filt.euler_characteristic() - euler_char_at(filt, u);
}

// ---- file formats ----------------------------------------------------------

namespace {

std::filesystem::path with_suffix(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

void write_le_double(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  os.write(buf, 8);
}

double read_le_double(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw ConfigError("binary field: truncated file");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const GridField& field, const std::filesystem::path& stem, FieldFormat format,
                 std::uint64_t seed) {
  field.validate();
  nlohmann::json side{{"extents", field.extents},
                      {"spacing", field.spacing},
                      {"periodic", field.periodic},
                      {"format", format == FieldFormat::csv ? "csv" : "binary"},
                      {"seed", seed}};
  {
    std::ofstream js(with_suffix(stem, ".json"));
    if (!js) throw ConfigError("cannot write " + with_suffix(stem, ".json").string());
    js << side.dump(2) << '\n';
  }
  if (format == FieldFormat::csv) {
    std::ofstream os(with_suffix(stem, ".csv"));
    if (!os) throw ConfigError("cannot write " + with_suffix(stem, ".csv").string());
    os << "value\n" << std::setprecision(17);
    for (double v : field.values) os << v << '\n';
  } else {
    std::ofstream os(with_suffix(stem, ".bin"), std::ios::binary);
    if (!os) throw ConfigError("cannot write " + with_suffix(stem, ".bin").string());
    for (double v : field.values) write_le_double(os, v);
  }
}

GridField read_field(const std::filesystem::path& stem) {
  std::ifstream js(with_suffix(stem, ".json"));
  if (!js) throw ConfigError("missing field sidecar " + with_suffix(stem, ".json").string());
  const nlohmann::json side = nlohmann::json::parse(js);
  GridField field;
  field.extents = side.at("extents").get<std::vector<std::size_t>>();
  field.spacing = side.at("spacing").get<double>();
  field.periodic = side.value("periodic", false);
  const std::size_t n = std::accumulate(field.extents.begin(), field.extents.end(), std::size_t{1},
                                        std::multiplies<>());
  field.values.reserve(n);
  if (side.value("format", std::string("csv")) == "csv") {
    std::ifstream is(with_suffix(stem, ".csv"));
    if (!is) throw ConfigError("missing field data " + with_suffix(stem, ".csv").string());
    std::string line;
    std::getline(is, line);
    if (line != "value") throw ConfigError("field csv: expected header 'value'");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      field.values.push_back(std::stod(line));
    }
  } else {
    std::ifstream is(with_suffix(stem, ".bin"), std::ios::binary);
    if (!is) throw ConfigError("missing field data " + with_suffix(stem, ".bin").string());
    for (std::size_t k = 0; k < n; ++k) field.values.push_back(read_le_double(is));
  }
  field.validate();
  return field;
}

std::string ec_curve_csv(const ECCurve& curve) {
  std::ostringstream os;
  os << "u,chi\n" << std::setprecision(17);
  for (std::size_t k = 0; k < curve.breakpoints.size(); ++k)
    os << curve.breakpoints[k] << ',' << curve.chi_values[k] << '\n';
  return os.str();
}

void write_ec_curve(const ECCurve& curve, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << ec_curve_csv(curve);
}

}  // namespace eulerfield
