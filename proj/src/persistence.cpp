#include "eulerfield/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "eulerfield/errors.hpp"

namespace eulerfield {

long Barcode::signed_count(double u) const {
  long n = 0;
  for (const Bar& b : bars)
    if (b.birth <= u && u < b.death) n += b.degree % 2 == 0 ? 1 : -1;
  return n;
}

std::vector<Bar> Barcode::of_degree(int degree) const {
  std::vector<Bar> out;
  for (const Bar& b : bars)
    if (b.degree == degree) out.push_back(b);
  std::sort(out.begin(), out.end(), [](const Bar& x, const Bar& y) {
    return x.birth != y.birth ? x.birth < y.birth : x.death < y.death;
  });
  return out;
}

std::size_t Barcode::infinite_count(int degree) const {
  return static_cast<std::size_t>(std::count_if(bars.begin(), bars.end(), [degree](const Bar& b) {
    return b.degree == degree && b.infinite();
  }));
}

namespace {

using Column = std::vector<std::uint32_t>;

// a ^= b over Z/2 for sorted index lists.
void add_column(Column& a, const Column& b, Column& scratch) {
  scratch.clear();
  scratch.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(scratch));
  a.swap(scratch);
}

}  // namespace

Barcode sublevel_persistence(const CubicalFiltration& filt) {
  if (!filt.is_monotone()) throw DomainError("persistence: cell values are not a filtration");
  const std::size_t n = filt.size();

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    const double vx = filt.value(x), vy = filt.value(y);
    if (vx != vy) return vx < vy;
    const int dx = filt.cell_dim(x), dy = filt.cell_dim(y);
    if (dx != dy) return dx < dy;
    return x < y;
  });
  std::vector<std::uint32_t> position(n);
  for (std::uint32_t p = 0; p < n; ++p) position[order[p]] = p;

  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> pivot_column(n, kNone);  // row position -> column position
  std::vector<Column> reduced(n);
  std::vector<bool> paired(n, false);
  Column col, scratch;
  std::array<std::size_t, 4> faces{};
  Barcode out;

  for (std::uint32_t p = 0; p < n; ++p) {
    const std::size_t cell = order[p];
    const int m = filt.boundary(cell, faces);
    col.clear();
    for (int k = 0; k < m; ++k) col.push_back(position[faces[k]]);
    std::sort(col.begin(), col.end());
    // Repeated faces cancel over Z/2.
    Column dedup;
    for (std::size_t k = 0; k < col.size();) {
      std::size_t r = k;
      while (r < col.size() && col[r] == col[k]) ++r;
      if ((r - k) % 2 == 1) dedup.push_back(col[k]);
      k = r;
    }
    col.swap(dedup);

    while (!col.empty() && pivot_column[col.back()] != kNone)
      add_column(col, reduced[pivot_column[col.back()]], scratch);

    if (!col.empty()) {
      const std::uint32_t low = col.back();
      pivot_column[low] = p;
      paired[low] = true;
      paired[p] = true;
      const double birth = filt.value(order[low]);
      const double death = filt.value(cell);
      if (death > birth) out.bars.push_back({filt.cell_dim(order[low]), birth, death});
      reduced[p] = col;
    }
  }
  for (std::uint32_t p = 0; p < n; ++p)
    if (!paired[p]) out.bars.push_back({filt.cell_dim(order[p]), filt.value(order[p]), kInfiniteDeath});
  return out;
}

Barcode zeroth_persistence_union_find(const CubicalFiltration& filt) {
  if (!filt.is_monotone()) throw DomainError("persistence: cell values are not a filtration");
  const std::size_t nv = filt.vertex_count();

  // Birth rank of each vertex: position in (value, index) order.
  std::vector<std::size_t> by_value(nv);
  std::iota(by_value.begin(), by_value.end(), std::size_t{0});
  std::stable_sort(by_value.begin(), by_value.end(),
                   [&](std::size_t x, std::size_t y) { return filt.value(x) < filt.value(y); });
  std::vector<std::size_t> rank(nv);
  for (std::size_t r = 0; r < nv; ++r) rank[by_value[r]] = r;

  std::vector<std::size_t> edges;
  for (std::size_t c = nv; c < filt.size(); ++c)
    if (filt.cell_dim(c) == 1) edges.push_back(c);
  std::stable_sort(edges.begin(), edges.end(),
                   [&](std::size_t x, std::size_t y) { return filt.value(x) < filt.value(y); });

  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  // Each root is the oldest vertex of its component.
  auto find = [&parent](std::size_t x) {
    std::size_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const std::size_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  };

  Barcode out;
  std::array<std::size_t, 4> vs{};
  for (std::size_t e : edges) {
    filt.vertices(e, vs);
    std::size_t a = find(vs[0]);
    std::size_t b = find(vs[1]);
    if (a == b) continue;
    if (rank[a] > rank[b]) std::swap(a, b);  // a is elder
    const double birth = filt.value(b);
    const double death = filt.value(e);
    if (death > birth) out.bars.push_back({0, birth, death});
    parent[b] = a;
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (find(v) == v) out.bars.push_back({0, filt.value(v), kInfiniteDeath});
  return out;
}

double barcode_euler_char(const Barcode& barcode, double a) {
  double sum = 0.0;
  for (const Bar& b : barcode.bars) {
    if (b.birth >= a) continue;
    const double length = std::min(b.death, a) - b.birth;
    sum += b.degree % 2 == 0 ? length : -length;
  }
  return sum;
}

EulerPoincareCheck verify_euler_poincare(const CubicalFiltration& filt, const Barcode& barcode) {
  const ECCurve curve = ec_curve(filt);
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * barcode.bars.size());
  for (const Bar& b : barcode.bars) {
    const int s = b.degree % 2 == 0 ? 1 : -1;
    events.emplace_back(b.birth, s);
    if (!b.infinite()) events.emplace_back(b.death, -s);
  }
  std::sort(events.begin(), events.end());

  EulerPoincareCheck out;
  long count = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < curve.breakpoints.size(); ++i) {
    const double u = curve.breakpoints[i];
    for (; k < events.size() && events[k].first <= u; ++k) count += events[k].second;
    if (count != curve.chi_values[i]) {
      out.ok = false;
      out.first_failure = u;
      std::ostringstream msg;
      msg << std::setprecision(17) << "signed bar count " << count << " != chi(f <= u) "
          << curve.chi_values[i] << " at u = " << u;
      out.diagnostic = msg.str();
      return out;
    }
  }
  return out;
}

std::string barcode_csv(const Barcode& barcode) {
  std::ostringstream os;
  os << "degree,birth,death\n" << std::setprecision(17);
  for (const Bar& b : barcode.bars) {
    os << b.degree << ',' << b.birth << ',';
    if (b.infinite()) os << "inf"; else os << b.death;
    os << '\n';
  }
  return os.str();
}

void write_barcode(const Barcode& barcode, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << barcode_csv(barcode);
}

Barcode parse_barcode_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (line != "degree,birth,death") throw ConfigError("barcode csv: unexpected header");
  Barcode out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string d, b, e;
    std::getline(row, d, ',');
    std::getline(row, b, ',');
    std::getline(row, e, ',');
    out.bars.push_back({std::stoi(d), std::stod(b), e == "inf" ? kInfiniteDeath : std::stod(e)});
  }
  return out;
}

}  // namespace eulerfield
