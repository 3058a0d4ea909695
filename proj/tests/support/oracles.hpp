#pragma once

// Reference computations used only by tests. They rebuild cubical complexes
// from grid coordinates and never call into the library's cell indexing.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "eulerfield/cubical.hpp"

namespace oracle {

struct Cell {
  int dim = 0;
  std::vector<std::size_t> verts;  // linear vertex indices
  double max_value = 0.0;
};

// All cells of the grid complex, built from coordinates.
inline std::vector<Cell> cells_of(const eulerfield::GridField& f) {
  const std::size_t n0 = f.extents[0];
  const std::size_t n1 = f.extents.size() == 2 ? f.extents[1] : 1;
  const bool two_d = f.extents.size() == 2;
  auto id = [&](std::size_t i, std::size_t j) { return (i % n0) * n1 + (j % n1); };
  const std::size_t e0 = f.periodic ? n0 : n0 - 1;
  const std::size_t e1 = two_d ? (f.periodic ? n1 : n1 - 1) : 0;
  std::vector<Cell> out;
  auto push = [&](int dim, std::vector<std::size_t> v) {
    double m = -1e300;
    for (auto x : v) m = std::max(m, f.values[x]);
    out.push_back({dim, std::move(v), m});
  };
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) push(0, {id(i, j)});
  for (std::size_t i = 0; i < e0; ++i)
    for (std::size_t j = 0; j < n1; ++j) push(1, {id(i, j), id(i + 1, j)});
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < e1; ++j) push(1, {id(i, j), id(i, j + 1)});
  for (std::size_t i = 0; i < e0; ++i)
    for (std::size_t j = 0; j < e1; ++j) push(2, {id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)});
  return out;
}

// chi(f <= u) by counting cells whose vertices all lie at or below u.
inline long chi_at(const eulerfield::GridField& f, double u) {
  long chi = 0;
  for (const Cell& c : cells_of(f))
    if (c.max_value <= u) chi += c.dim % 2 ? -1 : 1;
  return chi;
}

// Rank over Z/2 of a 0/1 matrix given as rows of bit vectors.
inline std::size_t rank_z2(std::vector<std::vector<std::uint8_t>> rows) {
  std::size_t rank = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && !rows[piv][col]) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][col])
        for (std::size_t k = col; k < ncols; ++k) rows[r][k] ^= rows[rank][k];
    ++rank;
  }
  return rank;
}

struct Betti {
  long b0 = 0;
  long b1 = 0;
  long b2 = 0;
};

// Betti numbers of the sublevel complex {f <= u} from boundary-matrix ranks.
inline Betti betti_at(const eulerfield::GridField& f, double u) {
  std::vector<Cell> all = cells_of(f);
  std::vector<std::vector<const Cell*>> by_dim(3);
  for (const Cell& c : all)
    if (c.max_value <= u) by_dim[c.dim].push_back(&c);
  // Faces are identified by their sorted vertex sets.
  std::map<std::vector<std::size_t>, std::size_t> index[3];
  for (int d = 0; d < 3; ++d)
    for (std::size_t k = 0; k < by_dim[d].size(); ++k) {
      auto v = by_dim[d][k]->verts;
      std::sort(v.begin(), v.end());
      index[d][v] = k;
    }
  auto boundary_rank = [&](int d) -> std::size_t {
    if (by_dim[d].empty() || by_dim[d - 1].empty()) return 0;
    std::vector<std::vector<std::uint8_t>> rows(by_dim[d].size(),
                                                std::vector<std::uint8_t>(by_dim[d - 1].size(), 0));
    for (std::size_t k = 0; k < by_dim[d].size(); ++k) {
      const auto& v = by_dim[d][k]->verts;
      std::vector<std::vector<std::size_t>> faces;
      if (d == 1) faces = {{v[0]}, {v[1]}};
      else faces = {{v[0], v[1]}, {v[2], v[3]}, {v[0], v[2]}, {v[1], v[3]}};
      for (auto face : faces) {
        std::sort(face.begin(), face.end());
        rows[k][index[d - 1].at(face)] ^= 1;
      }
    }
    return rank_z2(rows);
  };
  const long r1 = static_cast<long>(boundary_rank(1));
  const long r2 = static_cast<long>(boundary_rank(2));
  Betti b;
  b.b0 = static_cast<long>(by_dim[0].size()) - r1;
  b.b1 = static_cast<long>(by_dim[1].size()) - r1 - r2;
  b.b2 = static_cast<long>(by_dim[2].size()) - r2;
  return b;
}

// Field of i.i.d. draws from std::mt19937_64, independent of the library RNG.
inline eulerfield::GridField random_field(std::vector<std::size_t> extents, std::uint64_t seed,
                                          bool periodic = false, int levels = 0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> level(0, std::max(levels - 1, 0));
  std::size_t n = 1;
  for (auto e : extents) n *= e;
  std::vector<double> v(n);
  for (auto& x : v) x = levels > 0 ? static_cast<double>(level(gen)) : normal(gen);
  return eulerfield::GridField(std::move(extents), 1.0, periodic, std::move(v));
}

}  // namespace oracle
