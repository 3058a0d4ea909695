#pragma once

// Cubical complexes over regular 1-D and 2-D grids, lower-star filtrations of
// vertex-sampled functions, and exact Euler-characteristic curves of their
// sublevel sets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eulerfield {

/// Real samples on a regular lattice, row-major with the last axis fastest.
/// A periodic field lives on a flat torus: index n along an axis is index 0.
struct GridField {
  std::vector<std::size_t> extents;
  double spacing = 1.0;
  bool periodic = false;
  std::vector<double> values;

  GridField() = default;
  GridField(std::vector<std::size_t> extents, double spacing, bool periodic, std::vector<double> values);
  static GridField line(std::vector<double> values, double spacing = 1.0, bool periodic = false);

  int dim() const { return static_cast<int>(extents.size()); }
  std::size_t size() const { return values.size(); }
  double& at(std::size_t i, std::size_t j = 0) { return values[i * stride() + j]; }
  double at(std::size_t i, std::size_t j = 0) const { return values[i * stride() + j]; }
  std::size_t stride() const { return extents.size() == 2 ? extents[1] : 1; }
  bool same_geometry(const GridField& other) const;

  /// Throws DomainError: d not in {1,2}, an extent < 2, size mismatch,
  /// non-positive spacing, or a non-finite sample.
  void validate() const;
};

/// Cells of the cubical complex of a grid, each carrying a real value.
///
/// Cells are indexed in blocks: vertices, edges along axis 0, edges along
/// axis 1 (2-D only), squares (2-D only); each block is row-major in the
/// anchor (lowest-index) vertex. For the lower-star rule each cell takes the
/// maximum of its vertex values, which makes every sublevel set a closed
/// subcomplex. Other cell functions (e.g. sums with constructible functions)
/// are allowed; `is_monotone()` tells whether the values form a filtration.
class CubicalFiltration {
 public:
  struct Cell {
    int dim = 0;
    std::array<std::size_t, 2> anchor{};
    int axis = -1;  // direction of an edge; -1 for vertices and squares
    double value = 0.0;
  };

  /// Lower-star filtration: cell value = max over its vertices.
  static CubicalFiltration lower_star(const GridField& field);
  /// Upper-star assignment: cell value = min over its vertices. For a
  /// nonnegative integer sensor field this is the closed-support
  /// constructible function (a cell is counted k times iff all its corners
  /// read at least k).
  static CubicalFiltration upper_star(const GridField& field);

  /// Cellwise sum of two cell functions on the same complex.
  friend CubicalFiltration operator+(const CubicalFiltration& a, const CubicalFiltration& b);

  std::size_t size() const { return values_.size(); }
  std::size_t vertex_count() const { return block_[1]; }
  int dim() const { return static_cast<int>(extents_.size()); }
  const std::vector<std::size_t>& extents() const { return extents_; }
  bool periodic() const { return periodic_; }

  double value(std::size_t cell) const { return values_[cell]; }
  const std::vector<double>& values() const { return values_; }
  int cell_dim(std::size_t cell) const;
  Cell cell(std::size_t index) const;

  /// Number of cells of each dimension (index = dimension).
  std::array<std::size_t, 3> cell_counts() const;

  /// Linear vertex indices of the cell's corners; returns how many were written.
  int vertices(std::size_t cell, std::array<std::size_t, 4>& out) const;
  /// Codimension-1 faces as cell indices; returns how many were written.
  int boundary(std::size_t cell, std::array<std::size_t, 4>& out) const;

  /// Alternating cell count of the whole complex.
  long euler_characteristic() const;
  /// True iff every face value is <= every coface value.
  bool is_monotone() const;

 private:
  CubicalFiltration(std::vector<std::size_t> extents, bool periodic);
  std::size_t edges_along(int axis) const;
  template <class Reduce>
  static CubicalFiltration star(const GridField& field, Reduce reduce);

  std::vector<std::size_t> extents_;
  bool periodic_ = false;
  std::array<std::size_t, 5> block_{};  // block start offsets; block_[4] == size
  std::vector<double> values_;
};

inline CubicalFiltration build_filtration(const GridField& field) {
  return CubicalFiltration::lower_star(field);
}

/// Right-continuous step function u -> chi(f <= u).
/// chi_values[i] holds on [breakpoints[i], breakpoints[i+1]); 0 below the
/// first breakpoint; the last value is chi of the whole complex.
struct ECCurve {
  std::vector<double> breakpoints;
  std::vector<long> chi_values;
  long total_chi = 0;

  long at(double u) const;
  /// chi(f <= u') for u' strictly below u.
  long before(double u) const;
};

ECCurve ec_curve(const CubicalFiltration& filt);

/// chi(f <= u) by direct alternating count of cells with value <= u.
long euler_char_at(const CubicalFiltration& filt, double u);
/// chi(f > u) under the complementation convention chi(X) - chi(f <= u).
long euler_char_above(const CubicalFiltration& filt, double u);

// ---- file formats ----------------------------------------------------------

enum class FieldFormat { csv, binary };

/// Writes `<stem>.csv` (header "value", one sample per line, row-major) or
/// `<stem>.bin` (little-endian float64), plus the `<stem>.json` sidecar with
/// extents, spacing, periodic flag and format.
void write_field(const GridField& field, const std::filesystem::path& stem,
                 FieldFormat format = FieldFormat::csv, std::uint64_t seed = 0);
GridField read_field(const std::filesystem::path& stem);

/// CSV with header "u,chi", one row per breakpoint.
void write_ec_curve(const ECCurve& curve, const std::filesystem::path& path);
std::string ec_curve_csv(const ECCurve& curve);

}  // namespace eulerfield
