#pragma once

// Sublevel-set persistent homology of cubical filtrations (Z/2 coefficients)
// and the Euler characteristic of a barcode.

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eulerfield/cubical.hpp"

namespace eulerfield {

inline constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

struct Bar {
  int degree = 0;
  double birth = 0.0;
  double death = kInfiniteDeath;

  bool infinite() const { return death == kInfiniteDeath; }
  friend bool operator==(const Bar&, const Bar&) = default;
};

struct Barcode {
  std::vector<Bar> bars;

  /// Signed count of bars alive at u: sum over bars with birth <= u < death
  /// of (-1)^degree.
  long signed_count(double u) const;
  /// Bars of the given degree sorted by (birth, death).
  std::vector<Bar> of_degree(int degree) const;
  std::size_t infinite_count(int degree) const;
};

/// Standard column reduction of the boundary matrix, cells ordered by
/// (value, dimension, index). Zero-length bars are dropped.
/// Throws DomainError if the cell values are not a filtration.
Barcode sublevel_persistence(const CubicalFiltration& filt);

/// Degree-0 bars by union-find with the elder rule. Shares no code with the
/// matrix reduction.
Barcode zeroth_persistence_union_find(const CubicalFiltration& filt);

/// Sum over bars of (-1)^degree * length after truncating at a: bars born at
/// or after a are dropped and deaths (including infinite ones) clip to a.
double barcode_euler_char(const Barcode& barcode, double a);

struct EulerPoincareCheck {
  bool ok = true;
  std::optional<double> first_failure;
  std::string diagnostic;
};

/// Compares the signed bar count with chi(f <= u) at every breakpoint of the
/// filtration's EC curve.
EulerPoincareCheck verify_euler_poincare(const CubicalFiltration& filt, const Barcode& barcode);

/// CSV with header "degree,birth,death"; infinite deaths print as "inf".
std::string barcode_csv(const Barcode& barcode);
void write_barcode(const Barcode& barcode, const std::filesystem::path& path);
Barcode parse_barcode_csv(const std::string& text);

}  // namespace eulerfield
