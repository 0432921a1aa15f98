#pragma once

// Sub-probability measures on regular grids in R^d (d <= 3).
//
// All grids share the lattice hZ^d: cell i along axis k is centred at
// (offset[k] + i) * h. Translating a measure by a lattice vector therefore only
// changes the offset and never touches the weights, which makes shifts exact
// and lets measures on different grids of the same spacing be combined
// cell by cell.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace occm {

using Index = std::int64_t;
using Coord = std::vector<double>;
using LatticeVector = std::vector<Index>;

inline constexpr double kMassTolerance = 1e-12;
inline constexpr int kMaxDim = 3;

class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(double spacing, std::vector<Index> offset, std::vector<Index> shape);

  /// Grid whose lower corner is `origin`; the corner must sit half a cell
  /// below a lattice point.
  static GridSpec from_origin(double spacing, const Coord& origin, std::vector<Index> shape);

  /// Smallest grid whose cell centres cover the box [lo, hi].
  static GridSpec covering(double spacing, const Coord& lo, const Coord& hi);

  /// Cube of cells centred on the origin with centres spanning [-half_width, half_width].
  static GridSpec centered(int dim, double spacing, double half_width);

  int dim() const { return static_cast<int>(shape_.size()); }
  double spacing() const { return spacing_; }
  const std::vector<Index>& offset() const { return offset_; }
  const std::vector<Index>& shape() const { return shape_; }
  Coord origin() const;
  Index size() const { return size_; }
  double cell_volume() const;

  /// Row-major strides (last axis contiguous).
  std::vector<Index> strides() const;
  std::vector<Index> unravel(Index flat) const;
  Index ravel(std::span<const Index> local) const;

  void center(Index flat, double* out) const;
  Coord center(Index flat) const;

  /// Local index of the cell whose centre is nearest to x (may be out of range).
  std::vector<Index> nearest_local(std::span<const double> x) const;

  bool contains_local(std::span<const Index> local) const;
  bool same_lattice(const GridSpec& other) const;
  GridSpec translated(std::span<const Index> cells) const;
  GridSpec bounding_union(const GridSpec& other) const;

  bool operator==(const GridSpec& other) const;

 private:
  double spacing_ = 1.0;
  std::vector<Index> offset_;
  std::vector<Index> shape_;
  Index size_ = 0;
};

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(GridSpec grid, std::vector<double> weights);

  static DiscreteMeasure zero(GridSpec grid);
  static DiscreteMeasure point_mass(const GridSpec& grid, std::span<const double> at, double mass = 1.0);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  int dim() const { return grid_.dim(); }

  DiscreteMeasure scaled(double c) const;

  /// Same measure on a larger grid of the same lattice.
  DiscreteMeasure embedded(const GridSpec& larger) const;

  /// Trims zero cells at the edges (grid shrinks to the support bounding box).
  DiscreteMeasure cropped() const;

 private:
  GridSpec grid_;
  std::vector<double> weights_;
};

/// Finite collection of orbits; an element of the compactified orbit space.
class Collection {
 public:
  Collection() = default;
  explicit Collection(std::vector<DiscreteMeasure> components);

  const std::vector<DiscreteMeasure>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  double total_mass() const;

 private:
  std::vector<DiscreteMeasure> components_;
};

double total_mass(const DiscreteMeasure& m);

/// Translation by a lattice vector (in cells).
DiscreteMeasure shift(const DiscreteMeasure& m, std::span<const Index> cells);

/// Translation by a coordinate vector that must be a lattice multiple.
DiscreteMeasure shift_by(const DiscreteMeasure& m, std::span<const double> a);

struct Restriction {
  DiscreteMeasure inside;
  DiscreteMeasure outside;
};

/// Split into the part whose cell centres lie in the closed Euclidean ball
/// B(center, radius) and the rest. inside + outside == m cell by cell.
Restriction restrict(const DiscreteMeasure& m, std::span<const double> center, double radius);

/// m(B(center, radius)) for the closed Euclidean ball on cell centres.
double ball_mass(const DiscreteMeasure& m, std::span<const double> center, double radius);

struct ConcentrationPeak {
  double mass = 0.0;
  Index cell = 0;  // flat index of the maximizing centre
  Coord center;
};

/// sup over cell centres x of m(box(x, radius)), box = l-infinity ball.
double concentration_function(const DiscreteMeasure& m, double radius);

/// Same as concentration_function, also reporting the lexicographically
/// smallest maximizing cell.
ConcentrationPeak concentration_peak(const DiscreteMeasure& m, double radius);

/// Box masses m(box(x, radius)) for every cell centre x.
std::vector<double> box_masses(const DiscreteMeasure& m, double radius);

struct MixtureTerm {
  double coefficient;
  std::reference_wrapper<const DiscreteMeasure> measure;
};

/// Cellwise weighted sum on the union grid. Throws MassOverflow when the
/// resulting mass exceeds 1 + kMassTolerance.
DiscreteMeasure mixture(std::span<const MixtureTerm> terms);

struct GaussianMeasure {
  DiscreteMeasure measure;
  double truncation_loss = 0.0;  // fraction of the density mass outside the grid
};

/// Isotropic Gaussian N(mean, variance * Id) sampled at cell centres and
/// normalized to `mass`. Throws GridTooSmall when more than 1% is truncated.
GaussianMeasure gaussian_measure(const GridSpec& grid, std::span<const double> mean, double variance,
                                 double mass = 1.0);

/// Uniform density on the axis-aligned box [lo, hi] (cells whose centres lie inside).
DiscreteMeasure uniform_box(const GridSpec& grid, std::span<const double> lo, std::span<const double> hi,
                            double mass = 1.0);

}  // namespace occm
