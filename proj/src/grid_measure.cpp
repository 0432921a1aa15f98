#include "occm/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "occm/error.hpp"
#include "occm/kernels.hpp"

namespace occm {

namespace {

constexpr double kLatticeTolerance = 1e-9;

Index lattice_index(double x, double h) {
  const double q = x / h;
  const double r = std::round(q);
  require(std::abs(q - r) <= kLatticeTolerance * std::max(1.0, std::abs(q)), ErrorCode::InvalidArgument,
          "coordinate " + std::to_string(x) + " is not a multiple of the grid spacing");
  return static_cast<Index>(r);
}

// Invokes fn(first_flat_index) for every line of the grid running along `axis`.
template <class Fn>
void for_each_line(const GridSpec& g, int axis, Fn&& fn) {
  const auto strides = g.strides();
  const Index stride = strides[axis];
  const Index block = stride * g.shape()[axis];
  for (Index outer = 0; outer < g.size(); outer += block) {
    for (Index inner = 0; inner < stride; ++inner) fn(outer + inner);
  }
}

// Replaces each entry of every line along `axis` by the sum over the window
// [i - k, i + k] clipped to the line.
void window_sum_axis(const GridSpec& g, int axis, Index k, std::vector<double>& v) {
  const Index n = g.shape()[axis];
  const Index stride = g.strides()[axis];
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1);
  for_each_line(g, axis, [&](Index first) {
    prefix[0] = 0.0;
    for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[first + i * stride];
    for (Index i = 0; i < n; ++i) {
      const Index lo = std::max<Index>(0, i - k);
      const Index hi = std::min<Index>(n, i + k + 1);
      v[first + i * stride] = prefix[hi] - prefix[lo];
    }
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(double spacing, std::vector<Index> offset, std::vector<Index> shape)
    : spacing_(spacing), offset_(std::move(offset)), shape_(std::move(shape)) {
  require(spacing_ > 0.0 && std::isfinite(spacing_), ErrorCode::InvalidArgument, "grid spacing must be > 0");
  require(!shape_.empty() && static_cast<int>(shape_.size()) <= kMaxDim, ErrorCode::InvalidArgument,
          "grid dimension must be 1, 2 or 3");
  require(offset_.size() == shape_.size(), ErrorCode::InvalidArgument, "offset and shape lengths differ");
  size_ = 1;
  for (Index n : shape_) {
    require(n >= 1, ErrorCode::InvalidArgument, "grid shape entries must be >= 1");
    size_ *= n;
  }
}

GridSpec GridSpec::from_origin(double spacing, const Coord& origin, std::vector<Index> shape) {
  require(spacing > 0.0, ErrorCode::InvalidArgument, "grid spacing must be > 0");
  std::vector<Index> offset(origin.size());
  for (std::size_t k = 0; k < origin.size(); ++k) offset[k] = lattice_index(origin[k] + 0.5 * spacing, spacing);
  return GridSpec(spacing, std::move(offset), std::move(shape));
}

GridSpec GridSpec::covering(double spacing, const Coord& lo, const Coord& hi) {
  require(lo.size() == hi.size(), ErrorCode::DimensionMismatch, "box corners differ in dimension");
  std::vector<Index> offset(lo.size()), shape(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    const Index a = static_cast<Index>(std::floor(lo[k] / spacing + 0.5));
    const Index b = static_cast<Index>(std::floor(hi[k] / spacing + 0.5));
    offset[k] = std::min(a, b);
    shape[k] = std::abs(b - a) + 1;
  }
  return GridSpec(spacing, std::move(offset), std::move(shape));
}

GridSpec GridSpec::centered(int dim, double spacing, double half_width) {
  const Index n = static_cast<Index>(std::floor(half_width / spacing + 1e-9));
  return GridSpec(spacing, std::vector<Index>(dim, -n), std::vector<Index>(dim, 2 * n + 1));
}

Coord GridSpec::origin() const {
  Coord o(shape_.size());
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = (static_cast<double>(offset_[k]) - 0.5) * spacing_;
  return o;
}

double GridSpec::cell_volume() const { return std::pow(spacing_, dim()); }

std::vector<Index> GridSpec::strides() const {
  std::vector<Index> s(shape_.size(), 1);
  for (int k = dim() - 2; k >= 0; --k) s[k] = s[k + 1] * shape_[k + 1];
  return s;
}

std::vector<Index> GridSpec::unravel(Index flat) const {
  std::vector<Index> local(shape_.size());
  for (int k = dim() - 1; k >= 0; --k) {
    local[k] = flat % shape_[k];
    flat /= shape_[k];
  }
  return local;
}

Index GridSpec::ravel(std::span<const Index> local) const {
  Index flat = 0;
  for (int k = 0; k < dim(); ++k) flat = flat * shape_[k] + local[k];
  return flat;
}

void GridSpec::center(Index flat, double* out) const {
  for (int k = dim() - 1; k >= 0; --k) {
    out[k] = static_cast<double>(offset_[k] + flat % shape_[k]) * spacing_;
    flat /= shape_[k];
  }
}

Coord GridSpec::center(Index flat) const {
  Coord c(shape_.size());
  center(flat, c.data());
  return c;
}

std::vector<Index> GridSpec::nearest_local(std::span<const double> x) const {
  std::vector<Index> local(shape_.size());
  for (int k = 0; k < dim(); ++k) {
    local[k] = static_cast<Index>(std::floor(x[k] / spacing_ + 0.5)) - offset_[k];
  }
  return local;
}

bool GridSpec::contains_local(std::span<const Index> local) const {
  for (int k = 0; k < dim(); ++k) {
    if (local[k] < 0 || local[k] >= shape_[k]) return false;
  }
  return true;
}

bool GridSpec::same_lattice(const GridSpec& other) const {
  return dim() == other.dim() && std::abs(spacing_ - other.spacing_) <= 1e-12 * spacing_;
}

GridSpec GridSpec::translated(std::span<const Index> cells) const {
  require(static_cast<int>(cells.size()) == dim(), ErrorCode::DimensionMismatch, "shift dimension differs from grid");
  std::vector<Index> off = offset_;
  for (int k = 0; k < dim(); ++k) off[k] += cells[k];
  return GridSpec(spacing_, std::move(off), shape_);
}

GridSpec GridSpec::bounding_union(const GridSpec& other) const {
  require(same_lattice(other), ErrorCode::DimensionMismatch, "grids do not share a lattice");
  std::vector<Index> off(shape_.size()), shp(shape_.size());
  for (int k = 0; k < dim(); ++k) {
    const Index lo = std::min(offset_[k], other.offset_[k]);
    const Index hi = std::max(offset_[k] + shape_[k], other.offset_[k] + other.shape_[k]);
    off[k] = lo;
    shp[k] = hi - lo;
  }
  return GridSpec(spacing_, std::move(off), std::move(shp));
}

bool GridSpec::operator==(const GridSpec& other) const {
  return spacing_ == other.spacing_ && offset_ == other.offset_ && shape_ == other.shape_;
}

// ---------------------------------------------------------------------------
// DiscreteMeasure / Collection

DiscreteMeasure::DiscreteMeasure(GridSpec grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  require(static_cast<Index>(weights_.size()) == grid_.size(), ErrorCode::InvalidArgument,
          "weight count does not match grid shape");
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
  }
  const double mass = kernels::sum(weights_);
  require(mass <= 1.0 + kMassTolerance, ErrorCode::MassOverflow, "total mass " + std::to_string(mass) + " exceeds 1");
}

DiscreteMeasure DiscreteMeasure::zero(GridSpec grid) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  return DiscreteMeasure(std::move(grid), std::move(w));
}

DiscreteMeasure DiscreteMeasure::point_mass(const GridSpec& grid, std::span<const double> at, double mass) {
  require(static_cast<int>(at.size()) == grid.dim(), ErrorCode::DimensionMismatch, "point dimension differs from grid");
  const auto local = grid.nearest_local(at);
  require(grid.contains_local(local), ErrorCode::GridTooSmall, "point lies outside the grid");
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  w[grid.ravel(local)] = mass;
  return DiscreteMeasure(grid, std::move(w));
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  require(c >= 0.0, ErrorCode::InvalidArgument, "scale factor must be nonnegative");
  std::vector<double> w(weights_);
  for (double& x : w) x *= c;
  return DiscreteMeasure(grid_, std::move(w));
}

DiscreteMeasure DiscreteMeasure::embedded(const GridSpec& larger) const {
  require(grid_.same_lattice(larger), ErrorCode::DimensionMismatch, "grids do not share a lattice");
  if (larger == grid_) return *this;
  std::vector<double> w(static_cast<std::size_t>(larger.size()), 0.0);
  std::vector<Index> local(grid_.dim());
  for (Index i = 0; i < grid_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const auto src = grid_.unravel(i);
    for (int k = 0; k < grid_.dim(); ++k) local[k] = src[k] + grid_.offset()[k] - larger.offset()[k];
    require(larger.contains_local(local), ErrorCode::GridTooSmall, "target grid does not contain the support");
    w[larger.ravel(local)] = weights_[i];
  }
  return DiscreteMeasure(larger, std::move(w));
}

DiscreteMeasure DiscreteMeasure::cropped() const {
  const int d = grid_.dim();
  std::vector<Index> lo(d, std::numeric_limits<Index>::max()), hi(d, std::numeric_limits<Index>::min());
  bool any = false;
  for (Index i = 0; i < grid_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    any = true;
    const auto local = grid_.unravel(i);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], local[k]);
      hi[k] = std::max(hi[k], local[k]);
    }
  }
  if (!any) {
    return DiscreteMeasure::zero(GridSpec(grid_.spacing(), grid_.offset(), std::vector<Index>(d, 1)));
  }
  std::vector<Index> off(d), shp(d);
  for (int k = 0; k < d; ++k) {
    off[k] = grid_.offset()[k] + lo[k];
    shp[k] = hi[k] - lo[k] + 1;
  }
  GridSpec g(grid_.spacing(), std::move(off), std::move(shp));
  std::vector<double> w(static_cast<std::size_t>(g.size()), 0.0);
  std::vector<Index> local(d);
  for (Index i = 0; i < grid_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const auto src = grid_.unravel(i);
    for (int k = 0; k < d; ++k) local[k] = src[k] - lo[k];
    w[g.ravel(local)] = weights_[i];
  }
  return DiscreteMeasure(std::move(g), std::move(w));
}

Collection::Collection(std::vector<DiscreteMeasure> components) : components_(std::move(components)) {
  for (std::size_t i = 1; i < components_.size(); ++i) {
    require(components_[i].dim() == components_[0].dim(), ErrorCode::DimensionMismatch,
            "collection components differ in dimension");
  }
  require(total_mass() <= 1.0 + kMassTolerance, ErrorCode::MassOverflow, "collection mass exceeds 1");
}

double Collection::total_mass() const {
  double m = 0.0;
  for (const auto& c : components_) m += occm::total_mass(c);
  return m;
}

// ---------------------------------------------------------------------------
// Operations

double total_mass(const DiscreteMeasure& m) { return kernels::sum(m.weights()); }

DiscreteMeasure shift(const DiscreteMeasure& m, std::span<const Index> cells) {
  return DiscreteMeasure(m.grid().translated(cells), std::vector<double>(m.weights().begin(), m.weights().end()));
}

DiscreteMeasure shift_by(const DiscreteMeasure& m, std::span<const double> a) {
  require(static_cast<int>(a.size()) == m.dim(), ErrorCode::DimensionMismatch, "shift dimension differs from grid");
  LatticeVector cells(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) cells[k] = lattice_index(a[k], m.grid().spacing());
  return shift(m, cells);
}

namespace {

// Visits cells whose centre lies in the closed ball; fn(flat_index).
template <class Fn>
void for_each_in_ball(const GridSpec& g, std::span<const double> center, double radius, Fn&& fn) {
  const int d = g.dim();
  const double h = g.spacing();
  const double r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
  std::vector<Index> lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = std::max<Index>(0, static_cast<Index>(std::ceil((center[k] - radius) / h - 1e-9)) - g.offset()[k]);
    hi[k] = std::min<Index>(g.shape()[k] - 1,
                            static_cast<Index>(std::floor((center[k] + radius) / h + 1e-9)) - g.offset()[k]);
    if (hi[k] < lo[k]) return;
  }
  std::vector<Index> local(lo);
  while (true) {
    double dist2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double x = static_cast<double>(g.offset()[k] + local[k]) * h - center[k];
      dist2 += x * x;
    }
    if (dist2 <= r2) fn(g.ravel(local));
    int k = d - 1;
    while (k >= 0 && ++local[k] > hi[k]) {
      local[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }
}

}  // namespace

Restriction restrict(const DiscreteMeasure& m, std::span<const double> center, double radius) {
  require(radius >= 0.0, ErrorCode::InvalidArgument, "radius must be nonnegative");
  require(static_cast<int>(center.size()) == m.dim(), ErrorCode::DimensionMismatch, "center dimension differs");
  std::vector<double> inside(m.weights().size(), 0.0);
  std::vector<double> outside(m.weights().begin(), m.weights().end());
  for_each_in_ball(m.grid(), center, radius, [&](Index i) {
    inside[i] = outside[i];
    outside[i] = 0.0;
  });
  return {DiscreteMeasure(m.grid(), std::move(inside)), DiscreteMeasure(m.grid(), std::move(outside))};
}

double ball_mass(const DiscreteMeasure& m, std::span<const double> center, double radius) {
  require(radius >= 0.0, ErrorCode::InvalidArgument, "radius must be nonnegative");
  double s = 0.0;
  const auto w = m.weights();
  for_each_in_ball(m.grid(), center, radius, [&](Index i) { s += w[i]; });
  return s;
}

std::vector<double> box_masses(const DiscreteMeasure& m, double radius) {
  require(radius >= 0.0, ErrorCode::InvalidArgument, "radius must be nonnegative");
  const auto& g = m.grid();
  const Index k = static_cast<Index>(std::floor(radius / g.spacing() + 1e-9));
  std::vector<double> v(m.weights().begin(), m.weights().end());
  for (int axis = 0; axis < g.dim(); ++axis) window_sum_axis(g, axis, k, v);
  for (double& x : v) x = std::max(0.0, x);
  return v;
}

ConcentrationPeak concentration_peak(const DiscreteMeasure& m, double radius) {
  const auto boxes = box_masses(m, radius);
  ConcentrationPeak peak;
  peak.mass = -1.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i] > peak.mass) {
      peak.mass = boxes[i];
      peak.cell = static_cast<Index>(i);
    }
  }
  peak.mass = std::min(peak.mass, total_mass(m));
  peak.center = m.grid().center(peak.cell);
  return peak;
}

double concentration_function(const DiscreteMeasure& m, double radius) {
  return concentration_peak(m, radius).mass;
}

DiscreteMeasure mixture(std::span<const MixtureTerm> terms) {
  require(!terms.empty(), ErrorCode::InvalidArgument, "mixture needs at least one term");
  GridSpec g = terms[0].measure.get().grid();
  double mass = 0.0;
  for (const auto& t : terms) {
    require(t.coefficient >= 0.0, ErrorCode::InvalidArgument, "mixture coefficients must be nonnegative");
    g = g.bounding_union(t.measure.get().grid());
    mass += t.coefficient * total_mass(t.measure.get());
  }
  require(mass <= 1.0 + kMassTolerance, ErrorCode::MassOverflow,
          "mixture mass " + std::to_string(mass) + " exceeds 1");
  std::vector<double> w(static_cast<std::size_t>(g.size()), 0.0);
  const int d = g.dim();
  std::vector<Index> local(d);
  for (const auto& t : terms) {
    const auto& src = t.measure.get();
    const auto& sg = src.grid();
    const auto sw = src.weights();
    for (Index i = 0; i < sg.size(); ++i) {
      if (sw[i] == 0.0) continue;
      const auto sl = sg.unravel(i);
      for (int k = 0; k < d; ++k) local[k] = sl[k] + sg.offset()[k] - g.offset()[k];
      w[g.ravel(local)] += t.coefficient * sw[i];
    }
  }
  // Rounding in long sums may push the cellwise total a hair above the
  // bound checked on coefficients; rescale in that case only.
  const double got = kernels::sum(w);
  if (got > 1.0 + kMassTolerance) {
    for (double& x : w) x /= got;
  }
  return DiscreteMeasure(std::move(g), std::move(w));
}

GaussianMeasure gaussian_measure(const GridSpec& grid, std::span<const double> mean, double variance, double mass) {
  require(variance > 0.0, ErrorCode::InvalidArgument, "variance must be > 0");
  require(mass >= 0.0 && mass <= 1.0 + kMassTolerance, ErrorCode::MassOverflow, "requested mass outside [0, 1]");
  require(static_cast<int>(mean.size()) == grid.dim(), ErrorCode::DimensionMismatch, "mean dimension differs");
  const int d = grid.dim();
  const double norm = grid.cell_volume() / std::pow(2.0 * M_PI * variance, 0.5 * d);
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  double x[kMaxDim];
  for (Index i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) r2 += (x[k] - mean[k]) * (x[k] - mean[k]);
    w[i] = norm * std::exp(-0.5 * r2 / variance);
  }
  const double captured = kernels::sum(w);
  const double loss = std::max(0.0, 1.0 - captured);
  require(loss <= 0.01, ErrorCode::GridTooSmall,
          "grid truncates " + std::to_string(100.0 * loss) + "% of the Gaussian mass");
  const double scale = mass / captured;
  for (double& v : w) v *= scale;
  return {DiscreteMeasure(grid, std::move(w)), loss};
}

DiscreteMeasure uniform_box(const GridSpec& grid, std::span<const double> lo, std::span<const double> hi, double mass) {
  const int d = grid.dim();
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  double x[kMaxDim];
  Index count = 0;
  for (Index i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    bool in = true;
    for (int k = 0; k < d; ++k) in = in && x[k] >= lo[k] - 1e-12 && x[k] <= hi[k] + 1e-12;
    if (in) {
      w[i] = 1.0;
      ++count;
    }
  }
  require(count > 0, ErrorCode::GridTooSmall, "box contains no cell centres");
  for (double& v : w) v *= mass / static_cast<double>(count);
  return DiscreteMeasure(grid, std::move(w));
}

}  // namespace occm
