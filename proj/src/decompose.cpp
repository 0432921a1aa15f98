#include "occm/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "occm/error.hpp"

namespace occm {

void PeelParams::validate() const {
  require(probe_radius > 0.0, ErrorCode::InvalidArgument, "probe_radius must be > 0");
  require(dust_threshold > 0.0 && dust_threshold < 1.0, ErrorCode::InvalidArgument, "dust_threshold must be in (0, 1)");
  require(annulus_gap > 0.0 && annulus_gap < 1.0, ErrorCode::InvalidArgument, "annulus_gap must be in (0, 1)");
  require(max_components >= 1, ErrorCode::InvalidArgument, "max_components must be >= 1");
  require(growth_factor > 1.0, ErrorCode::InvalidArgument, "growth_factor must be > 1");
}

Collection Decomposition::collection() const {
  std::vector<DiscreteMeasure> parts;
  parts.reserve(components.size());
  for (const auto& c : components) parts.push_back(c.measure);
  return Collection(std::move(parts));
}

bool Decomposition::any_warning() const {
  return std::any_of(components.begin(), components.end(), [](const auto& c) { return c.no_gap_found; });
}

namespace {

double farthest_distance(const GridSpec& g, const Coord& x) {
  double s = 0.0;
  for (int k = 0; k < g.dim(); ++k) {
    const double lo = static_cast<double>(g.offset()[k]) * g.spacing();
    const double hi = static_cast<double>(g.offset()[k] + g.shape()[k] - 1) * g.spacing();
    const double d = std::max(std::abs(x[k] - lo), std::abs(hi - x[k]));
    s += d * d;
  }
  return std::sqrt(s);
}

LatticeVector lattice_of(const GridSpec& g, Index flat) {
  auto local = g.unravel(flat);
  for (int k = 0; k < g.dim(); ++k) local[k] += g.offset()[k];
  return local;
}

}  // namespace

Decomposition peel(const DiscreteMeasure& m, const PeelParams& p) {
  p.validate();
  Decomposition dec;
  DiscreteMeasure rest = m;
  const double g = p.growth_factor;
  while (static_cast<int>(dec.components.size()) < p.max_components) {
    if (total_mass(rest) < p.dust_threshold) break;
    const auto peak = concentration_peak(rest, p.probe_radius);
    if (peak.mass < p.dust_threshold) break;

    const Coord& a = peak.center;
    const double far = farthest_distance(rest.grid(), a);
    double radius = p.probe_radius;
    bool found = false;
    double inner = ball_mass(rest, a, radius);
    while (radius <= far) {
      const double outer = ball_mass(rest, a, radius * g);
      if (outer - inner < p.annulus_gap * inner) {
        found = true;
        break;
      }
      radius *= g;
      inner = outer;
    }
    if (!found) radius = std::max(radius, far);

    auto split = restrict(rest, a, radius);
    PeeledComponent comp;
    comp.center = a;
    comp.radius_used = radius;
    comp.no_gap_found = !found;
    auto back = lattice_of(rest.grid(), peak.cell);
    for (auto& v : back) v = -v;
    comp.measure = shift(split.inside.cropped(), back);
    comp.mass = total_mass(comp.measure);
    dec.components.push_back(std::move(comp));
    rest = std::move(split.outside);
  }
  std::stable_sort(dec.components.begin(), dec.components.end(),
                   [](const auto& x, const auto& y) { return x.mass > y.mass; });
  dec.dust = std::move(rest);

  const std::size_t n = dec.components.size();
  dec.separation.assign(n, std::vector<double>(n, 0.0));
  std::vector<DiscreteMeasure> placed;
  placed.reserve(n);
  for (const auto& c : dec.components) placed.push_back(shift_by(c.measure, c.center));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dec.separation[i][j] = dec.separation[j][i] = support_distance(placed[i], placed[j]);
    }
  }
  return dec;
}

DiscreteMeasure reassemble(const Decomposition& dec, const GridSpec& grid) {
  const auto dust = dec.dust.embedded(grid);
  std::vector<double> w(dust.weights().begin(), dust.weights().end());
  for (const auto& c : dec.components) {
    const auto placed = shift_by(c.measure, c.center).embedded(grid);
    const auto pw = placed.weights();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += pw[i];
  }
  return DiscreteMeasure(grid, std::move(w));
}

double support_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "measures differ in dimension");
  const int d = a.dim();
  auto support = [d](const DiscreteMeasure& m) {
    std::vector<double> pts;
    double x[kMaxDim];
    for (Index i = 0; i < m.grid().size(); ++i) {
      if (m.weights()[i] == 0.0) continue;
      m.grid().center(i, x);
      pts.insert(pts.end(), x, x + d);
    }
    return pts;
  };
  const auto pa = support(a);
  const auto pb = support(b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pa.size(); i += d) {
    for (std::size_t j = 0; j < pb.size(); j += d) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += (pa[i + k] - pb[j + k]) * (pa[i + k] - pb[j + k]);
      best = std::min(best, s);
    }
  }
  return std::sqrt(best);
}

std::vector<double> disintegration_score(const DiscreteMeasure& m, const std::vector<double>& radii) {
  require(!radii.empty(), ErrorCode::InvalidArgument, "radii must be nonempty");
  std::vector<double> q;
  q.reserve(radii.size());
  for (double r : radii) {
    require(r > 0.0, ErrorCode::InvalidArgument, "radii must be positive");
    q.push_back(concentration_function(m, r));
  }
  return q;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "sequences differ in length");
  const std::size_t n = x.size();
  long conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i];
      const double dy = y[j] - y[i];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tx;
      } else if (dy == 0.0) {
        ++ty;
      } else if ((dx > 0) == (dy > 0)) {
        ++conc;
      } else {
        ++disc;
      }
    }
  }
  const double denom = std::sqrt(static_cast<double>(conc + disc + tx) * static_cast<double>(conc + disc + ty));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(conc - disc) / denom;
}

DisintegrationReport equivalence_check_disintegration(const std::vector<DiscreteMeasure>& seq,
                                                      const PairKernel& kernel, const TestFunctionSpec& f,
                                                      double probe_radius) {
  require(!seq.empty(), ErrorCode::InvalidArgument, "sequence must be nonempty");
  validate(kernel);
  const PairKernel alt = GaussianKernel{1.0};
  DisintegrationReport rep;
  rep.probe_radius = probe_radius;
  for (const auto& m : seq) {
    rep.pair_energy.push_back(pair_energy(kernel, m));
    rep.concentration.push_back(concentration_function(m, probe_radius));
    const auto phi = potential_field(kernel, m);
    rep.max_potential.push_back(*std::max_element(phi.begin(), phi.end()));
    rep.alt_pair_energy.push_back(pair_energy(alt, m));
    rep.lambda.push_back(lambda_measure(f, m));
  }
  std::vector<double> index(seq.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
  const std::vector<const std::vector<double>*> all = {&rep.pair_energy, &rep.concentration, &rep.max_potential,
                                                       &rep.alt_pair_energy, &rep.lambda};
  for (const auto* s : all) rep.trend_tau.push_back(kendall_tau(*s, index));
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      rep.min_pairwise_tau = std::min(rep.min_pairwise_tau, kendall_tau(*all[i], *all[j]));
    }
  }
  return rep;
}

double wide_separation_score(const DiscreteMeasure& a, const DiscreteMeasure& b, const PairKernel& kernel) {
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "measures differ in dimension");
  if (total_mass(a) == 0.0 || total_mass(b) == 0.0) return 0.0;
  return cross_energy(kernel, a, b);
}

double lambda_additivity_defect(const TestFunctionSpec& f, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const MixtureTerm terms[] = {{1.0, a}, {1.0, b}};
  const auto sum = mixture(terms);
  return std::abs(lambda_measure(f, sum) - lambda_measure(f, a) - lambda_measure(f, b));
}

}  // namespace occm
