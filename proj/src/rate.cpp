#include "occm/rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "occm/error.hpp"
#include "occm/kernels.hpp"

namespace occm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> root_density(const DiscreteMeasure& m) {
  const double inv_vol = 1.0 / m.grid().cell_volume();
  std::vector<double> f(m.weights().begin(), m.weights().end());
  for (double& x : f) x = std::sqrt(x * inv_vol);
  return f;
}

// Calls fn(a, b) for every pair of adjacent cells (flat indices) along `axis`.
template <class Fn>
void for_each_edge(const GridSpec& g, int axis, Fn&& fn) {
  const Index n = g.shape()[axis];
  const Index stride = g.strides()[axis];
  const Index block = stride * n;
  for (Index outer = 0; outer < g.size(); outer += block) {
    for (Index inner = 0; inner < stride; ++inner) {
      const Index base = outer + inner;
      for (Index i = 0; i + 1 < n; ++i) fn(base + i * stride, base + (i + 1) * stride);
    }
  }
}

double central_energy(const GridSpec& g, const std::vector<double>& f) {
  const double h = g.spacing();
  std::vector<double> grad2(f.size(), 0.0);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const Index n = g.shape()[axis];
    if (n < 2) continue;
    const Index stride = g.strides()[axis];
    const Index block = stride * n;
    for (Index outer = 0; outer < g.size(); outer += block) {
      for (Index inner = 0; inner < stride; ++inner) {
        const Index base = outer + inner;
        for (Index i = 0; i < n; ++i) {
          double d;
          if (i == 0) {
            d = (f[base + stride] - f[base]) / h;
          } else if (i == n - 1) {
            d = (f[base + i * stride] - f[base + (i - 1) * stride]) / h;
          } else {
            d = (f[base + (i + 1) * stride] - f[base + (i - 1) * stride]) / (2.0 * h);
          }
          grad2[base + i * stride] += d * d;
        }
      }
    }
  }
  return 0.5 * kernels::sum(grad2) * g.cell_volume();
}

double forward_energy(const GridSpec& g, const std::vector<double>& f) {
  const double h = g.spacing();
  std::vector<double> terms;
  terms.reserve(f.size() * g.dim());
  for (int axis = 0; axis < g.dim(); ++axis) {
    for_each_edge(g, axis, [&](Index a, Index b) {
      const double d = (f[b] - f[a]) / h;
      terms.push_back(d * d);
    });
  }
  return 0.5 * kernels::sum(terms) * g.cell_volume();
}

bool has_jump(const DiscreteMeasure& m, const RateParams& p) {
  const auto w = m.weights();
  const double wmax = *std::max_element(w.begin(), w.end());
  const double floor = p.relative_floor * wmax;
  bool jump = false;
  for (int axis = 0; axis < m.dim() && !jump; ++axis) {
    for_each_edge(m.grid(), axis, [&](Index a, Index b) {
      const double hi = std::max(w[a], w[b]);
      const double lo = std::min(w[a], w[b]);
      if (hi > floor && hi > p.jump_ratio_cap * lo) jump = true;
    });
  }
  return jump;
}

double bump_value(const Bump& b, double s) {
  if (s >= 2.0 * b.radius) return 0.0;
  return b.amplitude * std::exp(-0.5 * s * s / (b.width * b.width)) * cutoff(s / b.radius);
}

// Laplacian of the radial function s -> bump_value(b, s) in dimension d.
double bump_laplacian(const Bump& b, double s, int d) {
  if (s >= 2.0 * b.radius) return 0.0;
  const double w2 = b.width * b.width;
  const double G = b.amplitude * std::exp(-0.5 * s * s / w2);
  const double G1 = -s / w2 * G;
  const double G2 = (s * s / (w2 * w2) - 1.0 / w2) * G;
  const double t = s / b.radius;
  const double P = cutoff(t);
  const double P1 = cutoff_d1(t) / b.radius;
  const double P2 = cutoff_d2(t) / (b.radius * b.radius);
  const double F2 = G2 * P + 2.0 * G1 * P1 + G * P2;
  // F'(s)/s, written so that s = 0 is harmless (P1 vanishes for s < radius)
  const double F1_over_s = -G * P / w2 + (P1 != 0.0 ? G * P1 / s : 0.0);
  return F2 + (d - 1) * F1_over_s;
}

double distance(std::span<const double> x, const Coord& a) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - a[k]) * (x[k] - a[k]);
  return std::sqrt(s);
}

}  // namespace

RateReport rate_I(const DiscreteMeasure& m, const RateParams& p) {
  RateReport rep;
  rep.h = m.grid().spacing();
  if (total_mass(m) == 0.0) return rep;
  if (has_jump(m, p)) {
    rep.value = kInf;
    rep.infinite = true;
    return rep;
  }
  const auto f = root_density(m);
  rep.value = central_energy(m.grid(), f);
  rep.slack = std::abs(rep.value - forward_energy(m.grid(), f));
  return rep;
}

double dirichlet_form(const DiscreteMeasure& m) { return forward_energy(m.grid(), root_density(m)); }

double rate_collection(const Collection& xi, const RateParams& p) {
  double s = 0.0;
  for (const auto& c : xi.components()) s += rate_I(c, p).value;
  return s;
}

double cutoff(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_d1(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return -30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double cutoff_d2(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

double TestPotential::value(std::span<const double> x) const {
  double g = c;
  for (const auto& b : bumps) g += bump_value(b, distance(x, b.at));
  return g;
}

double TestPotential::laplacian(std::span<const double> x) const {
  double l = 0.0;
  for (const auto& b : bumps) l += bump_laplacian(b, distance(x, b.at), static_cast<int>(x.size()));
  return l;
}

double TestPotential::stencil_laplacian(std::span<const double> x, double h) const {
  const double g0 = value(x);
  Coord y(x.begin(), x.end());
  double l = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    y[k] = x[k] + h;
    const double gp = value(y);
    y[k] = x[k] - h;
    const double gm = value(y);
    y[k] = x[k];
    l += (gp + gm - 2.0 * g0) / (h * h);
  }
  return l;
}

double TestPotential::drift(std::span<const double> x) const { return -0.5 * laplacian(x) / value(x); }

DualResult dual_rate(const DiscreteMeasure& m, const std::vector<TestPotential>& candidates) {
  require(!candidates.empty(), ErrorCode::InvalidArgument, "dual_rate needs at least one candidate");
  const auto& grid = m.grid();
  const auto w = m.weights();
  const double h2 = grid.spacing() * grid.spacing();
  const auto rate = rate_I(m);
  DualResult res;
  res.rate = rate.value;
  res.value = -kInf;
  std::vector<double> gv(static_cast<std::size_t>(grid.size()));
  std::vector<double> lap(gv.size());
  double x[kMaxDim];
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto& cand = candidates[j];
    require(cand.c > 0.0, ErrorCode::InvalidArgument, "test potential needs c > 0");
    for (Index i = 0; i < grid.size(); ++i) {
      grid.center(i, x);
      gv[i] = cand.value(std::span<const double>(x, grid.dim()));
    }
    std::fill(lap.begin(), lap.end(), 0.0);
    for (int axis = 0; axis < grid.dim(); ++axis) {
      for_each_edge(grid, axis, [&](Index a, Index b) {
        const double d = (gv[b] - gv[a]) / h2;
        lap[a] += d;
        lap[b] -= d;
      });
    }
    double v = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i) {
      if (w[i] != 0.0) v += -0.5 * lap[i] / gv[i] * w[i];
    }
    if (v > res.value) {
      res.value = v;
      res.best = j;
    }
  }
  res.slack = rate.infinite ? 0.0 : rate.slack;
  return res;
}

std::vector<TestPotential> dual_candidate_sweep(const DiscreteMeasure& m, int n_amplitude, int n_width) {
  require(n_amplitude >= 1 && n_width >= 1, ErrorCode::InvalidArgument, "sweep sizes must be >= 1");
  const auto& grid = m.grid();
  const int d = grid.dim();
  const double mass = total_mass(m);
  require(mass > 0.0, ErrorCode::InvalidArgument, "dual sweep needs a nonzero measure");
  Coord mean(d, 0.0);
  double second = 0.0;
  double x[kMaxDim];
  for (Index i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    for (int k = 0; k < d; ++k) mean[k] += m.weights()[i] * x[k];
  }
  for (double& v : mean) v /= mass;
  for (Index i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    for (int k = 0; k < d; ++k) second += m.weights()[i] * (x[k] - mean[k]) * (x[k] - mean[k]);
  }
  const double s = std::max(std::sqrt(second / (mass * d)), grid.spacing());

  auto logspace = [](double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
  };
  const auto amplitudes = logspace(0.1, 1e4, n_amplitude);
  const auto widths = logspace(0.25 * s, 4.0 * s, n_width);
  std::vector<Coord> centres;
  if (d == 1) {
    for (int k = -2; k <= 2; ++k) centres.push_back({mean[0] + 0.5 * k * s});
  } else {
    centres.push_back(mean);
  }
  std::vector<TestPotential> out;
  for (double c : {0.01, 0.1, 1.0}) {
    for (const auto& b : centres) {
      for (double a : amplitudes) {
        for (double wdt : widths) out.push_back({c, {Bump{a, wdt, 2.0 * wdt, b}}});
      }
    }
  }
  return out;
}

ImsReport ims_localization_check(const DiscreteMeasure& m, const std::vector<Coord>& centers, double r_n) {
  require(r_n > 0.0, ErrorCode::InvalidArgument, "r_n must be > 0");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    require(static_cast<int>(centers[i].size()) == m.dim(), ErrorCode::DimensionMismatch, "centre dimension differs");
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      require(distance(centers[i], centers[j]) >= 4.0 * r_n, ErrorCode::OverlapError,
              "localization supports overlap");
    }
  }
  const auto& grid = m.grid();
  ImsReport rep;
  rep.total = rate_I(m).value;
  double x[kMaxDim];
  for (const auto& c : centers) {
    std::vector<double> local(m.weights().begin(), m.weights().end());
    double grad = 0.0;
    for (Index i = 0; i < grid.size(); ++i) {
      grid.center(i, x);
      const double t = distance(std::span<const double>(x, grid.dim()), c) / r_n;
      const double phi = cutoff(t);
      local[i] *= phi * phi;
      const double dphi = cutoff_d1(t) / r_n;
      grad += m.weights()[i] * dphi * dphi;
    }
    rep.sum_local += rate_I(DiscreteMeasure(grid, std::move(local))).value;
    rep.gradient_term += 0.5 * grad;
  }
  rep.excess = rep.sum_local - rep.total;
  rep.fitted_c = rep.excess * r_n;
  return rep;
}

SubadditivityReport subadditivity_check(const Collection& xi, double M, double separation, double h_if_empty,
                                        int dim_if_empty) {
  require(M > 0.0, ErrorCode::InvalidArgument, "filler variance must be > 0");
  require(separation >= 0.0, ErrorCode::InvalidArgument, "separation must be >= 0");
  const int d = xi.empty() ? dim_if_empty : xi.components()[0].dim();
  const double h = xi.empty() ? h_if_empty : xi.components()[0].grid().spacing();

  // Lay the cropped components side by side along axis 0.
  std::vector<DiscreteMeasure> placed;
  const Index gap = static_cast<Index>(std::ceil(separation / h));
  Index cursor = 0;
  for (const auto& c : xi.components()) {
    require(c.grid().spacing() == h, ErrorCode::DimensionMismatch, "components use different spacings");
    const auto cr = c.cropped();
    LatticeVector move(d, 0);
    for (int k = 0; k < d; ++k) move[k] = -cr.grid().offset()[k];
    move[0] += cursor;
    placed.push_back(shift(cr, move));
    cursor += cr.grid().shape()[0] + gap;
  }
  const Index centre = placed.empty() ? 0 : (cursor - gap) / 2;
  for (auto& p : placed) {
    LatticeVector back(d, 0);
    back[0] = -centre;
    p = shift(p, back);
  }

  SubadditivityReport rep;
  const double filler_mass = std::max(0.0, 1.0 - xi.total_mass());
  const double reach = 7.0 * std::sqrt(M);
  Coord lo(d, -reach), hi(d, reach);
  GridSpec grid = GridSpec::covering(h, lo, hi);
  for (const auto& p : placed) grid = grid.bounding_union(p.grid());
  const Coord origin(d, 0.0);
  const auto filler = gaussian_measure(grid, origin, M).measure;

  std::vector<MixtureTerm> terms;
  for (const auto& p : placed) terms.push_back({1.0, p});
  if (filler_mass > 0.0) terms.push_back({filler_mass, filler});
  if (terms.empty()) return rep;
  const auto mix = mixture(terms).embedded(grid);

  for (const auto& p : placed) rep.component_rates += rate_I(p.embedded(grid)).value;
  if (filler_mass > 0.0) rep.filler_rate = filler_mass * rate_I(filler).value;
  rep.mixture_rate = rate_I(mix).value;
  rep.bound = rep.component_rates + rep.filler_rate;
  rep.slack = 1e-10 * rep.bound + 1e-14;
  rep.holds = rep.mixture_rate <= rep.bound + rep.slack;
  return rep;
}

double fk_functional(const TestPotential& g, const DiscreteMeasure& m) {
  require(g.c > 0.0, ErrorCode::InvalidArgument, "test potential needs c > 0");
  const auto& grid = m.grid();
  double x[kMaxDim];
  std::vector<double> terms;
  for (Index i = 0; i < grid.size(); ++i) {
    const double w = m.weights()[i];
    if (w == 0.0) continue;
    grid.center(i, x);
    const std::span<const double> xs(x, grid.dim());
    terms.push_back(-0.5 * g.stencil_laplacian(xs, grid.spacing()) / g.value(xs) * w);
  }
  return kernels::sum(terms);
}

ShiftSearchResult fk_sup_over_shifts(const TestPotential& tmpl, const DiscreteMeasure& m,
                                     const GridSpec& shift_lattice) {
  require(tmpl.c > 0.0, ErrorCode::InvalidArgument, "test potential needs c > 0");
  require(shift_lattice.dim() == m.dim(), ErrorCode::DimensionMismatch, "shift lattice dimension differs");
  const int d = m.dim();
  const std::size_t k = tmpl.bumps.size();
  ShiftSearchResult res;
  res.shifts.assign(k, Coord{});
  if (k == 0) return res;

  std::vector<Coord> lattice;
  for (Index i = 0; i < shift_lattice.size(); ++i) lattice.push_back(shift_lattice.center(i));
  auto separated = [&](std::size_t bi, const Coord& a, std::size_t bj, const Coord& b) {
    return distance(a, b) >= 4.0 * std::max(tmpl.bumps[bi].radius, tmpl.bumps[bj].radius);
  };

  // The lattice must be able to host every bump at once.
  {
    std::vector<std::size_t> pick(k);
    std::function<bool(std::size_t)> place = [&](std::size_t b) {
      if (b == k) return true;
      for (std::size_t p = 0; p < lattice.size(); ++p) {
        bool ok = true;
        for (std::size_t q = 0; q < b && ok; ++q) ok = separated(b, lattice[p], q, lattice[pick[q]]);
        if (!ok) continue;
        pick[b] = p;
        if (place(b + 1)) return true;
      }
      return false;
    };
    require(place(0), ErrorCode::EmptyAdmissibleSet, "no admissible placement of the bumps on the shift lattice");
  }

  // Support box of m.
  Coord lo(d, kInf), hi(d, -kInf);
  double x[kMaxDim];
  for (Index i = 0; i < m.grid().size(); ++i) {
    if (m.weights()[i] == 0.0) continue;
    m.grid().center(i, x);
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], x[a]);
      hi[a] = std::max(hi[a], x[a]);
    }
  }
  std::vector<std::vector<std::size_t>> in_range(k);
  for (std::size_t b = 0; b < k; ++b) {
    const double reach = 2.0 * tmpl.bumps[b].radius;
    for (std::size_t p = 0; p < lattice.size(); ++p) {
      bool ok = true;
      for (int a = 0; a < d && ok; ++a) ok = lattice[p][a] >= lo[a] - reach && lattice[p][a] <= hi[a] + reach;
      if (ok) in_range[b].push_back(p);
    }
  }

  for (const auto& b : tmpl.bumps) {
    double prev = 0.0, slope = 0.0;
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
      const double s = 2.0 * b.radius * i / steps;
      Coord y(d, 0.0);
      y[0] = s;
      TestPotential one{tmpl.c, {Bump{b.amplitude, b.width, b.radius, Coord(d, 0.0)}}};
      const double v = one.drift(y);
      if (i > 0) slope = std::max(slope, std::abs(v - prev) / (2.0 * b.radius / steps));
      prev = v;
    }
    res.lipschitz = std::max(res.lipschitz, slope);
  }

  // Exhaustive scan; index -1 parks a bump, and parking sorts first so ties go
  // to the lexicographically smallest tuple.
  std::vector<long> choice(k, -1);
  res.value = -kInf;
  std::function<void(std::size_t)> scan = [&](std::size_t b) {
    if (b == k) {
      TestPotential g{tmpl.c, {}};
      for (std::size_t j = 0; j < k; ++j) {
        if (choice[j] < 0) continue;
        Bump bump = tmpl.bumps[j];
        bump.at = lattice[choice[j]];
        g.bumps.push_back(bump);
      }
      const double v = fk_functional(g, m);
      ++res.tuples;
      if (v > res.value) {
        res.value = v;
        for (std::size_t j = 0; j < k; ++j) res.shifts[j] = choice[j] < 0 ? Coord{} : lattice[choice[j]];
      }
      return;
    }
    choice[b] = -1;
    scan(b + 1);
    for (std::size_t p : in_range[b]) {
      bool ok = true;
      for (std::size_t q = 0; q < b && ok; ++q) {
        if (choice[q] >= 0) ok = separated(b, lattice[p], q, lattice[choice[q]]);
      }
      if (!ok) continue;
      choice[b] = static_cast<long>(p);
      scan(b + 1);
    }
    choice[b] = -1;
  };
  scan(0);
  return res;
}

double tilted_rate_J(const Collection& xi, double rho_tilde, double eps) {
  const PairKernel v = SmoothedCoulomb{eps};
  validate(v);
  double s = 0.0;
  for (const auto& c : xi.components()) s += pair_energy(v, c) - rate_I(c).value;
  return rho_tilde - s;
}

}  // namespace occm
