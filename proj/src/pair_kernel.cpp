#include "occm/pair_kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "occm/error.hpp"
#include "occm/kernels.hpp"

namespace occm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// fftw's planner is not reentrant.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct SparseSupport {
  int dim = 0;
  std::vector<double> axis[3];
  std::vector<double> weight;

  kernels::PointsSoA view() const {
    kernels::PointsSoA p;
    p.dim = dim;
    for (int k = 0; k < dim; ++k) p.axis[k] = axis[k].data();
    p.n = weight.size();
    return p;
  }
};

SparseSupport support_of(const DiscreteMeasure& m) {
  SparseSupport s;
  s.dim = m.dim();
  const auto w = m.weights();
  double x[kMaxDim];
  for (Index i = 0; i < m.grid().size(); ++i) {
    if (w[i] == 0.0) continue;
    m.grid().center(i, x);
    for (int k = 0; k < s.dim; ++k) s.axis[k].push_back(x[k]);
    s.weight.push_back(w[i]);
  }
  return s;
}

Index support_count(const DiscreteMeasure& m) {
  return static_cast<Index>(std::count_if(m.weights().begin(), m.weights().end(), [](double w) { return w != 0.0; }));
}

// sum_{i in a, j in b} V(a_i - b_j) wa_i wb_j
double sparse_cross(const PairKernel& kernel, const SparseSupport& a, const SparseSupport& b) {
  const int d = a.dim;
  if (const auto* c = std::get_if<SmoothedCoulomb>(&kernel)) {
    const auto bv = b.view();
    const double eps2 = c->eps * c->eps;
    std::vector<double> row(a.weight.size());
    double p[kMaxDim];
    for (std::size_t i = 0; i < a.weight.size(); ++i) {
      for (int k = 0; k < d; ++k) p[k] = a.axis[k][i];
      row[i] = a.weight[i] * kernels::coulomb_row(p, bv, b.weight.data(), eps2);
    }
    return kernels::sum(row);
  }
  std::vector<double> row(a.weight.size());
  for (std::size_t i = 0; i < a.weight.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < b.weight.size(); ++j) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double dx = a.axis[k][i] - b.axis[k][j];
        r2 += dx * dx;
      }
      acc += b.weight[j] * evaluate(kernel, std::sqrt(r2));
    }
    row[i] = a.weight[i] * acc;
  }
  return kernels::sum(row);
}

// V on all index differences of the grid: extent 2n-1 per axis, Delta = 0 at n-1.
std::vector<double> difference_table(const PairKernel& kernel, const GridSpec& g, std::vector<Index>& extent) {
  const int d = g.dim();
  extent.resize(d);
  Index total = 1;
  for (int k = 0; k < d; ++k) {
    extent[k] = 2 * g.shape()[k] - 1;
    total *= extent[k];
  }
  std::vector<double> t(static_cast<std::size_t>(total));
  std::vector<Index> idx(d, 0);
  const double h = g.spacing();
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    double r2 = 0.0;
    for (int k = d - 1; k >= 0; --k) {
      idx[k] = rem % extent[k];
      rem /= extent[k];
      const double delta = static_cast<double>(idx[k] - (g.shape()[k] - 1)) * h;
      r2 += delta * delta;
    }
    t[flat] = evaluate(kernel, std::sqrt(r2));
  }
  return t;
}

std::vector<double> potential_direct(const PairKernel& kernel, const DiscreteMeasure& m) {
  const auto& g = m.grid();
  const int d = g.dim();
  std::vector<Index> extent;
  const auto table = difference_table(kernel, g, extent);
  const Index n_last = g.shape()[d - 1];
  const Index n_lines = g.size() / n_last;
  const auto w = m.weights();

  std::vector<Index> live_lines;
  for (Index line = 0; line < n_lines; ++line) {
    const double* p = w.data() + line * n_last;
    if (std::any_of(p, p + n_last, [](double v) { return v != 0.0; })) live_lines.push_back(line);
  }

  // Table strides over the difference extents.
  std::vector<Index> tstride(d, 1);
  for (int k = d - 2; k >= 0; --k) tstride[k] = tstride[k + 1] * extent[k + 1];

  std::vector<double> phi(static_cast<std::size_t>(g.size()), 0.0);
  std::vector<Index> xl(d), yl(d);
  for (Index x = 0; x < g.size(); ++x) {
    Index rem = x;
    for (int k = d - 1; k >= 0; --k) {
      xl[k] = rem % g.shape()[k];
      rem /= g.shape()[k];
    }
    double acc = 0.0;
    for (Index line : live_lines) {
      Index lrem = line;
      Index toff = 0;
      for (int k = d - 2; k >= 0; --k) {
        yl[k] = lrem % g.shape()[k];
        lrem /= g.shape()[k];
        toff += (yl[k] - xl[k] + g.shape()[k] - 1) * tstride[k];
      }
      toff += (n_last - 1 - xl[d - 1]);
      acc += kernels::active().dot(table.data() + toff, w.data() + line * n_last, static_cast<std::size_t>(n_last));
    }
    phi[x] = acc;
  }
  return phi;
}

std::vector<double> potential_fft(const PairKernel& kernel, const DiscreteMeasure& m) {
  const auto& g = m.grid();
  const int d = g.dim();
  std::vector<int> L(d);
  Index total = 1;
  for (int k = 0; k < d; ++k) {
    L[k] = static_cast<int>(2 * g.shape()[k]);
    total *= L[k];
  }
  const Index last_c = L[d - 1] / 2 + 1;
  const Index total_c = total / L[d - 1] * last_c;
  const double h = g.spacing();

  double* kr = fftw_alloc_real(static_cast<std::size_t>(total));
  double* mr = fftw_alloc_real(static_cast<std::size_t>(total));
  fftw_complex* kc = fftw_alloc_complex(static_cast<std::size_t>(total_c));
  fftw_complex* mc = fftw_alloc_complex(static_cast<std::size_t>(total_c));

  fftw_plan pk, pm, pinv;
  {
    std::lock_guard lock(fftw_mutex());
    pk = fftw_plan_dft_r2c(d, L.data(), kr, kc, FFTW_ESTIMATE);
    pm = fftw_plan_dft_r2c(d, L.data(), mr, mc, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r(d, L.data(), mc, mr, FFTW_ESTIMATE);
  }

  std::vector<Index> idx(d);
  const auto w = m.weights();
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    double r2 = 0.0;
    bool in_grid = true;
    Index gflat = 0;
    for (int k = d - 1; k >= 0; --k) {
      idx[k] = rem % L[k];
      rem /= L[k];
      // wrapped difference; L = 2n so |delta| <= n covers every pair
      const Index delta = idx[k] <= L[k] / 2 ? idx[k] : idx[k] - L[k];
      r2 += static_cast<double>(delta * delta) * h * h;
      in_grid = in_grid && idx[k] < g.shape()[k];
    }
    kr[flat] = evaluate(kernel, std::sqrt(r2));
    if (in_grid) {
      for (int k = 0; k < d; ++k) gflat = gflat * g.shape()[k] + idx[k];
      mr[flat] = w[gflat];
    } else {
      mr[flat] = 0.0;
    }
  }
  fftw_execute(pk);
  fftw_execute(pm);
  for (Index i = 0; i < total_c; ++i) {
    const double re = kc[i][0] * mc[i][0] - kc[i][1] * mc[i][1];
    const double im = kc[i][0] * mc[i][1] + kc[i][1] * mc[i][0];
    mc[i][0] = re;
    mc[i][1] = im;
  }
  fftw_execute(pinv);

  std::vector<double> phi(static_cast<std::size_t>(g.size()));
  const double scale = 1.0 / static_cast<double>(total);
  std::vector<Index> gl(d);
  for (Index gflat = 0; gflat < g.size(); ++gflat) {
    Index rem = gflat;
    for (int k = d - 1; k >= 0; --k) {
      gl[k] = rem % g.shape()[k];
      rem /= g.shape()[k];
    }
    Index f = 0;
    for (int k = 0; k < d; ++k) f = f * L[k] + gl[k];
    phi[gflat] = mr[f] * scale;
  }

  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(pk);
    fftw_destroy_plan(pm);
    fftw_destroy_plan(pinv);
  }
  fftw_free(kr);
  fftw_free(mr);
  fftw_free(kc);
  fftw_free(mc);
  return phi;
}

}  // namespace

void validate(const PairKernel& kernel) {
  std::visit(overloaded{
                 [](const SmoothedCoulomb& c) {
                   require(c.eps > 0.0 && std::isfinite(c.eps), ErrorCode::SingularKernel,
                           "smoothed Coulomb kernel needs eps > 0");
                 },
                 [](const GaussianKernel& gk) {
                   require(gk.width > 0.0, ErrorCode::InvalidArgument, "Gaussian kernel width must be > 0");
                 },
                 [](const TabulatedKernel& t) {
                   require(t.radii.size() >= 2 && t.radii.size() == t.values.size(), ErrorCode::InvalidArgument,
                           "tabulated kernel needs >= 2 matching radii/values");
                   require(t.radii.front() == 0.0, ErrorCode::InvalidArgument, "tabulated kernel must start at r = 0");
                   for (std::size_t i = 1; i < t.radii.size(); ++i) {
                     require(t.radii[i] > t.radii[i - 1], ErrorCode::InvalidArgument,
                             "tabulated radii must increase strictly");
                   }
                 },
             },
             kernel);
}

double evaluate(const PairKernel& kernel, double r) {
  return std::visit(overloaded{
                        [r](const SmoothedCoulomb& c) { return 1.0 / std::sqrt(c.eps * c.eps + r * r); },
                        [r](const GaussianKernel& gk) { return std::exp(-0.5 * r * r / (gk.width * gk.width)); },
                        [r](const TabulatedKernel& t) {
                          if (r >= t.radii.back()) return 0.0;
                          const auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
                          const std::size_t j = static_cast<std::size_t>(it - t.radii.begin());
                          const double a = (r - t.radii[j - 1]) / (t.radii[j] - t.radii[j - 1]);
                          return (1.0 - a) * t.values[j - 1] + a * t.values[j];
                        },
                    },
                    kernel);
}

std::vector<double> potential_field(const PairKernel& kernel, const DiscreteMeasure& m, ConvolutionRoute route) {
  validate(kernel);
  if (route == ConvolutionRoute::automatic) {
    const double work = static_cast<double>(m.grid().size()) * static_cast<double>(support_count(m));
    route = work <= 2e8 ? ConvolutionRoute::direct : ConvolutionRoute::fft;
  }
  switch (route) {
    case ConvolutionRoute::fft: return potential_fft(kernel, m);
    case ConvolutionRoute::sparse: {
      const auto s = support_of(m);
      std::vector<double> phi(static_cast<std::size_t>(m.grid().size()));
      SparseSupport one;
      one.dim = m.dim();
      double x[kMaxDim];
      for (Index i = 0; i < m.grid().size(); ++i) {
        m.grid().center(i, x);
        for (int k = 0; k < one.dim; ++k) one.axis[k] = {x[k]};
        one.weight = {1.0};
        phi[i] = sparse_cross(kernel, one, s);
      }
      return phi;
    }
    default: return potential_direct(kernel, m);
  }
}

double pair_energy(const PairKernel& kernel, const DiscreteMeasure& m, ConvolutionRoute route) {
  validate(kernel);
  if (route == ConvolutionRoute::automatic) {
    const double n = static_cast<double>(support_count(m));
    route = n * n <= 4e8 ? ConvolutionRoute::sparse : ConvolutionRoute::fft;
  }
  if (route == ConvolutionRoute::sparse) {
    const auto s = support_of(m);
    return sparse_cross(kernel, s, s);
  }
  const auto phi = potential_field(kernel, m, route);
  return kernels::dot(m.weights(), phi);
}

double cross_energy(const PairKernel& kernel, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  validate(kernel);
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "cross energy of measures of different dimension");
  require(a.grid().same_lattice(b.grid()), ErrorCode::DimensionMismatch, "measures do not share a lattice");
  const double na = static_cast<double>(support_count(a));
  const double nb = static_cast<double>(support_count(b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  if (na * nb <= 4e8) return sparse_cross(kernel, support_of(a), support_of(b));
  const GridSpec g = a.grid().bounding_union(b.grid());
  const auto ea = a.embedded(g);
  const auto phi = potential_field(kernel, b.embedded(g), ConvolutionRoute::fft);
  return kernels::dot(ea.weights(), phi);
}

}  // namespace occm
