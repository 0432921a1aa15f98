#include "occm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "occm/error.hpp"
#include "occm/kernels.hpp"

namespace occm {

namespace {

kernels::PointsSoA soa(const PathSample& p, std::size_t first, std::size_t count) {
  kernels::PointsSoA q;
  q.dim = p.dim;
  q.n = count;
  for (int k = 0; k < p.dim; ++k) q.axis[k] = p.axis[k].data() + first;
  return q;
}

kernels::PointsSoA soa(const std::vector<double> (&a)[3], int dim, std::size_t count) {
  kernels::PointsSoA q;
  q.dim = dim;
  q.n = count;
  for (int k = 0; k < dim; ++k) q.axis[k] = a[k].data();
  return q;
}

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Each index
// writes only its own output slot, so the result does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

McReport mean_report(const std::vector<double>& x, std::uint64_t seed) {
  McReport r;
  r.n_samples = x.size();
  r.seed = seed;
  if (x.empty()) return r;
  const double n = static_cast<double>(x.size());
  r.estimate = kernels::sum(x) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - r.estimate) * (v - r.estimate);
  r.std_error = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return r;
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Coord PathSample::point(std::size_t i) const {
  Coord c(dim);
  for (int k = 0; k < dim; ++k) c[k] = axis[k][i];
  return c;
}

PathSample sample_path(int dim, std::size_t n_steps, double dt, std::mt19937_64& rng) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  require(n_steps >= 2, ErrorCode::InvalidArgument, "a path needs at least 2 steps");
  require(dt > 0.0, ErrorCode::InvalidArgument, "dt must be > 0");
  PathSample p;
  p.dim = dim;
  p.dt = dt;
  std::normal_distribution<double> normal;
  const double s = std::sqrt(dt);
  for (int k = 0; k < dim; ++k) p.axis[k].assign(n_steps + 1, 0.0);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    for (int k = 0; k < dim; ++k) p.axis[k][i] = p.axis[k][i - 1] + s * normal(rng);
  }
  return p;
}

PathSample sample_path(int dim, std::size_t n_steps, double dt, std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  return sample_path(dim, n_steps, dt, rng);
}

DiscreteMeasure occupation_measure(const PathSample& p, double h) {
  require(h > 0.0, ErrorCode::InvalidArgument, "grid spacing must be > 0");
  Coord lo(p.dim), hi(p.dim);
  for (int k = 0; k < p.dim; ++k) {
    const auto [mn, mx] = std::minmax_element(p.axis[k].begin() + 1, p.axis[k].end());
    lo[k] = *mn;
    hi[k] = *mx;
  }
  return occupation_measure(p, GridSpec::covering(h, lo, hi));
}

DiscreteMeasure occupation_measure(const PathSample& p, const GridSpec& grid) {
  require(grid.dim() == p.dim, ErrorCode::DimensionMismatch, "grid and path differ in dimension");
  const std::size_t n = p.steps();
  Coord lo(p.dim), hi(p.dim);
  for (int k = 0; k < p.dim; ++k) {
    const auto [mn, mx] = std::minmax_element(p.axis[k].begin() + 1, p.axis[k].end());
    lo[k] = *mn;
    hi[k] = *mx;
  }
  GridSpec g = grid.bounding_union(GridSpec::covering(grid.spacing(), lo, hi));
  std::vector<double> w(static_cast<std::size_t>(g.size()), 0.0);
  const double unit = 1.0 / static_cast<double>(n);
  double x[kMaxDim];
  for (std::size_t i = 1; i <= n; ++i) {
    for (int k = 0; k < p.dim; ++k) x[k] = p.axis[k][i];
    const auto local = g.nearest_local(std::span<const double>(x, p.dim));
    w[g.ravel(local)] += unit;
  }
  return DiscreteMeasure(std::move(g), std::move(w));
}

double energy_H(const PathSample& p, double eps) {
  require(eps > 0.0, ErrorCode::SingularKernel, "eps must be > 0");
  const std::size_t n = p.steps();
  const double eps2 = eps * eps;
  std::vector<double> rows(n);
  double x[kMaxDim];
  for (std::size_t i = 1; i <= n; ++i) {
    for (int k = 0; k < p.dim; ++k) x[k] = p.axis[k][i];
    rows[i - 1] = i < n ? kernels::coulomb_row(x, soa(p, i + 1, n - i), nullptr, eps2) : 0.0;
  }
  const double off = 2.0 * kernels::sum(rows);
  const double t = p.t();
  return p.dt * p.dt / t * (off + static_cast<double>(n) / eps);
}

double delta_energy_H(const PathSample& p, std::size_t first, std::size_t count,
                      const std::vector<double> (&replacement)[3], double eps) {
  const std::size_t n = p.steps();
  require(first >= 1 && first + count <= n + 1, ErrorCode::InvalidArgument, "segment outside the path");
  const double eps2 = eps * eps;
  const auto all_old = soa(p, 1, n);
  const auto seg_old = soa(p, first, count);
  const auto seg_new = soa(replacement, p.dim, count);

  // The new path differs only on the segment; its rows are old rows with the
  // segment contributions swapped.
  double row_old = 0.0, row_new_outside = 0.0, ss_old = 0.0, ss_new = 0.0;
  double x[kMaxDim];
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < p.dim; ++k) x[k] = p.axis[k][first + i];
    row_old += kernels::coulomb_row(x, all_old, nullptr, eps2);
    ss_old += kernels::coulomb_row(x, seg_old, nullptr, eps2);
    for (int k = 0; k < p.dim; ++k) x[k] = replacement[k][i];
    row_new_outside += kernels::coulomb_row(x, all_old, nullptr, eps2) - kernels::coulomb_row(x, seg_old, nullptr, eps2);
    ss_new += kernels::coulomb_row(x, seg_new, nullptr, eps2);
  }
  const double cross_old = row_old - ss_old;
  const double delta = 2.0 * (row_new_outside - cross_old) + (ss_new - ss_old);
  return p.dt * p.dt / p.t() * delta;
}

double y_eps_constant() {
  // Golden-section search of a unimodal function on (0, 10).
  auto f = [](double u) {
    const double s = std::sqrt(1.0 + u * u);
    return std::sqrt(u) / (s * (u + s));
  };
  double a = 1e-6, b = 10.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return f(0.5 * (a + b));
}

double y_eps(double r, double eps) {
  const double s = std::sqrt(eps * eps + r * r);
  return eps * eps / (r * s * (r + s));
}

YEpsReport y_eps_energy(const PathSample& p, double eps, double coincidence_h) {
  require(p.dim == 3, ErrorCode::DimensionError, "the Y_eps bound is stated for d = 3");
  require(eps > 0.0, ErrorCode::SingularKernel, "eps must be > 0");
  const double hc = coincidence_h > 0.0 ? coincidence_h : std::sqrt(p.dt);
  const double C = y_eps_constant();
  const double root_eps = std::sqrt(eps);
  const double cap = C * root_eps * std::pow(0.5 * hc, -1.5);
  const std::size_t n = p.steps();
  YEpsReport rep;
  std::vector<double> rem_rows(n, 0.0), bound_rows(n, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    double rem = 0.0, bnd = 0.0;
    for (std::size_t j = i + 1; j <= n; ++j) {
      double r2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = p.axis[k][i] - p.axis[k][j];
        r2 += d * d;
      }
      const double r = std::sqrt(r2);
      if (r < 0.5 * hc) {
        rem += cap;
        bnd += cap;
        ++rep.coincident;
      } else {
        rem += y_eps(r, eps);
        bnd += C * root_eps / (r * std::sqrt(r));
      }
    }
    rem_rows[i - 1] = rem;
    bound_rows[i - 1] = bnd;
  }
  const double scale = 2.0 * p.dt * p.dt / p.t();
  rep.remainder = scale * kernels::sum(rem_rows);
  rep.bound = scale * kernels::sum(bound_rows);
  return rep;
}

double inverse_three_halves_moment() {
  // E|Z|^{-3/2} = 2^{-3/4} Gamma(3/4) / Gamma(3/2) for the chi distribution with 3 degrees of freedom.
  return std::pow(2.0, -0.75) * std::tgamma(0.75) / std::tgamma(1.5);
}

namespace {

// F(u) = delta^{3/4} E^x[(1/delta) int_0^delta |W_s|^{-3/2} ds] at |x| = u sqrt(delta),
// tabulated once. With v = w^4 the time integral is F(u) = 4 int_0^1 g(u / w^2) dw,
// where g(rho) = E|rho e + Z|^{-3/2}.
class AverageTable {
 public:
  static constexpr double kTop = 20.0;
  static constexpr int kCells = 8000;

  AverageTable() {
    const double c = inverse_three_halves_moment();
    // g on [0, kRhoTop] from the noncentral chi density; with R = y^2,
    // g(rho) = 2 / (rho sqrt(2 pi)) int_0^inf exp(-(y^2 - rho)^2 / 2) - exp(-(y^2 + rho)^2 / 2) dy.
    g_.resize(kRhoCells + 1);
    g_[0] = c;
    for (int i = 1; i <= kRhoCells; ++i) {
      const double rho = i * kRhoTop / kRhoCells;
      const double ymax = std::sqrt(rho + 12.0);
      const int n = 4000;
      const double hy = ymax / n;
      double s = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double y = k * hy, y2 = y * y;
        const double f = std::exp(-0.5 * (y2 - rho) * (y2 - rho)) - std::exp(-0.5 * (y2 + rho) * (y2 + rho));
        s += (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) * f;
      }
      g_[i] = 2.0 / (rho * std::sqrt(2.0 * M_PI)) * s * hy / 3.0;
    }
    f_.resize(kCells + 1);
    for (int i = 0; i <= kCells; ++i) {
      const double u = i * kTop / kCells;
      const int n = 2000;
      const double hw = 1.0 / n;
      double s = 0.0;
      for (int k = 1; k <= n; ++k) {  // g(u / w^2) -> 0 fast as w -> 0 when u > 0
        const double w = (k - 0.5) * hw;
        s += u == 0.0 ? c : g(u / (w * w));
      }
      f_[i] = 4.0 * s * hw;
    }
  }

  double operator()(double u) const {
    if (u >= kTop) return std::pow(u, -1.5) * (1.0 + 0.1875 / (u * u));
    const double x = u / kTop * kCells;
    const int i = std::min(static_cast<int>(x), kCells - 1);
    const double t = x - i;
    return (1.0 - t) * f_[i] + t * f_[i + 1];
  }

 private:
  static constexpr double kRhoTop = 40.0;
  static constexpr int kRhoCells = 16000;

  // Beyond the table, the second-order expansion rho^{-3/2} (1 + 3 / (8 rho^2)).
  double g(double rho) const {
    if (rho >= kRhoTop) return std::pow(rho, -1.5) * (1.0 + 0.375 / (rho * rho));
    const double x = rho / kRhoTop * kRhoCells;
    const int i = std::min(static_cast<int>(x), kRhoCells - 1);
    const double t = x - i;
    return (1.0 - t) * g_[i] + t * g_[i + 1];
  }

  std::vector<double> g_, f_;
};

const AverageTable& average_table() {
  static const AverageTable table;
  return table;
}

}  // namespace

double inverse_three_halves_average(double r, double delta) {
  require(r >= 0.0 && delta > 0.0, ErrorCode::InvalidArgument, "need r >= 0 and delta > 0");
  return std::pow(delta, -0.75) * average_table()(r / std::sqrt(delta));
}

KhasminskiiReport khasminskii_check(const KhasminskiiParams& p) {
  require(p.lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
  require(p.n_paths >= 2 && p.n_steps >= 1, ErrorCode::InvalidArgument, "need at least 2 paths and 1 step");
  require(!p.starts.empty(), ErrorCode::InvalidArgument, "need at least one starting point");
  for (const auto& s : p.starts) require(s.size() == 3, ErrorCode::DimensionError, "starting points must be 3-D");
  const double dt = 1.0 / static_cast<double>(p.n_steps);
  const double sdt = std::sqrt(dt);
  const auto& table = average_table();
  const double scale = std::pow(dt, 0.25);  // dt * dt^{-3/4}

  // Each grid point W_{k dt} contributes the exact conditional mean of
  // int_{k dt}^{(k+1) dt} |W|^{-3/2} given W_{k dt}. By the Markov property the
  // sum has the right expectation, and no single term exceeds 4c dt^{1/4}, so
  // the exponential moment sees no spikes from near visits to the origin.
  KhasminskiiReport rep;
  std::vector<McReport> per_start(p.starts.size());
  std::vector<double> integrals0;
  parallel_for(p.starts.size(), [&](std::size_t s) {
    auto rng = make_rng(p.seed, s);
    std::normal_distribution<double> normal;
    std::vector<double> vals(p.n_paths);
    for (std::size_t path = 0; path < p.n_paths; ++path) {
      double w[3] = {p.starts[s][0], p.starts[s][1], p.starts[s][2]};
      double integral = 0.0;
      for (std::size_t k = 0; k < p.n_steps; ++k) {
        const double r = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        integral += scale * table(r / sdt);
        for (double& x : w) x += sdt * normal(rng);
      }
      vals[path] = integral;
    }
    per_start[s] = mean_report(vals, p.seed);
    if (s == 0) integrals0 = std::move(vals);
  });

  std::size_t best = 0;
  for (std::size_t s = 0; s < per_start.size(); ++s) {
    rep.eta_by_start.push_back(p.lambda * per_start[s].estimate);
    if (rep.eta_by_start[s] > rep.eta_by_start[best]) best = s;
  }
  rep.eta = per_start[best];
  rep.eta.estimate *= p.lambda;
  rep.eta.std_error *= p.lambda;
  rep.first_moment0 = per_start[0];

  std::vector<double> ex(integrals0.size());
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = std::exp(p.lambda * integrals0[i]);
  rep.moment = mean_report(ex, p.seed);
  rep.eta_too_large = rep.eta.estimate >= 1.0;
  rep.bound = rep.eta_too_large ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - rep.eta.estimate);
  rep.holds = !rep.eta_too_large && rep.moment.estimate <= rep.bound + 3.0 * rep.moment.std_error;
  return rep;
}

FkReport fk_bound_check(const TestPotential& g, std::size_t n_paths, std::size_t n_steps, double dt,
                        std::uint64_t seed, int dim) {
  require(g.c > 0.0, ErrorCode::InvalidArgument, "test potential needs c > 0");
  require(n_paths >= 2 && n_steps >= 1 && dt > 0.0, ErrorCode::InvalidArgument, "bad Monte Carlo sizes");
  for (const auto& b : g.bumps) require(static_cast<int>(b.at.size()) == dim, ErrorCode::DimensionMismatch,
                                        "bump centre dimension differs");
  auto rng = make_rng(seed, 0);
  std::normal_distribution<double> normal;
  const double sdt = std::sqrt(dt);
  std::vector<double> est(n_paths), ident(n_paths);
  Coord w(dim), next(dim);
  for (std::size_t path = 0; path < n_paths; ++path) {
    std::fill(w.begin(), w.end(), 0.0);
    double v_prev = g.drift(w);
    double integral = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      for (int a = 0; a < dim; ++a) next[a] = w[a] + sdt * normal(rng);
      const double v_next = g.drift(next);
      integral += 0.5 * dt * (v_prev + v_next);
      v_prev = v_next;
      std::swap(w, next);
    }
    est[path] = std::exp(integral);
    ident[path] = g.value(w) * est[path];
  }
  FkReport rep;
  rep.estimate = mean_report(est, seed);
  rep.identity = mean_report(ident, seed);
  rep.bound = g.value(Coord(dim, 0.0)) / g.c;
  rep.holds = rep.estimate.estimate <= rep.bound + 3.0 * rep.estimate.std_error;
  return rep;
}

void TiltConfig::validate() const {
  require(eps > 0.0, ErrorCode::SingularKernel, "eps must be > 0");
  require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be >= 0");
  require(bridge_weight >= 0.0 && bridge_weight <= 1.0, ErrorCode::InvalidArgument, "bridge_weight must be in [0, 1]");
  require(n_sweeps >= 1 && burn_in >= 0 && thin >= 1, ErrorCode::InvalidArgument, "bad sweep schedule");
}

double acceptance_probability(double beta, double delta_h) {
  const double x = beta * delta_h;
  return x >= 0.0 ? 1.0 : std::exp(x);
}

TiltedChain::TiltedChain(const TiltConfig& cfg, int dim, std::size_t n_steps, double dt, std::uint64_t stream)
    : cfg_(cfg), rng_(make_rng(cfg.seed, stream)) {
  cfg_.validate();
  path_ = sample_path(dim, n_steps, dt, rng_);
  energy_ = energy_H(path_, cfg_.eps);
}

double TiltedChain::acceptance_rate() const {
  return moves_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(moves_);
}

bool TiltedChain::try_replace(std::size_t first, std::vector<double> (&repl)[3]) {
  const std::size_t count = repl[0].size();
  const double dh = delta_energy_H(path_, first, count, repl, cfg_.eps);
  ++moves_;
  std::uniform_real_distribution<double> unif;
  const double a = acceptance_probability(cfg_.beta, dh);
  if (a < 1.0 && unif(rng_) >= a) return false;
  for (int k = 0; k < path_.dim; ++k) std::copy(repl[k].begin(), repl[k].end(), path_.axis[k].begin() + first);
  energy_ += dh;
  ++accepted_;
  return true;
}

bool TiltedChain::bridge_move() {
  const std::size_t n = path_.steps();
  const std::size_t max_len = std::max<std::size_t>(2, n / 4);
  std::uniform_int_distribution<std::size_t> len_dist(2, max_len);
  const std::size_t len = len_dist(rng_);
  std::uniform_int_distribution<std::size_t> start_dist(0, n - len);
  const std::size_t a = start_dist(rng_);
  const double dt = path_.dt;
  std::vector<double> repl[3];
  for (int k = 0; k < path_.dim; ++k) {
    repl[k].resize(len - 1);
    double prev = path_.axis[k][a];
    const double end = path_.axis[k][a + len];
    for (std::size_t j = 1; j < len; ++j) {
      const double remaining = static_cast<double>(len - j + 1);
      const double mean = prev + (end - prev) / remaining;
      const double var = dt * (remaining - 1.0) / remaining;
      prev = mean + std::sqrt(var) * normal_(rng_);
      repl[k][j - 1] = prev;
    }
  }
  return try_replace(a + 1, repl);
}

bool TiltedChain::pivot_move() {
  const std::size_t n = path_.steps();
  const std::size_t max_len = std::max<std::size_t>(1, n / 4);
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  const std::size_t len = len_dist(rng_);
  const std::size_t first = n - len + 1;
  const double s = std::sqrt(path_.dt);
  std::vector<double> repl[3];
  for (int k = 0; k < path_.dim; ++k) {
    repl[k].resize(len);
    double prev = path_.axis[k][first - 1];
    for (std::size_t j = 0; j < len; ++j) {
      prev += s * normal_(rng_);
      repl[k][j] = prev;
    }
  }
  return try_replace(first, repl);
}

void TiltedChain::sweep() {
  const std::size_t n = path_.steps();
  std::uniform_real_distribution<double> unif;
  std::size_t touched = 0;
  // Segments average about N/8 points, so this touches about N points.
  while (touched < n) {
    if (unif(rng_) < cfg_.bridge_weight) {
      bridge_move();
    } else {
      pivot_move();
    }
    touched += std::max<std::size_t>(1, n / 8);
  }
  // Refresh the running energy so rounding from incremental updates cannot accumulate.
  energy_ = energy_H(path_, cfg_.eps);
}

std::vector<ChainOutput> tilted_sampler(const TiltConfig& cfg, std::size_t n_steps, double dt, int dim, int chains) {
  cfg.validate();
  require(chains >= 1, ErrorCode::InvalidArgument, "need at least one chain");
  std::vector<ChainOutput> out(static_cast<std::size_t>(chains));
  parallel_for(out.size(), [&](std::size_t c) {
    TiltedChain chain(cfg, dim, n_steps, dt, c);
    for (int s = 0; s < cfg.burn_in; ++s) chain.sweep();
    for (int s = 0; s < cfg.n_sweeps; ++s) {
      chain.sweep();
      if ((s + 1) % cfg.thin == 0) {
        out[c].samples.push_back(chain.state());
        out[c].energies.push_back(chain.energy());
      }
    }
    out[c].acceptance = chain.acceptance_rate();
  });
  return out;
}

double quantile(std::vector<double> v, double q) {
  require(!v.empty(), ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<TubeRow> tube_experiment(const TiltConfig& cfg, const TubeParams& p, const RadialProfile& profile) {
  cfg.validate();
  require(!p.t_list.empty(), ErrorCode::InvalidArgument, "t_list must be nonempty");
  for (std::size_t i = 1; i < p.t_list.size(); ++i) {
    require(p.t_list[i] > p.t_list[i - 1], ErrorCode::InvalidArgument, "t_list must be increasing");
  }
  // mu_0 on the same lattice; widen the box until the profile fits.
  double half = 4.0;
  ProfileMeasure mu0;
  while (true) {
    try {
      mu0 = profile_to_measure(profile, GridSpec::centered(3, p.grid_h, half));
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GridTooSmall || half > profile.r.back()) throw;
      half *= 1.5;
    }
  }
  const auto reference = lambda_signature(Collection({mu0.measure.cropped()}), p.metric, 3);

  std::vector<TubeRow> rows;
  for (double t : p.t_list) {
    const auto n_steps = static_cast<std::size_t>(std::llround(t / p.dt));
    const auto chains = tilted_sampler(cfg, n_steps, p.dt, 3, p.chains);
    TubeRow row;
    row.t = t;
    std::vector<double> energies;
    double acc = 0.0;
    for (const auto& c : chains) {
      acc += c.acceptance;
      for (std::size_t s = 0; s < c.samples.size(); ++s) {
        const auto occ = occupation_measure(c.samples[s], p.grid_h);
        const auto dec = peel(occ, p.peel);
        const auto sig = lambda_signature(dec.collection(), p.metric, 3);
        row.distances.push_back(metric_from_signatures(sig, reference, p.metric).value);
        energies.push_back(c.energies[s]);
      }
    }
    row.acceptance = acc / static_cast<double>(chains.size());
    row.median = quantile(row.distances, 0.5);
    row.q25 = quantile(row.distances, 0.25);
    row.q75 = quantile(row.distances, 0.75);
    row.mean = kernels::sum(row.distances) / static_cast<double>(row.distances.size());
    row.mean_energy = kernels::sum(energies) / static_cast<double>(energies.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

FreeEnergyReport free_energy_estimate(const TiltConfig& cfg, double t, double dt, std::size_t n_paths) {
  cfg.validate();
  require(t > 0.0 && dt > 0.0, ErrorCode::InvalidArgument, "t and dt must be > 0");
  require(n_paths >= 2, ErrorCode::InvalidArgument, "need at least 2 paths");
  const auto n_steps = static_cast<std::size_t>(std::llround(t / dt));
  std::vector<double> x(n_paths);
  std::vector<double> ybound(std::min<std::size_t>(n_paths, 64));
  parallel_for(n_paths, [&](std::size_t k) {
    const auto path = sample_path(3, n_steps, dt, cfg.seed, k);
    x[k] = cfg.beta * energy_H(path, cfg.eps);
    if (k < ybound.size()) ybound[k] = y_eps_energy(path, cfg.eps).bound;
  });

  FreeEnergyReport rep;
  rep.t = static_cast<double>(n_steps) * dt;
  rep.diagonal = dt / cfg.eps;
  rep.mean_y_bound = kernels::sum(ybound) / static_cast<double>(ybound.size());
  const double n = static_cast<double>(n_paths);
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> e(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) e[k] = std::exp(x[k] - top);
  const double s = kernels::sum(e);
  const double theta = (top + std::log(s) - std::log(n)) / rep.t;

  // Jackknife over leave-one-out estimates.
  std::vector<double> loo(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) {
    double rest = s - e[k];
    if (rest <= 1e-12 * s) {
      rest = 0.0;
      for (std::size_t j = 0; j < n_paths; ++j) {
        if (j != k) rest += e[j];
      }
    }
    loo[k] = (top + std::log(rest) - std::log(n - 1.0)) / rep.t;
  }
  const double loo_mean = kernels::sum(loo) / n;
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  rep.estimate.estimate = cfg.beta == 0.0 ? 0.0 : theta;
  rep.estimate.std_error = cfg.beta == 0.0 ? 0.0 : std::sqrt((n - 1.0) / n * ss);
  rep.estimate.n_samples = n_paths;
  rep.estimate.seed = cfg.seed;
  return rep;
}

}  // namespace occm
