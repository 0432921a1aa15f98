#pragma once

// Brownian paths, occupation measures, the Coulomb-tilted path measure
// dP^_t ~ exp{beta (1/t) int int V_eps(W_s - W_r) ds dr} dP and Monte Carlo
// checks of the Feynman-Kac and Khasminskii bounds.

#include <cstdint>
#include <random>
#include <vector>

#include "occm/decompose.hpp"
#include "occm/grid_measure.hpp"
#include "occm/pekar.hpp"
#include "occm/rate.hpp"
#include "occm/test_family.hpp"

namespace occm {

/// Independent stream `stream` of the generator family keyed by `seed`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// W_0 = 0, W_1, ..., W_N stored one array per axis.
struct PathSample {
  int dim = 3;
  double dt = 0.01;
  std::vector<double> axis[3];

  std::size_t steps() const { return axis[0].empty() ? 0 : axis[0].size() - 1; }
  double t() const { return static_cast<double>(steps()) * dt; }
  Coord point(std::size_t i) const;
};

PathSample sample_path(int dim, std::size_t n_steps, double dt, std::uint64_t seed, std::uint64_t stream = 0);
PathSample sample_path(int dim, std::size_t n_steps, double dt, std::mt19937_64& rng);

/// Mass 1/N in the cell of each W_i, i = 1..N, on a grid of spacing h
/// covering the path.
DiscreteMeasure occupation_measure(const PathSample& p, double h);

/// Same on a given grid, extended if the path leaves it.
DiscreteMeasure occupation_measure(const PathSample& p, const GridSpec& grid);

/// (dt^2 / t) sum_{i,j=1..N} V_eps(W_i - W_j), diagonal included.
double energy_H(const PathSample& p, double eps);

/// Change of energy_H when points first..first+count-1 are replaced by
/// `replacement` (one array per axis, `count` entries each).
double delta_energy_H(const PathSample& p, std::size_t first, std::size_t count,
                      const std::vector<double> (&replacement)[3], double eps);

/// max_u u^{1/2} / (sqrt(1 + u^2) (u + sqrt(1 + u^2))); Y_eps(x) <= C sqrt(eps) |x|^{-3/2}.
double y_eps_constant();

/// 1/|x| - V_eps(x) in a cancellation-free form.
double y_eps(double r, double eps);

struct YEpsReport {
  double remainder = 0.0;  // (dt^2/t) sum_{i != j} Y_eps(W_i - W_j)
  double bound = 0.0;      // (dt^2/t) sum_{i != j} C sqrt(eps) |W_i - W_j|^{-3/2}
  std::size_t coincident = 0;
};

/// Coincident points (distance below coincidence_h / 2) use the capped value
/// C sqrt(eps) (coincidence_h / 2)^{-3/2} in both sums. coincidence_h <= 0
/// means sqrt(dt).
YEpsReport y_eps_energy(const PathSample& p, double eps, double coincidence_h = 0.0);

struct McReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct KhasminskiiReport {
  McReport eta;            // max over starting points of E^x[lambda int_0^1 |W|^{-3/2}]
  McReport moment;         // E^0[exp(lambda int_0^1 |W|^{-3/2})]
  McReport first_moment0;  // E^0[int_0^1 |W|^{-3/2}] (no lambda), for the 4c anchor
  std::vector<double> eta_by_start;
  double bound = 0.0;      // 1 / (1 - eta)
  bool eta_too_large = false;
  bool holds = false;      // moment <= bound + 3 SE (only meaningful when eta < 1)
};

struct KhasminskiiParams {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 64;  // per unit time
  double lambda = 0.05;
  std::uint64_t seed = 1;
  std::vector<Coord> starts = {{0, 0, 0}, {0.25, 0, 0}, {0.5, 0, 0}, {1, 0, 0}};
};

KhasminskiiReport khasminskii_check(const KhasminskiiParams& p);

/// c = E|Z|^{-3/2} for a standard normal Z in R^3.
double inverse_three_halves_moment();

/// E^x[(1/delta) int_0^delta |W_s|^{-3/2} ds] for Brownian motion in R^3 with
/// |x| = r. Equals 4c delta^{-3/4} at r = 0 and tends to r^{-3/2} for r >> sqrt(delta).
double inverse_three_halves_average(double r, double delta);

struct FkReport {
  McReport estimate;    // E^0[exp int_0^t (-Delta g / 2g)(W_s) ds]
  McReport identity;    // E^0[g(W_t) exp int ...]; equals g(0) exactly in continuous time
  double bound = 0.0;   // g(0) / c
  bool holds = false;
};

FkReport fk_bound_check(const TestPotential& g, std::size_t n_paths, std::size_t n_steps, double dt,
                        std::uint64_t seed, int dim = 3);

struct TiltConfig {
  double eps = 0.1;
  double beta = 1.0;
  double bridge_weight = 0.8;  // rest: endpoint pivot
  int n_sweeps = 200;
  int burn_in = 50;
  int thin = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// min(1, exp(beta * dH)); the proposals are reversible for Wiener measure.
double acceptance_probability(double beta, double delta_h);

class TiltedChain {
 public:
  TiltedChain(const TiltConfig& cfg, int dim, std::size_t n_steps, double dt, std::uint64_t stream);

  /// One sweep = enough moves to touch about N points.
  void sweep();
  bool bridge_move();
  bool pivot_move();

  const PathSample& state() const { return path_; }
  double energy() const { return energy_; }
  double acceptance_rate() const;
  std::size_t moves() const { return moves_; }

 private:
  bool try_replace(std::size_t first, std::vector<double> (&repl)[3]);

  TiltConfig cfg_;
  PathSample path_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  double energy_ = 0.0;
  std::size_t moves_ = 0;
  std::size_t accepted_ = 0;
};

struct ChainOutput {
  std::vector<PathSample> samples;
  std::vector<double> energies;
  double acceptance = 0.0;
};

/// Runs `chains` independent chains (stream = chain index) and collects the
/// states emitted every `thin` sweeps after burn-in.
std::vector<ChainOutput> tilted_sampler(const TiltConfig& cfg, std::size_t n_steps, double dt, int dim, int chains);

struct TubeRow {
  double t = 0.0;
  std::vector<double> distances;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
  double mean_energy = 0.0;
  double acceptance = 0.0;
};

struct TubeParams {
  std::vector<double> t_list = {2.0, 4.0, 8.0};
  double dt = 0.02;
  int chains = 32;
  double grid_h = 0.5;
  MetricParams metric{16};
  PeelParams peel{};
};

/// For each t: run the tilted chains, peel each emitted occupation measure and
/// record metric_D to {mu_0}, with mu_0 the profile sampled on the same lattice.
std::vector<TubeRow> tube_experiment(const TiltConfig& cfg, const TubeParams& p, const RadialProfile& profile);

struct FreeEnergyReport {
  McReport estimate;  // (1/t) log mean exp(beta H)
  double t = 0.0;
  double diagonal = 0.0;  // dt / eps, the diagonal part of every H
  double mean_y_bound = 0.0;
};

/// Direct importance sampling of Z_t with a log-sum-exp accumulator and
/// jackknife error bars.
FreeEnergyReport free_energy_estimate(const TiltConfig& cfg, double t, double dt, std::size_t n_paths);

double quantile(std::vector<double> v, double q);

}  // namespace occm
