#pragma once

// Donsker-Varadhan rate I(mu) = 1/2 ||grad sqrt(dmu/dx)||^2 on grids, its
// variational (dual) form, localization and subadditivity checks, and the
// Feynman-Kac test functional built from g = c + sum of cut-off bumps.

#include <span>
#include <string>
#include <vector>

#include "occm/grid_measure.hpp"
#include "occm/pair_kernel.hpp"

namespace occm {

struct RateParams {
  double jump_ratio_cap = 1e6;
  double relative_floor = 1e-6;  // the larger cell of a flagged pair must exceed this * max weight
};

struct RateReport {
  double value = 0.0;
  bool infinite = false;
  std::string method = "direct";
  double h = 0.0;
  double slack = 0.0;  // |central-difference value - graph Dirichlet form|
};

RateReport rate_I(const DiscreteMeasure& m, const RateParams& p = {});

/// 1/2 sum over grid edges of |sqrt(rho_x) - sqrt(rho_y)|^2 / h^2 * h^d.
double dirichlet_form(const DiscreteMeasure& m);

double rate_collection(const Collection& xi, const RateParams& p = {});

/// C^2 cutoff: 1 on [0, 1], 0 on [2, inf), quintic smoothstep in between.
double cutoff(double t);
double cutoff_d1(double t);
double cutoff_d2(double t);

/// u(y) = amplitude * exp(-|y|^2 / (2 width^2)) * cutoff(|y| / radius), centred at `at`.
struct Bump {
  double amplitude = 1.0;
  double width = 1.0;
  double radius = 1.0;
  Coord at;
};

/// g(x) = c + sum_i u_i(x - a_i).
struct TestPotential {
  double c = 1.0;
  std::vector<Bump> bumps;

  double value(std::span<const double> x) const;
  double laplacian(std::span<const double> x) const;
  /// Five-point (2d + 1) stencil Laplacian with step h.
  double stencil_laplacian(std::span<const double> x, double h) const;
  /// (-1/2 Delta g) / g, exact Laplacian.
  double drift(std::span<const double> x) const;
};

struct DualResult {
  double value = 0.0;
  std::size_t best = 0;
  double rate = 0.0;   // rate_I of the same measure
  double slack = 0.0;  // bound on dual - rate from the discretization
};

/// max_j sum_x (-1/2 Delta_h g_j)(x) / g_j(x) m(x) with the graph Laplacian of
/// m's grid (no flux through the boundary). Never exceeds dirichlet_form(m).
DualResult dual_rate(const DiscreteMeasure& m, const std::vector<TestPotential>& candidates);

/// Single-bump candidates over logarithmic (amplitude, width) sweeps, a grid of
/// centres around the mean of m and c in {0.01, 0.1, 1}.
std::vector<TestPotential> dual_candidate_sweep(const DiscreteMeasure& m, int n_amplitude = 11, int n_width = 13);

struct ImsReport {
  double sum_local = 0.0;
  double total = 0.0;
  double excess = 0.0;       // sum_local - total
  double fitted_c = 0.0;     // excess * r_n
  double gradient_term = 0.0;  // 1/2 int rho sum |grad phi_i|^2
};

/// Localizes m with phi(|x - c_i| / r_n)^2 around each centre. Centres closer
/// than 4 r_n throw OverlapError.
ImsReport ims_localization_check(const DiscreteMeasure& m, const std::vector<Coord>& centers, double r_n);

struct SubadditivityReport {
  double mixture_rate = 0.0;
  double component_rates = 0.0;  // sum_j I(alpha_j)
  double filler_rate = 0.0;      // (1 - sum p_j) I(lambda_M)
  double bound = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// Places the components of xi along the first axis with gaps of `separation`
/// and fills the missing mass with a centred Gaussian of variance M. The
/// spacing and dimension of an empty xi come from the last two arguments.
SubadditivityReport subadditivity_check(const Collection& xi, double M, double separation = 20.0,
                                        double h_if_empty = 0.1, int dim_if_empty = 1);

/// sum_x (-1/2 Delta_h g)(x) / g(x) m(x) with the free-space stencil.
double fk_functional(const TestPotential& g, const DiscreteMeasure& m);

struct ShiftSearchResult {
  double value = 0.0;
  std::vector<Coord> shifts;  // one entry per bump; empty entry = bump parked out of range
  double lipschitz = 0.0;     // bound on the slope of (-1/2 Delta g)/g for one bump
  std::size_t tuples = 0;
};

/// Maximizes fk_functional over placements of the template's bumps on the
/// points of `shift_lattice`, pairwise at least 4 * radius apart. Bumps whose
/// reach (2 * radius) misses the support of m are parked: they do not change
/// the value. Throws EmptyAdmissibleSet if the lattice cannot host all bumps.
ShiftSearchResult fk_sup_over_shifts(const TestPotential& tmpl, const DiscreteMeasure& m,
                                     const GridSpec& shift_lattice);

/// rho_tilde - sum_j [H_eps(alpha_j) - I(alpha_j)].
double tilted_rate_J(const Collection& xi, double rho_tilde, double eps);

}  // namespace occm
