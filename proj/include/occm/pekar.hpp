#pragma once

// Radial Pekar problem in d = 3:
//
//   rho(m) = sup { int int psi^2(x) psi^2(y) / |x - y| dx dy - 1/2 ||grad psi||^2 : ||psi||_2^2 = m }
//
// on a uniform radial grid 0 = r_0 < ... < r_N. The Coulomb term uses the
// shell theorem, the kinetic term staggered differences.

#include <vector>

#include "occm/grid_measure.hpp"

namespace occm {

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> psi;

  static RadialProfile uniform_grid(double r_max, int n);  // n + 1 points

  std::size_t size() const { return r.size(); }
  double dr() const { return r[1] - r[0]; }
  /// 4 pi int psi^2 r^2 dr (trapezoid).
  double mass() const;
};

double coulomb_self_energy(const RadialProfile& p);
double kinetic_energy(const RadialProfile& p);

/// Phi(r) = int psi^2(y) / |x - y| dy at |x| = r, same quadrature as the energy.
std::vector<double> coulomb_potential(const RadialProfile& p);

struct PekarParams {
  int n = 2000;
  double r_max = 0.0;  // 0: 20 / mass, so the grid scales with the profile (width ~ 1/mass)
  double tol = 1e-9;
  int max_iterations = 10000;
};

struct PekarResult {
  RadialProfile profile;
  double mass = 0.0;
  double energy = 0.0;
  double coulomb_term = 0.0;
  double kinetic_term = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool rearranged = false;   // monotone rearrangement changed the profile
  bool decay_ok = false;     // psi(r_N) < 1e-8 max psi
  std::vector<double> energy_trace;

  double virial_ratio() const { return coulomb_term / kinetic_term; }
};

/// Preconditioned projected gradient ascent on the mass sphere with an Armijo
/// line search. Throws NoConvergence only through the CLI; here the flag is set.
PekarResult solve_pekar(double mass, const PekarParams& p = {});

struct FixedPointCheck {
  double eigenvalue = 0.0;  // lowest eigenvalue of -1/2 Delta - 2 Phi
  double distance = 0.0;    // ||u - psi|| / ||psi|| for the eigenvector u scaled to the same mass
};

/// Euler-Lagrange cross-check: the maximizer is the ground state of
/// -1/2 Delta - 2 Phi[psi^2].
FixedPointCheck euler_lagrange_check(const RadialProfile& p);

struct ProfileMeasure {
  DiscreteMeasure measure;
  double truncation_loss = 0.0;
};

/// Samples psi^2(|x - center|) h^3 on a 3-D grid, renormalized to the profile
/// mass. GridTooSmall if more than 0.1% of the mass lies outside the largest
/// ball centred at `center` inside the grid.
ProfileMeasure profile_to_measure(const RadialProfile& p, const GridSpec& grid, const Coord& center = {0.0, 0.0, 0.0});

}  // namespace occm
