#pragma once

// Radial pair interactions V(x - y) and the double integrals built from them:
// pair energy H(mu) = sum_{x,y} V(x-y) mu(x) mu(y) (diagonal included),
// cross energy between two measures and the potential field sum_y V(x-y) mu(y).

#include <variant>
#include <vector>

#include "occm/grid_measure.hpp"

namespace occm {

/// V_eps(x) = (eps^2 + |x|^2)^{-1/2}
struct SmoothedCoulomb {
  double eps = 1.0;
};

/// V(x) = exp(-|x|^2 / (2 width^2))
struct GaussianKernel {
  double width = 1.0;
};

/// Piecewise linear in |x| through (radii[i], values[i]); zero beyond the last radius.
struct TabulatedKernel {
  std::vector<double> radii;
  std::vector<double> values;
};

using PairKernel = std::variant<SmoothedCoulomb, GaussianKernel, TabulatedKernel>;

/// Throws SingularKernel for eps <= 0 and InvalidArgument for malformed tables.
void validate(const PairKernel& kernel);

double evaluate(const PairKernel& kernel, double distance);

enum class ConvolutionRoute { automatic, direct, fft, sparse };

/// Phi(x) = sum_y V(x - y) m(y) at every cell centre of m's grid.
std::vector<double> potential_field(const PairKernel& kernel, const DiscreteMeasure& m,
                                    ConvolutionRoute route = ConvolutionRoute::automatic);

/// H(m) = sum_{x,y} V(x - y) m(x) m(y), including the x = y term with V(0).
double pair_energy(const PairKernel& kernel, const DiscreteMeasure& m,
                   ConvolutionRoute route = ConvolutionRoute::automatic);

/// sum_{x,y} V(x - y) a(x) b(y); the grids only need to share a lattice.
double cross_energy(const PairKernel& kernel, const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace occm
