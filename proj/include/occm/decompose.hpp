#pragma once

// Concentration-compactness on a single measure: peel off the most
// concentrated pieces until only dust is left, plus diagnostics for total
// disintegration and wide separation.

#include <vector>

#include "occm/grid_measure.hpp"
#include "occm/pair_kernel.hpp"
#include "occm/test_family.hpp"

namespace occm {

struct PeelParams {
  double probe_radius = 1.0;
  double dust_threshold = 0.02;
  double annulus_gap = 0.05;
  int max_components = 16;
  double growth_factor = 1.5;

  void validate() const;
};

struct PeeledComponent {
  DiscreteMeasure measure;  // recentred so that the extraction point sits at the origin
  Coord center;             // extraction point a*
  double mass = 0.0;
  double radius_used = 0.0;
  bool no_gap_found = false;  // annulus criterion never met; extracted at the largest radius
};

struct Decomposition {
  std::vector<PeeledComponent> components;  // nonincreasing mass
  DiscreteMeasure dust;
  std::vector<std::vector<double>> separation;  // min distance between component supports

  Collection collection() const;
  bool any_warning() const;
};

Decomposition peel(const DiscreteMeasure& m, const PeelParams& p);

/// Undo the recentring and add the dust back, on m's grid.
DiscreteMeasure reassemble(const Decomposition& dec, const GridSpec& grid);

/// Smallest distance between cell centres carrying mass in a and in b.
double support_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// q_m(r) for each r.
std::vector<double> disintegration_score(const DiscreteMeasure& m, const std::vector<double>& radii);

struct DisintegrationReport {
  double probe_radius = 1.0;
  std::vector<double> pair_energy;        // (a)
  std::vector<double> concentration;      // (b)
  std::vector<double> max_potential;      // (c)
  std::vector<double> alt_pair_energy;    // (d) same functional with a Gaussian kernel
  std::vector<double> lambda;             // (e)
  std::vector<double> trend_tau;          // Kendall tau of each sequence against its index
  double min_pairwise_tau = 1.0;          // smallest tau between two of the five sequences
};

DisintegrationReport equivalence_check_disintegration(const std::vector<DiscreteMeasure>& seq,
                                                      const PairKernel& kernel, const TestFunctionSpec& f,
                                                      double probe_radius = 1.0);

/// Kendall tau-b; ties in either argument count as neither concordant nor discordant.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

/// Cross energy of a and b.
double wide_separation_score(const DiscreteMeasure& a, const DiscreteMeasure& b, const PairKernel& kernel);

/// |Lambda(f, a + b) - Lambda(f, a) - Lambda(f, b)|.
double lambda_additivity_defect(const TestFunctionSpec& f, const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace occm
