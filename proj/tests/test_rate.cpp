#include <cmath>
#include <random>

#include "doctest.h"
#include "occm/error.hpp"
#include "occm/rate.hpp"

using namespace occm;

namespace {

DiscreteMeasure gaussian(int d, double var, double mass = 1.0) {
  const double s = std::sqrt(var);
  return gaussian_measure(GridSpec::centered(d, s / 20.0, 7.0 * s), Coord(d, 0.0), var, mass).measure;
}

// A smooth random density on a 1-D grid: a few Gaussian bumps with random
// positions, widths and weights.
DiscreteMeasure smooth_random(std::mt19937_64& rng, const GridSpec& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(rng) * 3);
  std::vector<DiscreteMeasure> parts;
  std::vector<double> coef;
  for (int i = 0; i < n; ++i) {
    parts.push_back(gaussian_measure(g, Coord{-3.0 + 6.0 * u(rng)}, 0.3 + u(rng)).measure);
    coef.push_back(0.1 + u(rng));
  }
  double s = 0;
  for (double c : coef) s += c;
  std::vector<MixtureTerm> t;
  for (int i = 0; i < n; ++i) t.push_back({coef[i] / s, parts[i]});
  return mixture(t);
}

}  // namespace

TEST_CASE("Gaussian closed form d / (8 sigma^2)") {
  for (int d : {1, 2, 3}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      if (d == 3 && sigma != 1.0) continue;  // the acceptance suite covers the full grid
      const auto r = rate_I(gaussian(d, sigma * sigma));
      CHECK_FALSE(r.infinite);
      const double exact = d / (8.0 * sigma * sigma);
      CHECK(std::abs(r.value - exact) / exact < 0.01);
    }
  }
}

TEST_CASE("rate is shift invariant and homogeneous") {
  const auto m = gaussian(2, 1.0);
  const Index a[2] = {17, -5};
  CHECK(rate_I(shift(m, a)).value == rate_I(m).value);
  for (double c : {0.5, 0.1, 1.0}) {
    CHECK(rate_I(m.scaled(c)).value == doctest::Approx(c * rate_I(m).value).epsilon(1e-13));
  }
}

TEST_CASE("non-H1 inputs are flagged infinite") {
  const auto g = GridSpec::centered(1, 0.1, 2.0);
  const auto r = rate_I(DiscreteMeasure::point_mass(g, Coord{0.0}));
  CHECK(r.infinite);
  CHECK(std::isinf(r.value));
  CHECK_FALSE(rate_I(DiscreteMeasure::zero(g)).infinite);
  CHECK(rate_I(DiscreteMeasure::zero(g)).value == 0.0);
}

TEST_CASE("collection rate") {
  CHECK(rate_collection(Collection{}) == 0.0);
  const auto m = gaussian(1, 1.0);
  CHECK(rate_collection(Collection({m})) == rate_I(m).value);
  const auto half = gaussian(1, 1.0, 0.5);
  CHECK(rate_collection(Collection({half, half})) == doctest::Approx(0.125).epsilon(0.01));
}

TEST_CASE("convexity spot check") {
  std::mt19937_64 rng(21);
  const auto g = GridSpec::centered(1, 0.05, 8.0);
  for (int i = 0; i < 10; ++i) {
    const auto a = smooth_random(rng, g), b = smooth_random(rng, g);
    const MixtureTerm t[2] = {{0.5, a}, {0.5, b}};
    const auto mid = mixture(t);
    CHECK(rate_I(mid).value <= 0.5 * rate_I(a).value + 0.5 * rate_I(b).value + rate_I(mid).slack);
  }
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(2.0) == 0.0);
  CHECK(cutoff(3.0) == 0.0);
  CHECK(cutoff(1.5) == doctest::Approx(0.5));
  for (double t : {1.0, 2.0}) {
    CHECK(cutoff_d1(t) == doctest::Approx(0.0));
    CHECK(cutoff_d2(t) == doctest::Approx(0.0));
  }
  const double e = 1e-6;
  for (double t : {1.2, 1.5, 1.9}) {
    CHECK(cutoff_d1(t) == doctest::Approx((cutoff(t + e) - cutoff(t - e)) / (2 * e)).epsilon(1e-6));
    CHECK(cutoff_d2(t) == doctest::Approx((cutoff_d1(t + e) - cutoff_d1(t - e)) / (2 * e)).epsilon(1e-6));
  }
}

TEST_CASE("test potential Laplacian matches a fine stencil") {
  const TestPotential g{0.5, {Bump{2.0, 0.8, 1.2, Coord{0.3, -0.2, 0.1}}, Bump{1.0, 0.5, 0.6, Coord{3.0, 0.0, 0.0}}}};
  for (const Coord& x : {Coord{0.0, 0.0, 0.0}, Coord{1.1, 0.4, -0.3}, Coord{2.6, 0.2, 0.1}, Coord{0.3, -0.2, 0.1}}) {
    CHECK(g.laplacian(x) == doctest::Approx(g.stencil_laplacian(x, 1e-3)).epsilon(1e-4));
  }
  const TestPotential flat{2.0, {}};
  CHECK(flat.laplacian(Coord{1.0, 2.0, 3.0}) == 0.0);
}

TEST_CASE("weak duality and sweep quality") {
  std::mt19937_64 rng(22);
  const auto g = GridSpec::centered(1, 0.05, 8.0);
  for (int i = 0; i < 8; ++i) {
    const auto m = smooth_random(rng, g);
    const auto res = dual_rate(m, dual_candidate_sweep(m, 5, 5));
    CHECK(res.value <= res.rate + res.slack);
    CHECK(res.value <= dirichlet_form(m) + 1e-12);
  }
  const auto m = gaussian(1, 1.0);
  const auto zero = dual_rate(m, {TestPotential{1.0, {Bump{0.0, 1.0, 2.0, Coord{0.0}}}}});
  CHECK(zero.value == 0.0);
  const auto best = dual_rate(m, dual_candidate_sweep(m));
  CHECK(best.value >= 0.85 * 0.125);
  CHECK(best.value <= best.rate + best.slack);
}

TEST_CASE("IMS localization") {
  const auto m = gaussian(1, 1.0);
  const auto whole = ims_localization_check(m, {Coord{0.0}}, 100.0);
  CHECK(std::abs(whole.sum_local - whole.total) < 1e-6);
  const auto none = ims_localization_check(m, {}, 1.0);
  CHECK(none.sum_local == 0.0);
  CHECK_THROWS_AS(ims_localization_check(m, {Coord{0.0}, Coord{1.0}}, 1.0), Error);

  // Two wide bumps; the localization error scales like 1/r_n.
  const auto grid = GridSpec::covering(0.05, Coord{-60.0}, Coord{160.0});
  const auto a = gaussian_measure(grid, Coord{0.0}, 25.0).measure;
  const auto b = gaussian_measure(grid, Coord{100.0}, 25.0).measure;
  const MixtureTerm t[2] = {{0.5, a}, {0.5, b}};
  const auto two = mixture(t);
  const auto r1 = ims_localization_check(two, {Coord{0.0}, Coord{100.0}}, 4.0);
  const auto r2 = ims_localization_check(two, {Coord{0.0}, Coord{100.0}}, 8.0);
  CHECK(r1.excess > 0.0);
  CHECK(r2.excess < r1.excess);
  CHECK(r1.sum_local <= r1.total + r1.gradient_term * 2.0);
}

TEST_CASE("subadditivity") {
  const auto one = gaussian(1, 1.0);
  const auto single = subadditivity_check(Collection({one}), 1.0);
  CHECK(single.holds);
  CHECK(single.mixture_rate == doctest::Approx(single.component_rates).epsilon(1e-3));

  const auto half = gaussian(1, 1.0, 0.5);
  const auto r = subadditivity_check(Collection({half}), 100.0, 20.0);
  CHECK(r.holds);
  CHECK(r.filler_rate == doctest::Approx(0.5 / 800.0).epsilon(0.02));

  const auto empty = subadditivity_check(Collection{}, 4.0, 20.0, 0.1, 1);
  CHECK(empty.filler_rate == doctest::Approx(1.0 / 32.0).epsilon(0.01));
  CHECK(empty.holds);
}

TEST_CASE("Feynman-Kac functional") {
  const auto g = GridSpec::centered(2, 0.1, 3.0);
  const auto m = gaussian_measure(g, Coord{0.0, 0.0}, 0.5).measure;
  CHECK(fk_functional(TestPotential{1.0, {}}, m) == 0.0);

  const TestPotential pot{0.5, {Bump{1.5, 0.7, 1.0, Coord{0.2, 0.0}}}};
  const auto pm = DiscreteMeasure::point_mass(g, Coord{0.5, -0.3});
  const Coord x0{0.5, -0.3};
  CHECK(fk_functional(pot, pm) == doctest::Approx(-0.5 * pot.stencil_laplacian(x0, 0.1) / pot.value(x0)));

  const Index a[2] = {7, 3};
  TestPotential moved = pot;
  moved.bumps[0].at = {0.2 + 0.7, 0.0 + 0.3};
  CHECK(fk_functional(moved, shift(m, a)) == doctest::Approx(fk_functional(pot, m)).epsilon(1e-12));
}

TEST_CASE("sup over shifts") {
  const auto g = GridSpec::centered(1, 0.05, 6.0);
  const auto m = gaussian_measure(g, Coord{0.0}, 1.0).measure;
  const auto lattice = GridSpec::centered(1, 0.25, 10.0);
  CHECK(fk_sup_over_shifts(TestPotential{1.0, {}}, m, lattice).value == 0.0);

  const TestPotential tmpl{1.0, {Bump{3.0, 1.0, 2.0, Coord{0.0}}}};
  const auto far = DiscreteMeasure::point_mass(GridSpec::centered(1, 0.05, 200.0), Coord{150.0});
  CHECK(fk_sup_over_shifts(tmpl, far, lattice).value == 0.0);

  const auto res = fk_sup_over_shifts(tmpl, m, lattice);
  CHECK(res.value > 0.0);
  // Exhaustive oracle over the same lattice.
  double best = 0.0;
  Coord arg;
  for (Index i = 0; i < lattice.size(); ++i) {
    TestPotential g1 = tmpl;
    g1.bumps[0].at = lattice.center(i);
    const double v = fk_functional(g1, m);
    if (v > best) {
      best = v;
      arg = lattice.center(i);
    }
  }
  CHECK(res.value == doctest::Approx(best));
  REQUIRE(res.shifts[0].size() == 1);
  CHECK(std::abs(res.shifts[0][0]) <= 0.25);
  CHECK(res.lipschitz > 0.0);

  const TestPotential two{1.0, {Bump{1.0, 1.0, 2.0, Coord{0.0}}, Bump{1.0, 1.0, 2.0, Coord{0.0}}}};
  CHECK_THROWS_AS(fk_sup_over_shifts(two, m, GridSpec::centered(1, 0.25, 1.0)), Error);
}

TEST_CASE("tilted rate J") {
  CHECK(tilted_rate_J(Collection{}, 0.2, 0.1) == 0.2);
  const auto g = GridSpec::centered(3, 0.25, 4.0);
  const auto big = gaussian_measure(g, Coord{0, 0, 0}, 1.0, 0.9).measure;
  const auto tiny = gaussian_measure(g, Coord{0, 0, 0}, 1.0, 0.01).measure;
  const double with = tilted_rate_J(Collection({big, tiny}), 0.2, 0.1);
  const double without = tilted_rate_J(Collection({big}), 0.2, 0.1);
  const double term = pair_energy(SmoothedCoulomb{0.1}, tiny) - rate_I(tiny).value;
  CHECK((with > without) == (term < 0.0));
  CHECK(with == doctest::Approx(without - term));
}
