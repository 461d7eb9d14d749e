#include <cmath>

#include <gtest/gtest.h>

#include "rfxy/oracle.hpp"

using namespace rfxy;

TEST(Oracle, FreeRingReachesCouplingMinimum) {
  const Instance inst(Lattice(1, 4), 0.0, Angles::Zero(4), 0);
  const GridResult g = brute_force_grid(inst, {8});
  EXPECT_EQ(g.evaluated, 4096u);
  EXPECT_NEAR(g.energy, -4.0, 1e-12);
  // first all-equal configuration in enumeration order
  EXPECT_EQ(g.indices, (std::vector<int>{0, 0, 0, 0}));

  const LocalResult r = refine_from_grid(inst, g.config);
  EXPECT_NEAR(r.energy, -4.0, 1e-12);
  EXPECT_LE(r.iterations, 1);
  EXPECT_EQ(r.grad_norm, 0.0);
}

TEST(Oracle, StrongSnappedField) {
  const int k = 64;
  const double delta = 100.0;
  Angles phi(4);
  phi << 3, 17, 40, 61;
  phi *= kTwoPi / k;
  const Instance inst(Lattice(1, 4), delta, phi, 0);
  const GridResult g = brute_force_grid(inst, {k, 20'000'000});
  const LocalResult r = refine_from_grid(inst, g.config);
  const double at_field = energy_angular(phi, inst);
  EXPECT_LE(g.energy, at_field);
  EXPECT_LE(r.energy, g.energy);
  EXPECT_LE(g.energy - r.energy, 2 * delta * 4 * (1 - std::cos(std::numbers::pi / k)));
  EXPECT_GE(r.energy, lower_bound(inst));
}

TEST(Oracle, AgreesWithDirectEvaluation) {
  const Instance inst = generate_disorder(Lattice(2, 2), 1.7, 4);
  const GridResult g = brute_force_grid(inst, {4});
  EXPECT_NEAR(g.energy, energy_angular(g.config, inst), 1e-12);
  // independent exhaustive loop
  double best = INFINITY;
  Angles th(4);
  for (int code = 0; code < 256; ++code) {
    for (int i = 0, c = code; i < 4; ++i, c /= 4) th[i] = kTwoPi * (c % 4) / 4;
    best = std::min(best, energy_angular(th, inst));
  }
  EXPECT_NEAR(g.energy, best, 1e-12);
}

TEST(Oracle, NestedGridsAreMonotone) {
  const Instance inst = generate_disorder(Lattice(1, 4), 2.0, 3);
  const double e4 = brute_force_grid(inst, {4}).energy;
  const double e8 = brute_force_grid(inst, {8}).energy;
  const double e16 = brute_force_grid(inst, {16}).energy;
  EXPECT_LE(e8, e4 + 1e-12);
  EXPECT_LE(e16, e8 + 1e-12);

  const Instance sq = generate_disorder(Lattice(2, 3), 2.5, 3);
  const double s2 = brute_force_grid(sq, {2}).energy;
  const double s4 = brute_force_grid(sq, {4}).energy;
  EXPECT_LE(s4, s2 + 1e-12);
}

TEST(Oracle, RefineAndBracket) {
  const Instance inst = generate_disorder(Lattice(2, 3), 2.5, 1);
  const GridResult g = brute_force_grid(inst, {6, 20'000'000});
  const LocalResult r = refine_from_grid(inst, g.config);
  EXPECT_LE(r.energy, g.energy);
  EXPECT_GE(g.energy, lower_bound(inst));
  EXPECT_LE(g.energy, reference_configs(inst).upper_bound + 1e-12);
}

TEST(Oracle, CapRefusal) {
  const Instance inst = generate_disorder(Lattice(2, 3), 2.5, 1);
  try {
    brute_force_grid(inst, {6});
    FAIL() << "expected GridTooLarge";
  } catch (const GridTooLarge& e) {
    EXPECT_EQ(e.estimate(), 10077696u);
  }
  EXPECT_EQ(grid_size(8, 100), UINT64_MAX);
  EXPECT_EQ(grid_size(8, 4), 4096u);
}
