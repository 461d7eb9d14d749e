#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "rfxy/manifold.hpp"
#include "rfxy/model.hpp"
#include "rfxy/rng.hpp"

using namespace rfxy;

namespace {

Instance constant_field(int d, int L, double delta, double phi) {
  Lattice lat(d, L);
  return Instance(lat, delta, Angles::Constant(lat.num_sites(), phi), 0);
}

Angles random_angles(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Angles a(n);
  for (auto& v : a) v = u(rng);
  return a;
}

Spins random_matrix(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Spins m(2, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

}  // namespace

TEST(Model, DisorderIsDeterministicAndInRange) {
  Lattice lat(3, 10);
  const Instance a = generate_disorder(lat, 2.0, 11);
  const Instance b = generate_disorder(lat, 2.0, 11);
  const Instance c = generate_disorder(lat, 2.0, 12);
  ASSERT_EQ(a.field_angles().size(), 1000);
  EXPECT_EQ(a.field_angles(), b.field_angles());
  EXPECT_NE(a.field_angles(), c.field_angles());
  for (double p : a.field_angles()) {
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, kTwoPi);
  }
  for (int i = 0; i < a.num_sites(); ++i) {
    EXPECT_NEAR(a.field_vectors().col(i).norm(), 1.0, 1e-12);
    EXPECT_EQ(a.field_vectors()(0, i), std::cos(a.field_angles()[i]));
  }
}

TEST(Model, DisorderCosineMeanNearZero) {
  const Instance inst = generate_disorder(Lattice(3, 32), 1.0, 5);
  double mean = 0.0;
  for (double p : inst.field_angles()) mean += std::cos(p);
  mean /= inst.num_sites();
  EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(32768.0));
}

TEST(Model, RejectsBadDelta) {
  EXPECT_THROW(generate_disorder(Lattice(1, 4), -0.1, 1), std::invalid_argument);
  EXPECT_THROW(generate_disorder(Lattice(1, 4), NAN, 1), std::invalid_argument);
  EXPECT_NO_THROW(generate_disorder(Lattice(1, 4), 0.0, 1));
}

TEST(Model, AngleRoundTrip) {
  const Angles a = random_angles(50, 3);
  const Angles b = to_angles(to_cartesian(a));
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(std::remainder(a[i] - b[i], kTwoPi), 0.0, 1e-10);
  }
}

TEST(Model, AlignedEnergies) {
  const Instance zero = constant_field(3, 10, 0.0, 0.3);
  EXPECT_DOUBLE_EQ(energy_angular(Angles::Constant(1000, 1.1), zero), -3000.0);
  EXPECT_EQ(energy_cartesian(to_cartesian(Angles::Zero(1000)), zero), -3000.0);

  const Instance toy = constant_field(1, 4, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(energy_angular(Angles::Zero(4), toy), -12.0);
}

TEST(Model, OrthogonalFieldContributesNothing) {
  const Instance inst = constant_field(1, 4, 3.0, std::numbers::pi / 2);
  Spins x(2, 4);
  x.row(0).setOnes();
  x.row(1).setZero();
  EXPECT_NEAR(energy_cartesian(x, inst), -4.0, 1e-14);
}

TEST(Model, FieldAlignedEnergy) {
  const Instance inst = generate_disorder(Lattice(3, 10), 1.7, 4);
  const EnergyTerms t = energy_terms_cartesian(inst.field_vectors(), inst);
  EXPECT_NEAR(t.field, -1000.0, 1e-9);
  EXPECT_LE(t.coupling, 3000.0);
  EXPECT_NEAR(energy_cartesian(inst.field_vectors(), inst), t.coupling - 1.7 * 1000.0,
              1e-9);
}

TEST(Model, FormulationsAgree) {
  for (auto [d, L, delta] : {std::tuple{2, 3, 1.7}, std::tuple{1, 7, 0.3},
                             std::tuple{3, 4, 3.0}, std::tuple{2, 2, 1.0}}) {
    const Instance inst = generate_disorder(Lattice(d, L), delta, 9);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Angles th = random_angles(inst.num_sites(), 100 + s);
      const double fa = energy_angular(th, inst);
      const double fc = energy_cartesian(to_cartesian(th), inst);
      EXPECT_NEAR(fa, fc, 1e-9 * (1.0 + std::abs(fa)));
    }
  }
}

TEST(Model, TermBounds) {
  const Instance inst = generate_disorder(Lattice(2, 5), 1.0, 2);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const EnergyTerms t = energy_terms_angular(random_angles(25, s), inst);
    EXPECT_GE(t.coupling, -50.0);
    EXPECT_LE(t.coupling, 50.0);
    EXPECT_GE(t.field, -25.0);
    EXPECT_LE(t.field, 25.0);
  }
}

TEST(Model, RotationInvariance) {
  const Instance inst = generate_disorder(Lattice(2, 4), 1.3, 6);
  const Angles th = random_angles(16, 8);
  const EnergyTerms base = energy_terms_angular(th, inst);
  const EnergyTerms rot =
      energy_terms_angular((th.array() + 0.77).matrix(), inst);
  const EnergyTerms flip =
      energy_terms_angular((th.array() + std::numbers::pi).matrix(), inst);
  EXPECT_NEAR(rot.coupling, base.coupling, 1e-9 * std::abs(base.coupling));
  EXPECT_NEAR(flip.field, -base.field, 1e-9 * std::abs(base.field));
}

TEST(Model, GradientExamples) {
  const Instance inst = constant_field(1, 4, 1.0, 0.0);
  const Spins g = euclidean_gradient(to_cartesian(Angles::Zero(4)), inst);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(g(0, i), -3.0);
    EXPECT_EQ(g(1, i), 0.0);
  }

  const Instance free = constant_field(1, 4, 0.0, 0.0);
  Spins alt(2, 4);
  alt << 1, -1, 1, -1, 0, 0, 0, 0;
  const Spins ga = euclidean_gradient(alt, free);
  EXPECT_TRUE(ga.isApprox(2.0 * alt));
}

TEST(Model, GradientIsLinearInField) {
  const Instance inst = generate_disorder(Lattice(2, 4), 2.5, 1);
  const Spins x = random_point(inst.lattice(), 4);
  const Spins diff = euclidean_gradient(x, inst) -
                     euclidean_gradient(x, inst.with_delta(0.0));
  EXPECT_TRUE(diff.isApprox(-2.5 * inst.field_vectors(), 1e-14));
}

TEST(Model, GradientMatchesFiniteDifference) {
  const Instance inst = generate_disorder(Lattice(2, 4), 1.3, 3);
  const Spins x = random_point(inst.lattice(), 1);
  const Spins v = random_matrix(16, 2);
  const double h = 1e-5;
  const Spins xp = x + h * v;
  const Spins xm = x - h * v;
  const double fd = (energy_cartesian(xp, inst, Check::kSkip) -
                     energy_cartesian(xm, inst, Check::kSkip)) /
                    (2 * h);
  const double an = (euclidean_gradient(x, inst).array() * v.array()).sum();
  EXPECT_NEAR(fd, an, 1e-6 * std::abs(an));
}

TEST(Model, HessianIndefinite) {
  for (int d = 1; d <= 3; ++d) {
    const Instance inst = generate_disorder(Lattice(d, 4), 1.0, 1);
    const int n = inst.num_sites();
    const Eigen::Vector2d vbar(0.6, -1.3);
    Spins c = vbar.replicate(1, n);
    const double qc = (c.array() * euclidean_hessian_vec(c, inst).array()).sum();
    const double want_c = -2.0 * d * n * vbar.squaredNorm();
    EXPECT_NEAR(qc, want_c, 1e-12 * std::abs(want_c));

    Spins dip = Spins::Zero(2, n);
    dip.col(0) = vbar;
    dip.col(inst.lattice().neighbors(0)[0]) = -vbar;
    const double qd = (dip.array() * euclidean_hessian_vec(dip, inst).array()).sum();
    EXPECT_NEAR(qd, 2.0 * vbar.squaredNorm(), 1e-12 * vbar.squaredNorm());

    EXPECT_TRUE(euclidean_hessian_vec(Spins::Zero(2, n), inst).isZero(0.0));
  }
}

TEST(Model, HessianSymmetric) {
  const Instance inst = generate_disorder(Lattice(3, 4), 1.0, 1);
  const Spins u = random_matrix(64, 1);
  const Spins v = random_matrix(64, 2);
  const double a = (u.array() * euclidean_hessian_vec(v, inst).array()).sum();
  const double b = (v.array() * euclidean_hessian_vec(u, inst).array()).sum();
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
  EXPECT_THROW(euclidean_hessian_vec(Spins::Zero(2, 3), inst), std::invalid_argument);
}

TEST(Model, AngularDerivativesMatchFiniteDifference) {
  const Instance inst = generate_disorder(Lattice(2, 3), 0.9, 2);
  const Angles th = random_angles(9, 4);
  const Angles v = random_angles(9, 5) / 10.0;
  const double h = 1e-5;
  const double fd = (energy_angular(th + h * v, inst) - energy_angular(th - h * v, inst)) /
                    (2 * h);
  EXPECT_NEAR(fd, gradient_angular(th, inst).dot(v), 1e-7);
  const Angles hd = (gradient_angular(th + h * v, inst) - gradient_angular(th - h * v, inst)) /
                    (2 * h);
  EXPECT_TRUE(hd.isApprox(hessian_vec_angular(th, v, inst), 1e-6));
}

TEST(Model, EnergyChangeMatchesDifference) {
  const Instance inst = generate_disorder(Lattice(3, 4), 2.0, 2);
  const Spins x = random_point(inst.lattice(), 1);
  const Spins y = random_point(inst.lattice(), 2);
  const double direct = energy_cartesian(y, inst) - energy_cartesian(x, inst);
  EXPECT_NEAR(energy_change(x, y, inst), direct, 1e-10 * std::abs(direct));
}

TEST(Model, ValidationCatchesNonUnitColumns) {
  const Instance inst = constant_field(1, 4, 1.0, 0.0);
  Spins x = to_cartesian(Angles::Zero(4));
  x(0, 2) = 1.1;
  EXPECT_THROW(energy_cartesian(x, inst), std::invalid_argument);
  EXPECT_NO_THROW(energy_cartesian(x, inst, Check::kSkip));
  EXPECT_THROW(energy_angular(Angles::Zero(3), inst), std::invalid_argument);
}

TEST(Model, BoundsAndReferences) {
  EXPECT_EQ(lower_bound(generate_disorder(Lattice(3, 10), 2.0, 1)), -5000.0);
  EXPECT_EQ(lower_bound(generate_disorder(Lattice(3, 32), 3.0, 1)), -196608.0);
  EXPECT_EQ(balanced_disorder(Lattice(3, 4)), 3.0);

  const Instance inst = generate_disorder(Lattice(2, 3), 2.5, 7);
  const ReferenceConfigs r = reference_configs(inst);
  EXPECT_EQ(r.aligned, Angles::Zero(9));
  EXPECT_EQ(r.field_aligned, inst.field_angles());
  const EnergyTerms t = energy_terms_angular(r.field_aligned, inst);
  EXPECT_NEAR(r.field_aligned_energy, t.coupling - 2.5 * 9, 1e-12);
  EXPECT_EQ(r.upper_bound, std::min(r.aligned_energy, r.field_aligned_energy));
  EXPECT_GE(r.upper_bound, lower_bound(inst));

  const ReferenceConfigs s = reference_configs_scanned(inst);
  EXPECT_LE(s.upper_bound, r.upper_bound);
  EXPECT_LE(s.aligned_energy, r.aligned_energy);

  const ReferenceConfigs z = reference_configs(inst.with_delta(0.0));
  EXPECT_EQ(z.aligned_energy, -18.0);
}
