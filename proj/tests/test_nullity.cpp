#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace sinh_torus;

namespace {

SurfaceGrid lh_grid(double du, double half = 0.3) {
  const LHParams p{2, 1};
  const auto n = static_cast<std::size_t>(std::lround(2 * half / du)) + 1;
  return make_grid({-half, half, -half, half}, {n, n}, lh_state(p, 0, 0), lh_system(p));
}

SurfaceGrid clifford_grid(std::size_t n = 21) {
  return make_grid({-1, 1, -1, 1}, {n, n}, FrameState::standard(), {SkewMatrix4{}, 0.4});
}

}  // namespace

TEST(KillingField, ZeroMatrixGivesZero) {
  for (double f : f_B_field(lh_grid(0.1), SkewMatrix4{})) EXPECT_EQ(f, 0.0);
}

TEST(KillingField, CliffordFamilyPreservesTorus) {
  const SurfaceGrid g = clifford_grid();
  std::mt19937_64 rng(61);
  for (int n = 0; n < 5; ++n) {
    const SkewMatrix4 b = clifford_family(fixtures::uniform(rng, -2, 2), fixtures::uniform(rng, -2, 2));
    double worst = 0.0;
    for (double f : f_B_field(g, b)) worst = std::max(worst, std::abs(f));
    EXPECT_LT(worst, 1e-9);
    // e^{tB} maps the torus to itself.
    const Matrix4 e = isometry_exp(b, 0.7);
    for (std::size_t k = 0; k < g.states.size(); k += 17) {
      const Vector4 x = e * g.states[k].p;
      EXPECT_NEAR((x[0] + x[3]) * (x[0] + x[3]) + 2 * x[2] * x[2], 1.0, 1e-10);
      EXPECT_NEAR((x[0] - x[3]) * (x[0] - x[3]) + 2 * x[1] * x[1], 1.0, 1e-10);
    }
  }
}

TEST(KillingField, OwnMatrixIsXi1) {
  const SurfaceGrid g = lh_grid(0.1);
  const NodeField f = f_B_field(g, g.params.b);
  for (std::size_t n = 0; n < f.size(); ++n) EXPECT_EQ(f[n], xi_of(g.states[n], g.params.b)[0]);
}

TEST(HField, IdentitiesAreBitExact) {
  std::mt19937_64 rng(62);
  const SystemParams sp{fixtures::random_skew(rng, 1.0), 0.9};
  const SurfaceGrid g = make_grid({-0.5, 0.5, -0.5, 0.5}, {7, 7}, fixtures::random_seed(rng), sp);
  const NodeField h0 = h_theta_field(g, sp.theta);
  const NodeField h1 = h_theta_field(g, sp.theta + kPi / 2);
  for (std::size_t n = 0; n < h0.size(); ++n) {
    EXPECT_EQ(h0[n], 2 * xi_of(g.states[n], sp.b)[0]);
    EXPECT_EQ(h1[n], 2 * g.states[n].s);
  }
}

TEST(HField, RotationIsLinearInAngle) {
  std::mt19937_64 rng(63);
  const SystemParams sp{fixtures::random_skew(rng, 1.0), -0.3};
  const SurfaceGrid g = make_grid({-0.5, 0.5, -0.5, 0.5}, {5, 5}, fixtures::random_seed(rng), sp);
  const NodeField h0 = h_theta_field(g, sp.theta);
  const NodeField h1 = h_theta_field(g, sp.theta + kPi / 2);
  const double t = 1.234;
  const NodeField ht = h_theta_field(g, t);
  for (std::size_t n = 0; n < ht.size(); ++n)
    EXPECT_NEAR(ht[n], std::cos(t - sp.theta) * h0[n] + std::sin(t - sp.theta) * h1[n], 1e-14);
}

TEST(HField, LawsonHsiangAndClifford) {
  const LHParams p{2, 1};
  const LHCoordinates coords(p.m, p.k);
  SurfaceGrid exact = lh_grid(0.1);
  for (std::size_t i = 0; i < exact.nu; ++i)
    for (std::size_t j = 0; j < exact.nv; ++j)
      exact.at(i, j) = lh_state_at(p, coords, exact.u(i), exact.v(j));
  for (double h : h_theta_field(exact, exact.params.theta + kPi / 2)) EXPECT_EQ(h, 0.0);
  const SurfaceGrid g = lh_grid(0.05);
  for (double h : h_theta_field(g, g.params.theta + kPi / 2)) EXPECT_LT(std::abs(h), 1e-11);
  const SurfaceGrid c = clifford_grid(7);
  for (double t : {0.0, 0.4, 2.0})
    for (double h : h_theta_field(c, t)) EXPECT_EQ(h, 0.0);
}

TEST(HField, FiniteDifferenceCrossCheck) {
  std::mt19937_64 rng(64);
  const SystemParams sp{fixtures::random_skew(rng, 1.0), 0.5};
  const FrameState x = fixtures::random_seed(rng, 0.5);
  auto gap = [&](double du) {
    const auto n = static_cast<std::size_t>(std::lround(0.6 / du)) + 1;
    const SurfaceGrid g = make_grid({-0.3, 0.3, -0.3, 0.3}, {n, n}, x, sp);
    const NodeField a = h_theta_field(g, 1.0), b = h_theta_field_fd(g, 1.0);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < g.nu; ++i)
      for (std::size_t j = 1; j + 1 < g.nv; ++j)
        worst = std::max(worst, std::abs(a[i * g.nv + j] - b[i * g.nv + j]));
    EXPECT_TRUE(std::isnan(b[0]));
    return worst;
  };
  const double e1 = gap(0.02), e2 = gap(0.01);
  EXPECT_LT(e2, 1e-3);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Stability, ZeroField) {
  const SurfaceGrid g = lh_grid(0.1);
  EXPECT_EQ(stability_residual(g, NodeField(g.states.size(), 0.0)), 0.0);
  EXPECT_THROW(stability_residual(g, NodeField(3, 0.0)), std::invalid_argument);
}

TEST(Stability, KillingFieldsAreJacobiFields) {
  std::mt19937_64 rng(65);
  const SurfaceGrid g1 = lh_grid(0.01), g2 = lh_grid(0.005);
  for (int n = 0; n < 3; ++n) {
    const SkewMatrix4 b = fixtures::random_skew(rng, 1.0);
    const double r1 = stability_residual(g1, f_B_field(g1, b));
    const double r2 = stability_residual(g2, f_B_field(g2, b));
    EXPECT_LT(r2, 1e-3);
    EXPECT_GT(r1 / r2, 3.4);
    EXPECT_LT(r1 / r2, 4.6);
  }
}

TEST(Stability, HThetaIsJacobiField) {
  std::mt19937_64 rng(66);
  const SystemParams sp{fixtures::random_skew(rng, 1.0), 0.2};
  const FrameState x = fixtures::random_seed(rng, 0.4);
  auto res = [&](double du) {
    const auto n = static_cast<std::size_t>(std::lround(0.4 / du)) + 1;
    const SurfaceGrid g = make_grid({-0.2, 0.2, -0.2, 0.2}, {n, n}, x, sp);
    return std::array<double, 2>{stability_residual(g, h_theta_field(g, sp.theta)),
                                 stability_residual(g, h_theta_field(g, sp.theta + kPi / 2))};
  };
  const auto a = res(0.01), b = res(0.005);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(a[k] / b[k], 3.4);
    EXPECT_LT(a[k] / b[k], 4.6);
  }
}

TEST(Stability, ArbitraryFunctionIsNotJacobi) {
  const SurfaceGrid g = lh_grid(0.01);
  NodeField f(g.states.size());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = g.states[n].p[1];
  const NodeField fb = f_B_field(g, skew_from_params(0.3, 0, 0, 0, 0, 0));
  EXPECT_GT(stability_residual(g, f), 100 * stability_residual(g, fb));
}

TEST(SFamily, ThetaZeroEntries) {
  const SkewMatrix4 b = s_vanishing_family(0, 0, 0);
  EXPECT_DOUBLE_EQ(b(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(b(1, 3), -1.0);
  EXPECT_EQ(b(0, 2), 0.0);
  EXPECT_EQ(b(2, 3), 0.0);
  EXPECT_EQ(b(0, 3), 0.0);
  EXPECT_EQ(b(1, 2), 0.0);
}

TEST(SFamily, SkewAndPassesConditions) {
  std::mt19937_64 rng(67);
  for (int n = 0; n < 50; ++n) {
    const double theta = fixtures::uniform(rng, -kPi, kPi), r0 = fixtures::uniform(rng, -1, 1),
                 lambda = fixtures::uniform(rng, -3, 3);
    const SkewMatrix4 b = s_vanishing_family(theta, r0, lambda);
    const Matrix4 m = b.matrix();
    EXPECT_EQ(max_abs_diff(m, -1.0 * m.transposed()), 0.0);
    const SConditionReport rep = check_s_conditions(b, theta, r0);
    EXPECT_TRUE(rep.pass());
    for (double d : rep.defect) EXPECT_LT(d, 1e-13);
  }
}

TEST(SFamily, CliffordFamilyIsTheRZeroCase) {
  std::mt19937_64 rng(68);
  for (int n = 0; n < 10; ++n) {
    const double b1 = fixtures::uniform(rng, -2, 2), b2 = fixtures::uniform(rng, -2, 2);
    for (double theta : {0.0, 0.8, -2.1}) EXPECT_TRUE(check_s_conditions(clifford_family(b1, b2), theta, 0.0).pass());
  }
}

TEST(SConditions, PerturbedB3) {
  const SkewMatrix4 b = s_vanishing_family(0.3, 0.2, 0.5) + skew_from_params(0, 0, 0.1, 0, 0, 0);
  const SConditionReport rep = check_s_conditions(b, 0.3, 0.2);
  EXPECT_FALSE(rep.pass());
  EXPECT_NEAR(rep[SCondition::B3], 0.1, 1e-15);
}

TEST(SConditions, EntryFormMatchesPairingForm) {
  std::mt19937_64 rng(69);
  for (int n = 0; n < 30; ++n) {
    const SkewMatrix4 b = fixtures::random_skew(rng, 2.0);
    const double theta = fixtures::uniform(rng, -kPi, kPi), r0 = fixtures::uniform(rng, -1, 1);
    const SConditionReport rep = check_s_conditions(b, theta, r0);
    EXPECT_NEAR(rep[SCondition::B3], std::abs(b.b(3)), 1e-15);
    EXPECT_NEAR(rep[SCondition::B4], std::abs(b.b(4)), 1e-15);
    // ds/du, ds/dv and dxi4/dv only reduce to the entry form when xi1 = xi4 = 0.
    const SkewMatrix4 b0 = skew_from_params(b.b(1), b.b(2), 0, 0, b.b(5), b.b(6));
    const SConditionReport r0rep = check_s_conditions(b0, theta, r0);
    EXPECT_NEAR(r0rep[SCondition::A], std::abs(r0rep.lhs[0] - 2 * std::sinh(2 * r0)), 1e-12);
    EXPECT_NEAR(r0rep[SCondition::B], std::abs(r0rep.lhs[1]), 1e-12);
    EXPECT_NEAR(r0rep[SCondition::C], std::abs(r0rep.lhs[2]), 1e-12);
  }
}

TEST(SConditions, FrameCovariant) {
  std::mt19937_64 rng(70);
  for (int n = 0; n < 10; ++n) {
    const SkewMatrix4 local = fixtures::random_skew(rng, 2.0);
    const Matrix4 q = fixtures::random_rotation(rng);
    // B acting in ambient coordinates whose expression in the frame q is `local`.
    const Matrix4 gm = q * local.matrix() * q.transposed();
    const SkewMatrix4 global(SkewMatrix4::Params{gm(0, 1), gm(0, 2), gm(0, 3), gm(1, 2), gm(1, 3), gm(2, 3)});
    const SConditionReport a = check_s_conditions(local, 0.6, 0.3);
    const SConditionReport b = check_s_conditions(global, 0.6, 0.3, 1e-8, q);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a.defect[k], b.defect[k], 1e-12);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.lhs[k], b.lhs[k], 1e-12);
  }
}

TEST(SConditions, PerturbationsMoveOneCondition) {
  for (SCondition which : kAllSConditions) {
    const SConditionReport rep = check_s_conditions(
        s_vanishing_family(0.7, -0.4, 1.2) + condition_perturbation(which, 0.7, -0.4, 0.05), 0.7, -0.4);
    for (SCondition other : kAllSConditions) {
      if (other == which)
        EXPECT_NEAR(rep[other], 0.05, 1e-14);
      else
        EXPECT_LT(rep[other], 1e-14);
    }
    EXPECT_EQ(rep.worst(), which);
  }
}

TEST(SConditions, LawsonHsiangSeedInItsOwnFrame) {
  const LHParams p{2, 1};
  const FrameState seed = lh_state(p, 0, 0);
  const SConditionReport rep = check_s_conditions(lh_B(2, 1), kLHTheta, -0.5 * std::log(2.0), 1e-8,
                                                  seed.frame_matrix());
  EXPECT_TRUE(rep.pass());
  const SurfaceGrid g = make_grid({-3, 3, -3, 3}, {31, 31}, seed, lh_system(p));
  EXPECT_LT(max_abs_s(g), 1e-7);
}

TEST(SConditions, FamilyKeepsSZeroAndPerturbationDoesNot) {
  const double theta = 0.5, r0 = 0.3;
  const FrameState seed = FrameState::standard(r0);
  const SkewMatrix4 b = s_vanishing_family(theta, r0, -0.8);
  const SurfaceGrid g = make_grid({-2, 2, -2, 2}, {21, 21}, seed, {b, theta});
  EXPECT_LT(max_abs_s(g), 1e-6);
  const SkewMatrix4 bad = b + condition_perturbation(SCondition::C, theta, r0, 0.05);
  const SurfaceGrid h = make_grid({-2, 2, -2, 2}, {21, 21}, seed, {bad, theta});
  EXPECT_GT(max_abs_s(h), 1e-3);
}

TEST(Symmetry, CliffordAndFamilySeed) {
  EXPECT_EQ(symmetry_defect(clifford_grid(11)), 0.0);
  const SurfaceGrid g = make_grid({-2, 2, -2, 2}, {41, 41}, FrameState::standard(0.5),
                                  {s_vanishing_family(0, 0.5, 0), 0.0});
  EXPECT_LT(symmetry_defect(g), 1e-7);
}

TEST(Symmetry, NonVanishingSGeneralSeed) {
  // Only xi1 = s = xi4 = 0 at the seed is assumed, not s == 0 everywhere.
  const SkewMatrix4 b = skew_from_params(0.7, -0.4, 0, 0, 1.1, 0.3);
  const SurfaceGrid g = make_grid({-2, 2, -2, 2}, {41, 41}, FrameState::standard(-0.2), {b, 1.3});
  ASSERT_GT(max_abs_s(g), 1e-2);
  EXPECT_LT(symmetry_defect(g), 1e-7);
}

TEST(Symmetry, SeedViolationsAreErrors) {
  const SkewMatrix4 b = s_vanishing_family(0, 0.5, 0);
  const SurfaceGrid g = make_grid({-1, 1, -1, 1}, {5, 5}, FrameState::standard(0.5, 0.2), {b, 0.0});
  try {
    symmetry_defect(g);
    FAIL() << "expected SeedConditionError";
  } catch (const SeedConditionError& e) {
    EXPECT_NE(std::string(e.what()).find("s = 0.2"), std::string::npos) << e.what();
  }
  const SurfaceGrid h = make_grid({-1, 1, -1, 1}, {5, 5}, FrameState::standard(),
                                  {skew_from_params(0, 0, 0.3, 0, 0, 0), 0.0});
  EXPECT_THROW(symmetry_defect(h), SeedConditionError);
  const SurfaceGrid k = make_grid({-1, 0.5, -1, 1}, {5, 5}, FrameState::standard(), {});
  EXPECT_THROW(symmetry_defect(k), std::invalid_argument);
}
