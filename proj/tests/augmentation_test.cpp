#include <gtest/gtest.h>

#include <random>

#include "cbfaug/augmentation.hpp"
#include "oracles.hpp"

using namespace cbfaug;

namespace {

struct Case {
  Plant plant;
  ConstraintSpec spec;
  Matrix K;
};

Case double_integrator(double alpha) {
  Matrix A(2, 2), B(2, 1), C(1, 2), Cl(1, 2), K(1, 2);
  A << 0, 1, 0, 0;
  B << 0, 1;
  C << 1, 0;
  Cl << 0, 1;
  K << 1, 2;
  return {Plant::make(A, B, C, Matrix(), Cl), {Vector::Constant(1, -1), Vector::Constant(1, 1), {{-alpha}}}, K};
}

// Random two-input plant with two relative-degree-one limited outputs.
Case random_case(std::mt19937_64& rng) {
  const Matrix A = oracle::random_matrix(rng, 3, 3);
  const Matrix B = oracle::random_matrix(rng, 3, 2);
  const Matrix Cl = oracle::random_matrix(rng, 2, 3);
  const Plant p = Plant::make(A, B, Matrix::Identity(3, 3), Matrix(), Cl);
  Vector lo(2), hi(2);
  lo << -1.0, -0.5;
  hi << 0.7, 2.0;
  return {p, {lo, hi, {{-1.2}, {-2.0}}}, oracle::random_matrix(rng, 2, 3)};
}

}  // namespace

TEST(SwitchingMask, BitsRoundTrip) {
  const auto m = SwitchingMask::from_bits("10");
  EXPECT_TRUE(m[0]);
  EXPECT_FALSE(m[1]);
  EXPECT_EQ(m.bits(), "10");
  EXPECT_TRUE(m.any());
  EXPECT_FALSE(SwitchingMask::none(3).any());
  EXPECT_THROW(SwitchingMask::from_bits("1x"), InputError);
  const auto all = SwitchingMask::enumerate(2);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].bits(), "00");
  EXPECT_EQ(all[1].bits(), "10");
  EXPECT_EQ(all[2].bits(), "01");
  EXPECT_EQ(all[3].bits(), "11");
  EXPECT_EQ(SwitchingMask::from_bits("11").matrix(), Matrix::Identity(2, 2));
}

TEST(Augmentation, InactiveInsideLimits) {
  const auto c = double_integrator(2.0);
  const auto d = build_design(c.plant, c.spec);
  Vector x(2);
  x << 0.0, 0.0;
  const Vector u = -c.K * x;
  EXPECT_EQ(pi_from_estimate(x, u, d, c.spec).norm(), 0.0);
  EXPECT_FALSE(switching_delta(x, u, d, c.spec).any());
}

TEST(Augmentation, LowerBoundActiveClosedForm) {
  // v_hat = -0.8, u_bl = -2: alpha v + u_bl = -3.6 < alpha v_min = -2, so pi = 1.6.
  const auto c = double_integrator(2.0);
  const auto d = build_design(c.plant, c.spec);
  Vector x(2);
  x << 0.4, -0.8;
  const Vector u = Vector::Constant(1, -2.0);
  EXPECT_NEAR(pi_from_estimate(x, u, d, c.spec)(0), 1.6, 1e-14);
  EXPECT_TRUE(switching_delta(x, u, d, c.spec)[0]);
}

TEST(Augmentation, ZeroSlackIsInactive) {
  const auto c = double_integrator(2.0);
  const auto d = build_design(c.plant, c.spec);
  Vector x(2);
  x << 0.0, -0.5;
  const Vector u = Vector::Constant(1, -1.0);  // 2*(-0.5) - 1 = -2 exactly on the boundary
  EXPECT_FALSE(switching_delta(x, u, d, c.spec).any());
  EXPECT_EQ(pi_from_estimate(x, u, d, c.spec)(0), 0.0);
}

TEST(Augmentation, ModifiedConstraintHoldsAfterAugmentation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng);
    const auto d = build_design(c.plant, c.spec);
    const Vector x = 3.0 * oracle::random_matrix(rng, 3, 1).col(0);
    const Vector u = -c.K * x;
    const Vector y = d.H_x * x + d.H_pi * (u + pi_from_estimate(x, u, d, c.spec));
    const Vector lo = d.alpha.cwiseProduct(c.spec.y_min);
    const Vector hi = d.alpha.cwiseProduct(c.spec.y_max);
    const double tol = 1e-9 * (1.0 + y.cwiseAbs().maxCoeff());
    EXPECT_TRUE(((y - lo).array() >= -tol).all() && ((hi - y).array() >= -tol).all()) << "trial " << trial;
  }
}

TEST(Augmentation, ClosedFormMatchesQpOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = random_case(rng);
    const auto d = build_design(c.plant, c.spec);
    const Vector x = 3.0 * oracle::random_matrix(rng, 3, 1).col(0);
    const Vector u = -c.K * x;
    const Vector closed = pi_from_estimate(x, u, d, c.spec);
    const Vector qp = qp_oracle(x, u, d, c.spec);
    EXPECT_LE((closed - qp).norm(), 1e-8 * (1.0 + closed.norm())) << "trial " << trial;
  }
}

TEST(Augmentation, PwaFormReproducesControl) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng);
    const auto d = build_design(c.plant, c.spec);
    const Vector x = 3.0 * oracle::random_matrix(rng, 3, 1).col(0);
    const Vector u = -c.K * x;
    const auto f = pwa_form(x, c.K, d, c.spec);
    const Vector pwa = -(c.K + f.K_cbf) * x + f.F * f.y_cmd_sel;
    const Vector direct = u + pi_from_estimate(x, u, d, c.spec);
    EXPECT_LE((pwa - direct).norm(), 1e-9 * (1.0 + direct.norm())) << "trial " << trial;
  }
}

TEST(Augmentation, AllActiveCancelsBaselineGain) {
  std::mt19937_64 rng(13);
  const auto c = random_case(rng);
  const auto d = build_design(c.plant, c.spec);
  const Matrix total = c.K + cbf_feedback_gain(SwitchingMask::all(2), c.K, d);
  EXPECT_LE((total - d.H_pi_inv * d.H_x).norm(), 1e-10 * (1.0 + total.norm()));
  EXPECT_EQ(cbf_feedback_gain(SwitchingMask::none(2), c.K, d).norm(), 0.0);
}

TEST(QpOracle, RejectsLargeProblems) {
  const Matrix A = Matrix::Identity(4, 4) * -1.0;
  const Plant p = Plant::make(A, Matrix::Identity(4, 4), Matrix::Identity(4, 4), Matrix(), Matrix::Identity(4, 4));
  const ConstraintSpec spec{Vector::Constant(4, -1), Vector::Constant(4, 1), {{-1.0}, {-1.0}, {-1.0}, {-1.0}}};
  const auto d = build_design(p, spec);
  EXPECT_THROW(qp_oracle(Vector::Zero(4), Vector::Zero(4), d, spec), InputError);
}
