#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "invex/inverse.hpp"
#include "invex/pathway.hpp"

namespace {

using invex::Matrix;
using invex::SmoothMap;
using invex::Vector;
namespace inv = invex::inverse;

SmoothMap scalar(double (*fn)(double), bool positive_only) {
  SmoothMap m;
  m.dim_in = m.dim_out = 1;
  m.eval = [fn](const Vector& x) { return Vector::Constant(1, fn(x(0))); };
  if (positive_only) m.in_domain = [](const Vector& x) { return x(0) > 0.0; };
  return m;
}

double recip(double x) { return 1.0 / x; }
double exp_neg(double x) { return std::exp(-x); }
double neg_log(double y) { return -std::log(y); }
double expo(double x) { return std::exp(x); }
double logarithm(double y) { return std::log(y); }

std::vector<Vector> grid(double lo, double hi, int n) {
  std::vector<Vector> pts;
  for (int k = 0; k < n; ++k) pts.push_back(Vector::Constant(1, lo + (hi - lo) * (k + 0.5) / n));
  return pts;
}

TEST(Newton, IdentityConvergesInOneStep) {
  Vector y(2);
  y << 3.0, -1.5;
  const Vector x = inv::newton_invert(invex::identity_map(2), y, Vector::Zero(2), 1e-14, 1);
  EXPECT_LE((x - y).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Newton, ReciprocalAtHalf) {
  const Vector x = inv::newton_invert(scalar(recip, true), Vector::Constant(1, 0.5), Vector::Constant(1, 1.0),
                                      1e-13, 50);
  EXPECT_NEAR(x(0), 2.0, 1e-10);
}

TEST(Newton, RecoversPathwayLogConcentrations) {
  const auto model = invex::pathway::PathwayModel::canonical();
  const SmoothMap f = invex::pathway::forward_map(model);
  invex::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    Vector z(3);
    for (int i = 0; i < 3; ++i) z(i) = model.a[static_cast<std::size_t>(i)] + rng.uniform(0.5, 5.0);
    const Vector y = invex::pathway::inverse_cascade(model, z);
    Vector guess = y;
    guess(0) += 0.02;
    guess(2) -= 0.02;
    const Vector x = inv::newton_invert(f, z, guess, 1e-13, 100);
    ASSERT_LE((x - y).cwiseAbs().maxCoeff(), 1e-10) << z.transpose();
  }
}

TEST(Newton, SingularJacobianIsReported) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  Vector y(2);
  y << 1.0, 1.0;
  EXPECT_THROW(inv::newton_invert(invex::linear_map(a), y, Vector::Zero(2), 1e-12, 10), invex::inversion_failure);
}

TEST(Newton, IterationBudgetExhaustedCarriesBestIterate) {
  try {
    (void)inv::newton_invert(scalar(expo, false), Vector::Constant(1, 1e6), Vector::Zero(1), 1e-12, 2);
    FAIL() << "expected non_convergence";
  } catch (const invex::non_convergence& e) {
    ASSERT_EQ(e.best_iterate().size(), 1);
    EXPECT_GT(e.best_iterate()(0), 0.0);
  }
}

TEST(Newton, GuessOutsideDomainRejected) {
  EXPECT_THROW(inv::newton_invert(scalar(recip, true), Vector::Constant(1, 0.5), Vector::Constant(1, -1.0), 1e-12,
                                  10),
               invex::contract_violation);
}

TEST(ScalarInverse, SecondDerivativeExamples) {
  // g = 1/y at y = 1/2: g'' = 2 / y^3 = 16.
  EXPECT_DOUBLE_EQ(inv::scalar_inverse_second_derivative(-0.25, 0.25, -4.0), 16.0);
  // g = -ln y at y = 1: g'' = 1.
  EXPECT_DOUBLE_EQ(inv::scalar_inverse_second_derivative(-1.0, 1.0, -1.0), 1.0);
  // g = ln y at y = 1: g'' = -1.
  EXPECT_DOUBLE_EQ(inv::scalar_inverse_second_derivative(1.0, 1.0, 1.0), -1.0);
  EXPECT_THROW(inv::scalar_inverse_second_derivative(0.0, 1.0, 1.0), invex::contract_violation);
}

TEST(Identities, LinearPair) {
  Matrix a(2, 2);
  a << 2, 1, 1, 3;
  const SmoothMap f = invex::linear_map(a);
  const SmoothMap g = invex::linear_map(a.inverse());
  Vector x(2);
  x << 0.3, -0.8;
  EXPECT_LE(inv::jacobian_identity_residual(f, g, x), 1e-12);
  EXPECT_LE(inv::congruence_identity_residual(f, g, x, 0), 1e-6);
}

TEST(Identities, ReciprocalPair) {
  const auto f = scalar(recip, true);
  for (const auto& x : grid(0.2, 5.0, 20)) {
    EXPECT_LE(inv::jacobian_identity_residual(f, f, x), 1e-6);
    EXPECT_LE(inv::congruence_identity_residual(f, f, x, 0), 1e-4);
  }
}

TEST(Identities, PathwayPair) {
  const auto model = invex::pathway::PathwayModel::canonical();
  const SmoothMap f = invex::pathway::forward_map(model);
  const SmoothMap g = invex::pathway::inverse_map(model);
  const auto zs = invex::pathway::z_sampler(model, 17, 30).sample_in(g);
  for (const Vector& z : zs) {
    const Vector y = invex::pathway::inverse_cascade(model, z);
    ASSERT_LE(inv::jacobian_identity_residual(f, g, y), 1e-6);
    for (int m = 0; m < 3; ++m) ASSERT_LE(inv::congruence_identity_residual(f, g, y, m), 1e-4);
  }
}

TEST(Theorem1, ReciprocalHolds) {
  const auto f = scalar(recip, true);
  const auto pts = grid(0.2, 5.0, 50);
  const auto rep = inv::theorem1_verify(f, f, pts);
  EXPECT_EQ(rep.overall, inv::Theorem1Verdict::hypotheses_hold_conclusion_holds);
  EXPECT_TRUE(rep.residuals_within_tolerance);
  EXPECT_LE(rep.max_round_trip_residual, 1e-8);
}

TEST(Theorem1, ExpNegHolds) {
  const auto f = scalar(exp_neg, false);
  const auto g = scalar(neg_log, true);
  const auto pts = grid(-2.0, 2.0, 50);
  const auto rep = inv::theorem1_verify(f, g, pts);
  EXPECT_EQ(rep.overall, inv::Theorem1Verdict::hypotheses_hold_conclusion_holds);
  EXPECT_TRUE(rep.residuals_within_tolerance);
}

TEST(Theorem1, ExpHasIncreasingInverse) {
  const auto f = scalar(expo, false);
  const auto g = scalar(logarithm, true);
  const auto pts = grid(-2.0, 2.0, 20);
  const auto rep = inv::theorem1_verify(f, g, pts);
  EXPECT_EQ(rep.overall, inv::Theorem1Verdict::hypotheses_fail);
  for (const auto& s : rep.samples) {
    EXPECT_TRUE(s.hessian_f[0].positive_definite());
    EXPECT_FALSE(s.components[0].gradient_negative);
    EXPECT_EQ(s.components[0].hessian_g.status, invex::matcert::Definiteness::not_positive_definite);
  }
}

TEST(Theorem1, IdentityIsNotStrictlyConvex) {
  const auto id = invex::identity_map(2);
  const std::vector<Vector> pts{Vector::Zero(2), Vector::Constant(2, 0.5)};
  const auto rep = inv::theorem1_verify(id, id, pts);
  EXPECT_EQ(rep.overall, inv::Theorem1Verdict::hypotheses_fail);
  EXPECT_FALSE(rep.samples[0].hypotheses_hold());
}

TEST(Theorem1, PathwayResidualsAndStructuralZeros) {
  const auto model = invex::pathway::PathwayModel::canonical();
  const SmoothMap f = invex::pathway::forward_map(model);
  const SmoothMap g = invex::pathway::inverse_map(model);
  std::vector<Vector> pts;
  for (const Vector& z : invex::pathway::z_sampler(model, 0, 40).sample_in(g)) {
    pts.push_back(invex::pathway::inverse_cascade(model, z));
  }
  const auto rep = inv::theorem1_verify(f, g, pts);
  EXPECT_TRUE(rep.residuals_within_tolerance);
  EXPECT_LE(rep.max_round_trip_residual, 1e-8);
  EXPECT_NE(rep.overall, inv::Theorem1Verdict::conclusion_fails_despite_hypotheses);
  for (const auto& s : rep.samples) {
    // The first log concentration depends on every z; the later ones do not.
    EXPECT_TRUE(s.components[0].gradient_negative);
    EXPECT_FALSE(s.components[2].gradient_negative);
    EXPECT_EQ(s.components[0].support.size(), 3u);
    EXPECT_EQ(s.components[2].support.size(), 1u);
    for (const auto& c : s.components) {
      EXPECT_TRUE(c.hessian_g_on_support.positive_definite() ||
                  c.hessian_g_on_support.status == invex::matcert::Definiteness::indeterminate);
    }
  }
}

// Where the hypotheses hold the conclusion holds, and the pulled-back
// Hessian must be PD exactly when H_g is.
TEST(Theorem1Property, CongruenceConsistency) {
  const auto f = scalar(recip, true);
  const auto rep = inv::theorem1_verify(f, f, grid(0.1, 10.0, 200));
  for (const auto& s : rep.samples) {
    ASSERT_TRUE(s.hypotheses_hold());
    ASSERT_TRUE(s.conclusion_holds());
    ASSERT_EQ(s.components[0].hessian_g.status, s.components[0].pulled_back.status);
  }
}

TEST(Theorem1, NonInversePairRejected) {
  const auto f = scalar(recip, true);
  const auto g = scalar(logarithm, true);
  const auto pts = grid(0.5, 2.0, 5);
  try {
    (void)inv::theorem1_verify(f, g, pts);
    FAIL() << "expected invalid_pair";
  } catch (const invex::invalid_pair& e) {
    EXPECT_EQ(e.sample(), 0u);
  }
}

}  // namespace
