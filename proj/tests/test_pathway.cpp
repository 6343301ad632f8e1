#include <cmath>

#include <gtest/gtest.h>

#include "invex/matcert.hpp"
#include "invex/pathway.hpp"

namespace {

using invex::Matrix;
using invex::Vector;
namespace pw = invex::pathway;

const pw::PathwayModel kModel = pw::PathwayModel::canonical();

TEST(Rate, Examples) {
  EXPECT_DOUBLE_EQ(pw::rate(kModel, 0, 10.0, 0.0), 10.0 / 11.0);
  EXPECT_DOUBLE_EQ(pw::rate(kModel, 1, 3.0, 1.0), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(pw::rate(kModel, 2, 1.0, 123.0), 0.5);  // sink ignores x_next
  EXPECT_EQ(pw::rate(kModel, 1, 2.0, 2.0), 0.0);
  EXPECT_THROW(pw::rate(kModel, 3, 1.0, 0.0), invex::contract_violation);
  EXPECT_THROW(pw::rate(kModel, 0, -1.0, 0.0), invex::contract_violation);
}

TEST(Model, ValidationRejectsNonPositiveParameters) {
  auto m = kModel;
  m.c[1] = 0.0;
  EXPECT_THROW(m.validate(), invex::contract_violation);
  m = kModel;
  m.x0 = -1.0;
  EXPECT_THROW(m.validate(), invex::contract_violation);
}

// Reference values computed independently in extended precision.
TEST(SteadyState, CanonicalUnitEnzymes) {
  const auto s = pw::solve_steady_state(kModel, {{1.0, 1.0, 1.0}});
  EXPECT_NEAR(s.flux, 0.4679328695782614214, 1e-12);
  EXPECT_NEAR(s.x1, 3.305831305510122517, 1e-10);
  EXPECT_NEAR(s.x2, 0.87946208819056033473, 1e-10);
  EXPECT_LE(s.max_residual(), 1e-10);
  EXPECT_GT(s.x0, s.x1);
  EXPECT_GT(s.x1, s.x2);
  EXPECT_GT(s.x2, 0.0);
}

TEST(SteadyState, FluxIsHomogeneousOfDegreeOne) {
  const pw::EnzymeVector e{{0.7, 2.1, 1.3}};
  const double j = pw::solve_steady_state(kModel, e).flux;
  for (double lambda : {0.1, 0.5, 2.0, 10.0}) {
    const auto s = pw::solve_steady_state(kModel, e.scaled(lambda));
    EXPECT_NEAR(s.flux, lambda * j, 1e-10 * lambda * j);
  }
}

TEST(SteadyState, TinySourceGivesTinyFlux) {
  auto m = kModel;
  m.x0 = 1e-6;
  const auto s = pw::solve_steady_state(m, {{1.0, 1.0, 1.0}});
  EXPECT_GT(s.flux, 0.0);
  EXPECT_LE(s.flux, 1e-5);
}

TEST(SteadyState, SpecificFluxVanishesWithFirstEnzyme) {
  const double sf = pw::specific_flux(kModel, {{1e-8, 1.0, 1.0}});
  EXPECT_GT(sf, 0.0);
  EXPECT_LE(sf, 1e-7);
}

TEST(SteadyState, RejectsNonPositiveEnzymes) {
  EXPECT_THROW(pw::solve_steady_state(kModel, {{0.0, 1.0, 1.0}}), invex::contract_violation);
  EXPECT_THROW(pw::solve_steady_state(kModel, {{1.0, -1.0, 1.0}}), invex::contract_violation);
}

TEST(SteadyState, EnzymesReconstructFromState) {
  invex::Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    const pw::EnzymeVector e{{rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)}};
    const auto s = pw::solve_steady_state(kModel, e);
    const auto back = pw::reconstruct_enzymes(kModel, s);
    for (std::size_t i = 0; i < 3; ++i) ASSERT_NEAR(back.e[i], e.e[i], 1e-8 * e.e[i]);
  }
}

TEST(Cascade, LargeZDrainsConcentrations) {
  const Vector x = pw::concentrations_from_z(kModel, Vector::Constant(3, 1e6));
  EXPECT_LE(x(2), 2.0 * kModel.c[2] * 1e-6);
  EXPECT_GT(x(2), 0.0);
}

TEST(Cascade, RoundTripAtTwo) {
  const Vector z = Vector::Constant(3, 2.0);
  const Vector back = pw::z_from_log_concentrations(kModel, pw::inverse_cascade(kModel, z));
  EXPECT_LE((back - z).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cascade, RejectsZBelowA) {
  Vector z = Vector::Constant(3, 2.0);
  z(1) = 1.0;
  EXPECT_THROW(pw::concentrations_from_z(kModel, z), invex::domain_error);
}

TEST(Cascade, LastComponentDerivative) {
  Vector z(3);
  z << 2.5, 3.0, 4.0;
  const Matrix g = pw::cascade_gradients(kModel, z);
  EXPECT_NEAR(g(2, 2), -1.0 / (z(2) - kModel.a[2]), 1e-14);
}

TEST(CascadeProperty, GradientsNegativeWithTriangularSupport) {
  const auto g = pw::inverse_map(kModel);
  for (const Vector& z : pw::z_sampler(kModel, 5, 100).sample_in(g)) {
    const Matrix d = pw::cascade_gradients(kModel, z);
    for (int m = 0; m < 3; ++m) {
      for (int i = 0; i < 3; ++i) {
        if (i >= m) {
          ASSERT_LT(d(m, i), 0.0);
        } else {
          ASSERT_EQ(d(m, i), 0.0);
        }
      }
    }
  }
}

TEST(Objective, TermsAreReciprocalRates) {
  const double y1 = std::log(4.0), y2 = std::log(1.5);
  const auto o = pw::objective_log_full(kModel, y1, y2);
  EXPECT_NEAR(o.terms[0], 1.0 / pw::rate(kModel, 0, 10.0, 4.0), 1e-13);
  EXPECT_NEAR(o.terms[1], 1.0 / pw::rate(kModel, 1, 4.0, 1.5), 1e-13);
  EXPECT_NEAR(o.terms[2], 1.0 / pw::rate(kModel, 2, 1.5, 0.0), 1e-13);
  EXPECT_NEAR(o.value, o.terms[0] + o.terms[1] + o.terms[2], 1e-13);
  EXPECT_THROW(pw::objective_log_full(kModel, y2, y1), invex::domain_error);
}

TEST(Objective, TermsMatchZOfSteadyState) {
  const pw::EnzymeVector e{{1.2, 0.8, 2.0}};
  const auto s = pw::solve_steady_state(kModel, e);
  const auto o = pw::objective_log_full(kModel, std::log(s.x1), std::log(s.x2));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(o.terms[i], s.z[i], 1e-8 * s.z[i]);
}

TEST(ObjectiveProperty, HessianPositiveDefiniteAtSamples) {
  invex::Rng rng(44);
  const double ly0 = std::log(kModel.x0);
  for (int k = 0; k < 100; ++k) {
    const double y1 = ly0 - rng.uniform(0.01, 6.0);
    const double y2 = y1 - rng.uniform(0.01, 6.0);
    const auto o = pw::objective_log_full(kModel, y1, y2);
    const Matrix h = o.hessian;
    ASSERT_TRUE(invex::matcert::certify_positive_definite(h).positive_definite()) << y1 << " " << y2;
  }
}

TEST(Concavity, EulerIdentitiesAtSampledEnzymes) {
  const auto rep = pw::specific_flux_concavity_check(kModel, pw::enzyme_sampler(9, 50));
  EXPECT_EQ(rep.samples.size() + rep.excluded, 50u);
  EXPECT_TRUE(rep.euler_identities_hold()) << rep.max_euler_residual;
  EXPECT_LE(rep.max_radial_residual, 1e-4);
}

// J is 1-homogeneous and concave; J/e_T is concave along directions that keep
// e_T fixed. In the full orthant J/e_T is 0-homogeneous, so H e = -grad and
// e^T H e = 0 force an indefinite Hessian wherever the gradient is nonzero.
TEST(Concavity, FluxConcaveSpecificFluxIndefiniteInFullSpace) {
  const auto rep = pw::specific_flux_concavity_check(kModel, pw::enzyme_sampler(9, 50));
  EXPECT_LE(rep.max_flux_eigenvalue, 1e-4);
  EXPECT_LE(rep.max_simplex_eigenvalue, 1e-4);
  EXPECT_GT(rep.max_eigenvalue, 1e-4);
  EXPECT_FALSE(rep.concave_at_samples());
}

}  // namespace
