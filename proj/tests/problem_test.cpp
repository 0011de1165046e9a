#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mindist/errors.hpp"
#include "mindist/problem.hpp"
#include "mindist/separation.hpp"
#include "test_support.hpp"

using namespace mindist;
namespace ref = mindist::support::ref;

namespace {

ProblemInstance identity3(double r, Vector f = Vector::Zero(3), Vector c = Vector::Zero(3)) {
  return ProblemInstance(Matrix::Identity(3, 3), r, 1.0, 1.0, std::move(f), std::move(c));
}

}  // namespace

TEST(ProblemInstance, RejectsInvalidData) {
  const Matrix I = Matrix::Identity(2, 2);
  const Vector z = Vector::Zero(2);
  EXPECT_THROW(ProblemInstance(I, 0.0, 1, 1, z, z), InputError);
  EXPECT_THROW(ProblemInstance(I, 1, -1.0, 1, z, z), InputError);
  EXPECT_THROW(ProblemInstance(I, 1, 1, 0.0, z, z), InputError);
  EXPECT_THROW(ProblemInstance(I, 1, 1, 1, Vector::Zero(3), z), InputError);
  EXPECT_THROW(ProblemInstance(Matrix::Identity(1, 1), 1, 1, 1, Vector::Zero(1), Vector::Zero(1)),
               InputError);

  Matrix asym = I;
  asym(0, 1) = 1e-6;
  EXPECT_THROW(ProblemInstance(asym, 1, 1, 1, z, z), InputError);

  Matrix indefinite{{1.0, 2.0}, {2.0, 1.0}};
  EXPECT_THROW(ProblemInstance(indefinite, 1, 1, 1, z, z), InputError);
}

TEST(ProblemInstance, AcceptsRoundoffAsymmetry) {
  Matrix A{{2.0, 0.5}, {0.5 + 1e-12, 3.0}};
  const ProblemInstance inst(A, 1, 1, 1, Vector::Zero(2), Vector::Zero(2));
  EXPECT_EQ(inst.A()(0, 1), inst.A()(1, 0));
}

TEST(HValue, Examples) {
  const ProblemInstance inst = identity3(2.0 * std::sqrt(2.0));
  EXPECT_NEAR(h_value(inst, Vector{{2.0, 2.0, 0.0}}), 0.0, 1e-14);
  EXPECT_NEAR(h_value(inst, Vector::Zero(3)), -4.0, 1e-14);
  EXPECT_NEAR(h_value(support::ellipsoid_fixture(), ref::kEllipsoidY), 0.0, 1e-6);
  EXPECT_THROW(h_value(inst, Vector::Zero(2)), InputError);
}

TEST(GValue, Examples) {
  const ProblemInstance deg = support::degenerate_fixture();
  EXPECT_NEAR(g_value(deg, Vector{{1.0, std::sqrt(2.0)}}), 0.0, 1e-15);
  EXPECT_NEAR(g_value(deg, deg.c()), 0.5 * deg.alpha() * deg.eta() * deg.eta(), 1e-15);

  const ProblemInstance sphere = support::sphere_fixture();
  EXPECT_NEAR(g_value(sphere, sphere.c()), 0.5 * 1.0 * 4.0, 1e-15);
  EXPECT_NEAR(g_value(sphere, ref::kSphereZ), 0.0, 1e-6);
  EXPECT_THROW(g_value(sphere, Vector::Zero(2)), InputError);
}

TEST(PiValue, Examples) {
  const ProblemInstance inst(Matrix::Identity(2, 2), 1, 1, 1, Vector::Zero(2), Vector::Zero(2));
  EXPECT_EQ(pi_value(inst, {Vector{{0.3, 0.4}}, Vector{{0.3, 0.4}}}), 0.0);
  EXPECT_NEAR(pi_value(inst, {Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}}), 1.0, 1e-15);
  EXPECT_THROW(pi_value(inst, {Vector::Zero(2), Vector::Zero(3)}), InputError);
}

TEST(Lagrangian, ReducesToPiWhenMultipliersVanishOrPointIsFeasible) {
  const ProblemInstance inst = support::sphere_fixture();
  const PrimalPoint x{Vector{{1.0, 2.0, 3.0}}, Vector{{-1.0, 0.5, 2.0}}};
  EXPECT_DOUBLE_EQ(lagrangian(inst, x, 0.0, 0.0), pi_value(inst, x));

  const PrimalPoint xbar{ref::kSphereY, ref::kSphereZ};
  EXPECT_NEAR(lagrangian(inst, xbar, ref::kSphereDual.lam, ref::kSphereDual.mu),
              pi_value(inst, xbar), 1e-6);
}

TEST(GeometricOperator, Examples) {
  const ProblemInstance deg = support::degenerate_fixture();
  EXPECT_EQ(geometric_operator(deg, deg.c()), 0.0);
  EXPECT_NEAR(geometric_operator(deg, Vector{{1.0, std::sqrt(2.0)}}), 1.0, 1e-15);

  // Canonical relation xi = DV*(sig) = sig / alpha + eta at the reference point.
  const ProblemInstance sphere = support::sphere_fixture();
  const double expected = ref::kSphereDual.sig / sphere.alpha() + sphere.eta();
  EXPECT_NEAR(expected, 2.30646555192966, 1e-12);
  EXPECT_NEAR(geometric_operator(sphere, ref::kSphereZ), expected, 1e-6);
}

TEST(CanonicalFunction, Examples) {
  const CanonicalFunction v(1.5, 0.7);
  EXPECT_EQ(v.value(0.7), 0.0);
  EXPECT_EQ(v.derivative(0.7), 0.0);
  EXPECT_EQ(v.conjugate(0.0), 0.0);
  EXPECT_EQ(v.conjugate_derivative(0.0), 0.7);
}

TEST(CanonicalFunction, DomainViolationsCarryTheValue) {
  const CanonicalFunction v(2.0, 0.5);
  try {
    v.value(-0.25);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.value(), -0.25);
  }
  EXPECT_THROW(v.derivative(-1e-300), DomainError);
  EXPECT_THROW(v.conjugate(-1.0 - 1e-12), DomainError);
  EXPECT_THROW(v.conjugate_derivative(-2.0), DomainError);
  EXPECT_NO_THROW(v.conjugate(-1.0));  // boundary sig = -alpha eta
}

TEST(CanonicalFunction, FenchelYoungAndInversionProperties) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = support::uniform(rng, 0.1, 5.0);
    const double eta = support::uniform(rng, 0.1, 5.0);
    const CanonicalFunction v(alpha, eta);
    const double xi = support::uniform(rng, 0.0, 10.0);
    const double sig = v.derivative(xi);
    EXPECT_NEAR(v.value(xi) + v.conjugate(sig) - xi * sig, 0.0,
                1e-12 * std::max(1.0, std::abs(xi * sig)));
    EXPECT_NEAR(v.conjugate_derivative(v.derivative(xi)), xi, 1e-12 * std::max(1.0, xi));
  }
}

TEST(GValue, DecomposesIntoCanonicalFormProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemInstance inst = support::random_raw_instance(2 + trial % 3, rng);
    const Vector z = support::random_vector(inst.dim(), rng, 3.0);
    const CanonicalFunction v(inst);
    const double composed = v.value(geometric_operator(inst, z)) - inst.f().dot(z - inst.c());
    EXPECT_NEAR(g_value(inst, z), composed, 1e-10 * std::max(1.0, std::abs(composed)));
  }
}

TEST(Lagrangian, EqualsPiOnSurfaceSamples) {
  const ProblemInstance inst = support::sphere_fixture();
  // y on the sphere, z = the reference point of Z_c.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector y = support::random_vector(3, rng);
    y *= inst.r() / y.norm();
    const PrimalPoint x{y, ref::kSphereZ};
    const double lam = support::uniform(rng, -3, 3), mu = support::uniform(rng, -3, 3);
    EXPECT_NEAR(lagrangian(inst, x, lam, mu), pi_value(inst, x), 1e-5);
  }
}

TEST(Gradients, MatchCentralDifferences) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = support::random_raw_instance(2 + trial % 3, rng);
    const Vector p = support::random_vector(inst.dim(), rng, 2.0);
    const Vector gh = h_gradient(inst, p);
    const Vector gg = g_gradient(inst, p);
    const Matrix hg = g_hessian(inst, p);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double fdh = support::central_difference(
          [&](const Vector& v) { return h_value(inst, v); }, p, i, 1e-6);
      const double fdg = support::central_difference(
          [&](const Vector& v) { return g_value(inst, v); }, p, i, 1e-6);
      EXPECT_LE(support::relative_error(fdh, gh(i)), 1e-5);
      EXPECT_LE(support::relative_error(fdg, gg(i)), 1e-5);
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double fdgg = support::central_difference(
            [&](const Vector& v) { return g_gradient(inst, v)(j); }, p, i, 1e-6);
        EXPECT_LE(support::relative_error(fdgg, hg(j, i)), 1e-5);
      }
    }
  }
}

TEST(Separation, AnalyticConditionAtOrigin) {
  // 0.5 (0.5 r^2 - eta)^2 / r = 0.5 * 0.25 / 1 = 0.125 > |f| = 0.1
  const ProblemInstance inst = identity3(1.0, Vector{{0.1, 0.0, 0.0}});
  const SeparationReport rep = check_separation(inst, 16);
  EXPECT_TRUE(rep.analytic_applicable);
  EXPECT_NEAR(rep.force_threshold, 0.125, 1e-15);
  EXPECT_TRUE(rep.analytic_holds);
  EXPECT_EQ(rep.status, SeparationStatus::AnalyticallyCertified);
  EXPECT_GT(rep.min_sampled_h, 0.0);  // sampled evidence agrees

  const ProblemInstance at_threshold = identity3(1.0, Vector{{0.125, 0.0, 0.0}});
  const SeparationReport edge = check_separation(at_threshold, 16);
  EXPECT_TRUE(edge.analytic_applicable);
  EXPECT_FALSE(edge.analytic_holds);
  EXPECT_NE(edge.status, SeparationStatus::AnalyticallyCertified);
}

TEST(Separation, OffsetCenterFallsBackToSampling) {
  const SeparationReport rep = check_separation(support::degenerate_fixture());
  EXPECT_FALSE(rep.analytic_applicable);
  EXPECT_EQ(rep.status, SeparationStatus::NumericallyPlausible);
  EXPECT_GT(rep.samples, 0u);
}

TEST(Separation, OverlappingSurfacesAreViolated) {
  // Sphere of radius 2 around the origin, quartic surface of radius ~sqrt(2) around c = 0.
  const ProblemInstance inst =
      ProblemInstance(Matrix::Identity(2, 2), 2.0, 1.0, 1.0, Vector{{0.05, 0.0}}, Vector::Zero(2));
  EXPECT_EQ(check_separation(inst, 32).status, SeparationStatus::Violated);
}

TEST(Separation, ForceFreeSurfaceIsSampledThroughDoubleRoots) {
  // f = 0: every ray meets Z_c only at the double root rho = sqrt(2 eta).
  const ProblemInstance inst(Matrix::Identity(2, 2), 1.0, 1.0, 1.0, Vector::Zero(2),
                             Vector{{5.0, 0.0}});
  const SeparationReport rep = check_separation(inst, 16);
  EXPECT_EQ(rep.status, SeparationStatus::NumericallyPlausible);
  EXPECT_EQ(rep.samples, 16u);
}

TEST(Separation, HighDimensionalGridIsCapped) {
  const ProblemInstance inst(Matrix::Identity(5, 5), 1.0, 1.0, 1.0, Vector::Zero(5),
                             Vector{{5.0, 0.0, 0.0, 0.0, 0.0}});
  const SeparationReport rep = check_separation(inst, 16);
  EXPECT_EQ(rep.status, SeparationStatus::NumericallyPlausible);
  EXPECT_GT(rep.samples, 0u);
  EXPECT_LE(rep.samples, 16u * 16u);
}
