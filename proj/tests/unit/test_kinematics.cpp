#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "levitodyn/errors.hpp"
#include "levitodyn/kinematics.hpp"
#include "test_support.hpp"

namespace levitodyn {
namespace {

using testing::random_angles;

Mat3 rz(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

Mat3 ry(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}

TEST(Rotation, IdentityAtZero) {
  EXPECT_TRUE(rotation_from_euler({0, 0, 0}).isApprox(Mat3::Identity(), 1e-15));
}

TEST(Rotation, AlphaTurnsXTowardY) {
  const Vec3 v = rotation_from_euler({kPi / 2, 0, 0}) * Vec3::UnitX();
  EXPECT_NEAR((v - Vec3::UnitY()).norm(), 0.0, 1e-15);
}

TEST(Rotation, BetaTurnsZTowardX) {
  const Vec3 v = rotation_from_euler({0, kPi / 2, 0}) * Vec3::UnitZ();
  EXPECT_NEAR((v - Vec3::UnitX()).norm(), 0.0, 1e-15);
}

TEST(Rotation, MatchesExplicitProduct) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const EulerAngles phi = random_angles(rng);
    const Mat3 expected = rz(phi.alpha) * ry(phi.beta) * rz(phi.gamma);
    EXPECT_LT((rotation_from_euler(phi) - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Rotation, EulerRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = rotation_from_euler(random_angles(rng));
    const Mat3 back = rotation_from_euler(euler_from_rotation(r));
    EXPECT_LT((r - back).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NMatrix, GimbalLockColumns) {
  const Mat3 n = n_matrix({0, 0, 0});
  EXPECT_TRUE(n.col(0).isApprox(Vec3::UnitZ()));
  EXPECT_TRUE(n.col(1).isApprox(Vec3::UnitY()));
  EXPECT_TRUE(n.col(2).isApprox(Vec3::UnitZ()));
  EXPECT_NEAR(n.determinant(), 0.0, 1e-15);
}

TEST(NMatrix, EquatorColumns) {
  for (const double gamma : {0.0, 0.4, -2.0}) {
    const Mat3 n = n_matrix({0, kPi / 2, gamma});
    EXPECT_LT((n.col(0) - Vec3::UnitZ()).norm(), 1e-15);
    EXPECT_LT((n.col(1) - Vec3::UnitY()).norm(), 1e-15);
    EXPECT_LT((n.col(2) - Vec3::UnitX()).norm(), 1e-15);
  }
}

TEST(NMatrix, DeterminantIsSinBeta) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const EulerAngles phi = random_angles(rng);
    EXPECT_NEAR(std::abs(n_matrix(phi).determinant()), std::abs(std::sin(phi.beta)), 1e-13);
  }
}

TEST(NMatrix, AngularVelocityFiniteDifference) {
  std::mt19937_64 rng(4);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const EulerAngles phi = random_angles(rng);
    const Vec3 rate = testing::random_unit(rng);
    const Mat3 dr = (rotation_from_euler(EulerAngles::from_vector(phi.vector() + h * rate)) -
                     rotation_from_euler(EulerAngles::from_vector(phi.vector() - h * rate))) /
                    (2 * h);
    const Mat3 omega = dr * rotation_from_euler(phi).transpose();
    EXPECT_LT((omega - skew(n_matrix(phi) * rate)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(NMatrixInverse, EquatorPermutation) {
  const Mat3 inv = n_matrix_inverse({0, kPi / 2, 0});
  Mat3 expected;
  expected << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  EXPECT_LT((inv - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NMatrixInverse, ThrowsAtGimbalLock) {
  EXPECT_THROW(n_matrix_inverse({0, 0, 0}), GimbalLock);
  EXPECT_THROW(n_matrix_inverse({0.3, kPi, 1.0}), GimbalLock);
}

TEST(NMatrixInverse, Residual) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    EulerAngles phi = random_angles(rng);
    phi.beta = kPi / 4;
    EXPECT_LT((n_matrix(phi) * n_matrix_inverse(phi) - Mat3::Identity()).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(KineticEnergy, ZeroMomentum) {
  EXPECT_EQ(rotational_kinetic_energy({0.1, 1.0, 0.3}, {}, InertiaTensor(1, 2, 2.5)), 0.0);
}

TEST(KineticEnergy, SphericalRotorAtEquator) {
  const double p = 0.7;
  const double i0 = 2.5;
  EXPECT_NEAR(rotational_kinetic_energy({0.2, kPi / 2, -1.1}, {p, 0, 0},
                                        InertiaTensor::spherical(i0)),
              p * p / (2 * i0), 1e-15);
}

TEST(KineticEnergy, MatchesLagrangian) {
  std::mt19937_64 rng(6);
  const InertiaTensor inertia(1.0, 1.7, 2.2);
  for (int i = 0; i < 200; ++i) {
    EulerAngles phi = random_angles(rng);
    if (std::abs(std::sin(phi.beta)) < 0.1) continue;
    const Vec3 rates = testing::random_unit(rng);
    const Mat3 f = rotation_from_euler(phi);
    const Vec3 omega = n_matrix(phi) * rates;
    const Mat3 lab_inertia = f * inertia.matrix() * f.transpose();
    const double lagrangian = 0.5 * omega.dot(lab_inertia * omega);
    const Vec3 pi = n_matrix(phi).transpose() * lab_inertia * omega;
    const AngularMomenta momenta = AngularMomenta::from_vector(pi);
    EXPECT_NEAR(rotational_kinetic_energy(phi, momenta, inertia), lagrangian,
                1e-12 * (1 + lagrangian));
    EXPECT_LT((euler_rates(phi, momenta, inertia) - rates).norm(), 1e-10);
    EXPECT_NEAR(0.5 * rates.dot(rotational_mass_matrix(phi, inertia) * rates), lagrangian,
                1e-12 * (1 + lagrangian));
  }
}

TEST(KineticEnergy, SphericalRotorGammaInvariance) {
  const InertiaTensor sphere = InertiaTensor::spherical(1.3);
  const AngularMomenta pi{0.3, -0.2, 0.5};
  const double base = rotational_kinetic_energy({0.4, 1.2, 0.0}, pi, sphere);
  for (const double delta : {0.3, 1.0, -2.5}) {
    EXPECT_NEAR(rotational_kinetic_energy({0.4, 1.2, delta}, pi, sphere), base, 1e-14);
  }
}

TEST(KineticEnergy, AngleGradientMatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  const InertiaTensor inertia(1.0, 1.4, 2.0);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    EulerAngles phi = random_angles(rng);
    if (std::abs(std::sin(phi.beta)) < 0.2) continue;
    const AngularMomenta pi = AngularMomenta::from_vector(testing::random_unit(rng));
    const Vec3 grad = kinetic_energy_angle_gradient(phi, pi, inertia);
    for (int k = 0; k < 3; ++k) {
      Vec3 up = phi.vector(), down = phi.vector();
      up[k] += h;
      down[k] -= h;
      const double fd = (rotational_kinetic_energy(EulerAngles::from_vector(up), pi, inertia) -
                         rotational_kinetic_energy(EulerAngles::from_vector(down), pi, inertia)) /
                        (2 * h);
      EXPECT_NEAR(grad[k], fd, 1e-7);
    }
  }
}

TEST(AngularMomentum, LabRoundTrip) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    EulerAngles phi = random_angles(rng);
    if (std::abs(std::sin(phi.beta)) < 0.1) continue;
    const Vec3 lab = testing::random_unit(rng);
    const AngularMomenta pi = momenta_from_lab(phi, lab);
    EXPECT_LT((lab_angular_momentum(phi, pi) - lab).norm(), 1e-12);
  }
}

TEST(Generators, ExponentialIsAxisRotation) {
  const double a = 0.7;
  const Mat3 e = (a * rotation_generator(3)).exp();
  EXPECT_LT((e - rz(a)).cwiseAbs().maxCoeff(), 1e-12);
  const Mat3 ey = (a * rotation_generator(2)).exp();
  EXPECT_LT((ey - ry(a)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Generators, Antisymmetric) {
  for (int k = 1; k <= 3; ++k) {
    EXPECT_TRUE((rotation_generator(k).transpose() + rotation_generator(k)).isZero(0.0));
  }
}

TEST(Generators, CommutatorClosure) {
  const Mat3 l1 = rotation_generator(1), l2 = rotation_generator(2), l3 = rotation_generator(3);
  EXPECT_TRUE((l1 * l2 - l2 * l1 - l3).isZero(0.0));
  EXPECT_TRUE((l2 * l3 - l3 * l2 - l1).isZero(0.0));
  EXPECT_TRUE((l3 * l1 - l1 * l3 - l2).isZero(0.0));
}

TEST(Generators, RejectsBadAxis) {
  EXPECT_THROW(rotation_generator(0), InvalidArgument);
  EXPECT_THROW(rotation_generator(4), InvalidArgument);
}

TEST(Inertia, RejectsTriangleViolation) {
  EXPECT_THROW(InertiaTensor(1.0, 1.0, 3.0), InvalidArgument);
  EXPECT_THROW(InertiaTensor(-1.0, 1.0, 1.0), InvalidArgument);
  EXPECT_NO_THROW(InertiaTensor(1.0, 1.0, 2.0));
}

}  // namespace
}  // namespace levitodyn
