#include <gtest/gtest.h>

#include <cmath>

#include "levitodyn/detection.hpp"
#include "levitodyn/errors.hpp"
#include "test_support.hpp"

namespace levitodyn {
namespace {

struct Bench {
  TrapParams trap;
  PhysicalConstants constants = PhysicalConstants::natural();
  HomodyneConfig cfg;
};

Bench make_setup(double delta_phi = 0.3) {
  Bench s;
  s.trap = testing::natural_model(50.0).trap;
  s.trap.mode.wavelength = 4.0;
  s.trap.mode.waist = 2.0;
  s.trap.mode.rayleigh_range = 6.0;
  s.trap.chi.delta = Vec3(0.2, -0.1, 0.05);
  s.cfg.delta_phi = delta_phi;
  s.cfg.det.axis = Vec3(0.0, 0.0, -1.0);
  s.cfg.det.half_angle = 1.0;
  s.cfg.det.eta = 0.8;
  s.cfg.det.order_theta = 16;
  s.cfg.det.order_phi = 32;
  s.cfg.dt = 1e-3;
  return s;
}

TEST(Homodyne, FocusCurrentIsConstantPlusRotational) {
  const Bench s = make_setup();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Mat3 f = rotation_from_euler(testing::random_angles(rng));
    const double direct = det.mean_current(Vec3::Zero(), f);
    EXPECT_NEAR(direct, det.constant_part() + det.rotational(f), 1e-12 * std::abs(direct));
  }
}

TEST(Homodyne, PositionExpansionIsSecondOrder) {
  const Bench s = make_setup();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  const double k = s.trap.mode.wavenumber();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    const Vec3 n = testing::random_unit(rng);
    const Vec3 dir = testing::random_unit(rng);
    auto error = [&](double a) {
      const Vec3 r = a * dir;
      const Complex exact = mode_value(s.trap.mode, r) * std::polar(1.0, k * n.dot(r)) - 1.0;
      return std::abs(exact - det.position_expansion(r, n));
    };
    const double slope = std::log2(error(2e-3) / error(1e-3));
    EXPECT_GT(slope, 2.8);
  }
}

TEST(Homodyne, PublishedExpansionDiffersAxially) {
  Bench s = make_setup();
  const HomodyneDetector consistent(s.trap, s.constants, s.cfg);
  s.cfg.expansion = PositionExpansion::kPublished;
  const HomodyneDetector published(s.trap, s.constants, s.cfg);
  const Vec3 r(0.0, 0.0, 1e-2);
  const Vec3 n = Vec3::UnitX();
  const Complex delta = published.position_expansion(r, n) - consistent.position_expansion(r, n);
  const double zr = s.trap.mode.rayleigh_range;
  EXPECT_NEAR(delta.real(), -0.5 * r.z() * r.z() / (zr * zr), 1e-18);
  EXPECT_EQ(delta.imag(), 0.0);
  // Transverse displacements are unaffected.
  EXPECT_EQ(published.position_expansion(Vec3(0.01, 0.02, 0.0), n),
            consistent.position_expansion(Vec3(0.01, 0.02, 0.0), n));
}

TEST(Homodyne, DecompositionErrorIsCubicInPosition) {
  Bench s = make_setup();
  s.trap.chi.delta = Vec3::Zero();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  const Vec3 dir = Vec3(0.3, -0.5, 0.8).normalized();
  auto error = [&](double a) {
    ParticleState p;
    p.r = a * dir;
    return std::abs(det.mean_current(p) - det.decompose(p).sum());
  };
  EXPECT_GT(std::log2(error(0.02) / error(0.01)), 2.7);
}

TEST(Homodyne, RotationalAmplitudeFollowsCosinePhase) {
  std::mt19937_64 rng(7);
  const Mat3 f = rotation_from_euler(testing::random_angles(rng));
  const Bench base = make_setup(0.0);
  const double j0 = HomodyneDetector(base.trap, base.constants, base.cfg).rotational(f);
  ASSERT_GT(std::abs(j0), 1e-6);
  for (const double phase : {0.3, 1.0, 0.5 * kPi, 2.5, kPi}) {
    const Bench s = make_setup(phase);
    const double j = HomodyneDetector(s.trap, s.constants, s.cfg).rotational(f);
    EXPECT_NEAR(j, j0 * std::cos(phase), 1e-12 * std::abs(j0));
  }
}

TEST(Homodyne, RotationalVanishesForIsotropicParticle) {
  Bench s = make_setup();
  s.trap.chi.delta = Vec3::Zero();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  ParticleState p;
  p.phi = {0.4, 1.0, -0.2};
  EXPECT_EQ(det.decompose(p).jr, 0.0);
  EXPECT_EQ(det.decompose(p).jrt, 0.0);
}

TEST(Homodyne, ScalesWithEfficiencyAndGain) {
  Bench s = make_setup();
  ParticleState p;
  p.r = Vec3(0.05, 0.02, -0.03);
  p.phi = {0.2, 0.9, 1.4};
  const double base = HomodyneDetector(s.trap, s.constants, s.cfg).mean_current(p);
  s.cfg.det.eta = 0.4;
  s.cfg.gain = 3.0;
  EXPECT_NEAR(HomodyneDetector(s.trap, s.constants, s.cfg).mean_current(p), 1.5 * base,
              1e-12 * std::abs(base));
}

TEST(Homodyne, NoiseVarianceContract) {
  const Bench s = make_setup();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  const double omega = 2.0 * kPi * (1.0 - std::cos(s.cfg.det.half_angle));
  EXPECT_NEAR(det.noise_variance(), 2.0 * omega * s.cfg.det.eta * s.cfg.dt, 1e-12);
  ParticleState p;
  p.r = Vec3(0.01, 0.0, 0.0);
  const double mean = det.mean_current(p);
  Rng rng = make_rng(3, 0);
  std::vector<double> dw;
  for (int i = 0; i < 10000; ++i) dw.push_back((det.sample(p, rng) - mean) * s.cfg.dt);
  double var = 0.0;
  for (const double w : dw) var += w * w;
  var /= static_cast<double>(dw.size());
  EXPECT_NEAR(var / det.noise_variance(), 1.0, 0.05);
}

TEST(Homodyne, ZeroEfficiencyGivesZeroCurrent) {
  Bench s = make_setup();
  s.cfg.det.eta = 0.0;
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  ParticleState p;
  p.r = Vec3(0.1, 0.2, 0.3);
  Rng rng = make_rng(0, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(det.sample(p, rng), 0.0);
  EXPECT_EQ(det.noise_variance(), 0.0);
}

TEST(Homodyne, FreeFunctionsAgreeWithDetector) {
  const Bench s = make_setup();
  const HomodyneDetector det(s.trap, s.constants, s.cfg);
  ParticleState p;
  p.r = Vec3(0.02, -0.01, 0.04);
  p.phi = {0.5, 1.1, -0.7};
  const CurrentDecomposition a = det.decompose(p);
  const CurrentDecomposition b = current_decomposition(p, s.trap, s.constants, s.cfg);
  EXPECT_EQ(a.sum(), b.sum());
  EXPECT_EQ(current_translational(p.r, s.trap, s.constants, s.cfg), a.jt);
  EXPECT_EQ(current_rotational(p.phi, s.trap, s.constants, s.cfg), a.jr);
  Rng r1 = make_rng(9, 9), r2 = make_rng(9, 9);
  EXPECT_EQ(homodyne_current(p, s.trap, s.constants, s.cfg, r1), det.sample(p, r2));
}

TEST(Homodyne, RejectsBadConfig) {
  Bench s = make_setup();
  s.cfg.dt = 0.0;
  EXPECT_THROW(HomodyneDetector(s.trap, s.constants, s.cfg), InvalidArgument);
}

}  // namespace
}  // namespace levitodyn
