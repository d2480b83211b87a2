#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "levitodyn/config.hpp"
#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

constexpr const char* kMinimal = R"(
[trap]
power_w = 0.2
wavelength_m = 1.5e-6
)";

TEST(Config, DefaultsAndOverrides) {
  const SimConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.model.trap.power, 0.2);
  EXPECT_EQ(c.model.trap.mode.wavelength, 1.5e-6);
  EXPECT_EQ(c.model.constants.hbar, PhysicalConstants{}.hbar);
  EXPECT_EQ(c.quantum.unraveling, UnravelingKind::kCollective);
  EXPECT_EQ(c.detector.expansion, PositionExpansion::kConsistent);
}

TEST(Config, FullDocument) {
  const SimConfig c = parse_config(R"(
# comment
[constants]
preset = natural
g_m_s2 = 0.5

[particle]
mass_kg = 2.0
inertia1_kg_m2 = 0.1
inertia2_kg_m2 = 0.1
inertia3_kg_m2 = 0.15
delta_chi1 = 0.25

[detector]
axis_z = -1
half_angle_rad = 0.8
efficiency = 0.5
expansion = published

[integrator]
dt_s = 1e-3
duration_s = 2
seed = 99
method = verlet
recoil_on = on

[initial]
x_m = 0.01
beta_rad = 1.5

[quantum]
model = rotor
l_max = 12
unraveling = per_channel

[currents]
sweep = beta
start = 0.1
stop = 1.0
points = 5
)");
  EXPECT_EQ(c.model.constants.hbar, 1.0);
  EXPECT_EQ(c.model.constants.g, 0.5);
  EXPECT_EQ(c.model.body.mass, 2.0);
  EXPECT_EQ(c.model.body.inertia[2], 0.15);
  EXPECT_EQ(c.model.trap.chi.delta.x(), 0.25);
  EXPECT_EQ(c.detector.det.axis.z(), -1.0);
  EXPECT_EQ(c.detector.det.eta, 0.5);
  EXPECT_EQ(c.detector.expansion, PositionExpansion::kPublished);
  EXPECT_EQ(c.integrator.seed, 99u);
  EXPECT_EQ(c.integrator.integrator, Integrator::kVerlet);
  EXPECT_TRUE(c.model.recoil_on);
  EXPECT_EQ(c.initial.r.x(), 0.01);
  EXPECT_EQ(c.initial.phi.beta, 1.5);
  EXPECT_EQ(c.quantum.model, QuantumModelKind::kRotor);
  EXPECT_EQ(c.quantum.l_max, 12);
  EXPECT_EQ(c.quantum.unraveling, UnravelingKind::kPerChannel);
  EXPECT_EQ(c.sweep.variable, SweepVariable::kBeta);
  EXPECT_EQ(c.sweep.points, 5);
}

void expect_invalid(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL() << "accepted: " << text;
  } catch (const ConfigInvalid& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsUnknownKeysAndSections) {
  expect_invalid("[trap]\npowr_w = 1\n", "trap.powr_w");
  expect_invalid("[laser]\npower_w = 1\n", "laser");
}

TEST(Config, RejectsMalformedValues) {
  expect_invalid("[trap]\npower_w = abc\n", "trap.power_w");
  expect_invalid("[trap]\npower_w = 1.0x\n", "trap.power_w");
  expect_invalid("[trap]\npower_w = -1\n", "trap.power_w");
  expect_invalid("[integrator]\nmethod = leapfrog\n", "integrator.method");
  expect_invalid("[integrator]\nrecoil_on = maybe\n", "integrator.recoil_on");
  expect_invalid("[detector]\nefficiency = 1.5\n", "detector.efficiency");
  expect_invalid("[quantum]\nfock_dim = 5\n", "quantum.fock_dim");
  expect_invalid("[quantum]\nl_max = 3\n", "quantum.l_max");
  expect_invalid("[psd]\noverlap = 1.0\n", "psd.overlap");
  expect_invalid("[currents]\npoints = 1\n", "currents.points");
  expect_invalid("[constants]\npreset = cgs\n", "constants.preset");
}

TEST(Config, RejectsInconsistentPhysics) {
  EXPECT_THROW(parse_config("[particle]\ninertia1_kg_m2 = 1\ninertia2_kg_m2 = 1\n"
                            "inertia3_kg_m2 = 5\n"),
               ConfigInvalid);
}

TEST(Config, PsdInputIsRelativeToConfigFile) {
  const auto dir = std::filesystem::temp_directory_path() / "levitodyn_config_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.ini";
  {
    std::ofstream f(path);
    f << "[psd]\ninput = traces/x.csv\nsegment_length = 256\n";
  }
  const SimConfig c = load_config(path);
  EXPECT_EQ(c.psd.input, dir / "traces/x.csv");
  EXPECT_EQ(c.psd.segment_length, 256u);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigInvalid);
}

}  // namespace
}  // namespace levitodyn
