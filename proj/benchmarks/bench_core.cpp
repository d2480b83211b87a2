#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "levitodyn/analysis.hpp"
#include "levitodyn/detection.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/sme_models.hpp"

namespace {

using namespace levitodyn;

Model bench_model() {
  Model m;
  m.constants = PhysicalConstants::natural();
  m.trap.power = 100.0;
  m.trap.cross_section = 1.0;
  m.trap.volume = 1.0;
  m.trap.mode.waist = 1.0;
  m.trap.mode.rayleigh_range = 1.5;
  m.trap.mode.wavelength = 0.5;
  m.trap.chi.chi0 = 1.0;
  m.trap.chi.delta = Vec3(0.3, 0.1, 0.0);
  m.body.mass = 1.0;
  m.body.inertia = InertiaTensor(0.08, 0.1, 0.12);
  m.gas.gamma_c = 1.0;
  m.gas.temperature = 0.01;
  m.gas.constituent_mass = 1.0;
  return m;
}

ParticleState bench_state() {
  ParticleState s;
  s.r = Vec3(0.02, -0.01, 0.03);
  s.p = Vec3(0.05, 0.1, -0.02);
  s.phi = {0.3, 1.1, -0.5};
  s.pi = AngularMomenta{0.01, -0.02, 0.015};
  return s;
}

void BM_LangevinStep(benchmark::State& st) {
  const Model m = bench_model();
  ParticleState s = bench_state();
  Rng rng(1);
  for (auto _ : st) {
    s = langevin_step(s, m, 1e-3, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_LangevinStep);

void BM_SymplecticStep(benchmark::State& st) {
  Model m = bench_model();
  m.gas.gamma_c = 0.0;
  ParticleState s = bench_state();
  for (auto _ : st) {
    s = symplectic_step(s, m, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SymplecticStep);

void BM_MeanCurrent(benchmark::State& st) {
  const Model m = bench_model();
  HomodyneConfig cfg;
  cfg.det.axis = Vec3(0.0, 0.0, -1.0);
  cfg.det.half_angle = 1.0;
  cfg.det.order_theta = static_cast<int>(st.range(0));
  cfg.det.order_phi = 2 * cfg.det.order_theta;
  const HomodyneDetector det(m.trap, m.constants, cfg);
  const ParticleState s = bench_state();
  for (auto _ : st) benchmark::DoNotOptimize(det.mean_current(s));
}
BENCHMARK(BM_MeanCurrent)->Arg(8)->Arg(24);

void BM_BelavkinStep(benchmark::State& st) {
  Model m = bench_model();
  m.trap.power = 1.0;
  m.trap.mode.waist = 2.0;
  m.trap.mode.rayleigh_range = 40.0;
  m.trap.mode.wavelength = 4.0;
  m.trap.chi.delta = Vec3::Zero();
  m.gas.gamma_c = 0.2;
  m.gas.temperature = 2.0;
  const int dim = static_cast<int>(st.range(0));
  const QuantumModel q = build_1d_translational_model(m.trap, m.body, m.gas, m.constants, dim);
  DetectorGeometry det;
  det.axis = Vec3(0.0, 0.0, -1.0);
  det.half_angle = 1.2;
  det.order_theta = 8;
  det.order_phi = 16;
  const HomodyneSetup setup = homodyne_setup(q, det, 0.5 * kPi, UnravelingKind::kCollective);
  const BelavkinIntegrator integ(setup.hamiltonian, setup.channels, setup.spec, 0.01);
  DensityMatrix rho = fock_state(dim, 2);
  std::mt19937_64 rng(3);
  for (auto _ : st) {
    rho = integ.step(rho, rng).rho;
    benchmark::DoNotOptimize(rho.data());
  }
}
BENCHMARK(BM_BelavkinStep)->Arg(10)->Arg(20);

void BM_Welch(benchmark::State& st) {
  TimeSeries ts;
  ts.sample_rate = 100.0;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  ts.values.resize(static_cast<std::size_t>(st.range(0)));
  for (double& v : ts.values) v = g(rng);
  for (auto _ : st) benchmark::DoNotOptimize(welch_psd(ts, 4096, 0.5));
}
BENCHMARK(BM_Welch)->Arg(1 << 16)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
