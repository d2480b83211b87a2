// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails. `acceptance 4 7` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "levitodyn/analysis.hpp"
#include "levitodyn/detection.hpp"
#include "levitodyn/ensemble.hpp"
#include "levitodyn/sme_models.hpp"
#include "test_support.hpp"

#ifdef LEVITODYN_HAVE_CLI
#include <filesystem>
#include <fstream>
#include <iostream>

#include "levitodyn/cli.hpp"
#endif

namespace levitodyn {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a named sub-check.
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

int threads() { return resolve_threads(std::nullopt); }

// 1. Rotation algebra.
Outcome rotation_algebra() {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  double orth = 0.0, det = 0.0, fd = 0.0;
  const double h = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const EulerAngles phi = testing::random_angles(rng);
    const Vec3 rate(g(rng), g(rng), g(rng));
    const Mat3 f = rotation_from_euler(phi);
    orth = std::max(orth, (f.transpose() * f - Mat3::Identity()).cwiseAbs().maxCoeff());
    det = std::max(det, std::abs(f.determinant() - 1.0));
    const Mat3 fp = rotation_from_euler(EulerAngles::from_vector(phi.vector() + h * rate));
    const Mat3 fm = rotation_from_euler(EulerAngles::from_vector(phi.vector() - h * rate));
    const Mat3 w = (fp - fm) / (2.0 * h) * f.transpose();
    fd = std::max(fd, (w - skew(n_matrix(phi) * rate)).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.require(orth < 1e-12, fmt("max|R^T R - I| = %.2e", orth));
  o.require(det < 1e-12, fmt("max|det R - 1| = %.2e", det));
  o.require(fd < 1e-6, fmt("max finite-difference error = %.2e", fd));
  return o;
}

// 2. Gradient-coupling equivalence.
Outcome coupling_equivalence() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> chi0(0.5, 2.0), delta(-0.4, 0.4);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EulerAngles phi = testing::random_angles(rng);
    Susceptibility chi;
    chi.chi0 = chi0(rng);
    chi.delta = Vec3(delta(rng), delta(rng), delta(rng));
    const Polarization pol = elliptical_polarization(g(rng), g(rng));
    worst = std::max(worst, std::abs(gradient_coupling_trig(phi, chi, pol) -
                                      gradient_coupling(phi, chi, pol)));
  }
  Outcome o;
  o.require(worst < 1e-12, fmt("max |trig - contraction| = %.2e", worst));
  return o;
}

// 3. Completeness and dipole integrals.
Outcome completeness_and_dipole() {
  std::mt19937_64 rng(103);
  double completeness = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 n = testing::random_unit(rng);
    const PolarizationBasis b = scattering_basis(n);
    const CMat3 sum = b.e1 * b.e1.adjoint() + b.e2 * b.e2.adjoint() +
                      (n * n.transpose()).cast<Complex>();
    completeness = std::max(completeness, (sum - CMat3::Identity()).cwiseAbs().maxCoeff());
  }
  DetectorGeometry sphere;
  sphere.order_theta = 32;
  sphere.order_phi = 64;
  std::normal_distribution<double> g;
  double dipole = 0.0;
  for (int i = 0; i < 20; ++i) {
    CVec3 v(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
    v.normalize();
    const Complex total = integrate_over_detector(
        [&](const Vec3&, const CVec3& eps) { return Complex(std::norm(eps.dot(v))); }, sphere);
    dipole = std::max(dipole, std::abs(total.real() - 8.0 * kPi / 3.0));
  }
  Outcome o;
  o.require(completeness < 1e-12, fmt("completeness error = %.2e", completeness));
  o.require(dipole < 1e-10, fmt("dipole integral error = %.2e", dipole));
  return o;
}

// 4. Thermalization and conservative-limit energy drift.
constexpr EulerAngles kAligned{-0.5 * kPi, 0.5 * kPi, 0.5 * kPi};  // body x along lab x

double second_difference(const std::function<double(double)>& u, double h) {
  return (u(h) - 2.0 * u(0.0) + u(-h)) / (h * h);
}

Outcome thermalization() {
  Model m = testing::natural_model(100.0);
  m.trap.chi.delta = Vec3(0.3, 0.0, 0.0);
  m.gas.gamma_c = 4.0;
  const double kt = m.gas.temperature;
  ParticleState eq;
  eq.phi = kAligned;

  Vec3 k_trans;
  for (int a = 0; a < 3; ++a) {
    k_trans[a] = second_difference(
        [&](double s) {
          ParticleState p = eq;
          p.r[a] = s;
          return potential(p, m);
        },
        1e-4);
  }
  // Tilts of the body x axis about lab y and lab z.
  auto tilt_stiffness = [&](int axis) {
    return second_difference(
        [&](double s) {
          ParticleState p = eq;
          p.frame = axis_rotation(axis, s);
          return potential(p, m);
        },
        1e-4);
  };
  const double k_tilt_y = tilt_stiffness(2), k_tilt_z = tilt_stiffness(3);

  SimulationOptions opt;
  opt.dt = 2e-3;
  opt.duration = 100.0 / m.gas.gamma_c;
  opt.seed = 404;
  opt.integrator = Integrator::kHeun;
  opt.stride = static_cast<int>(std::lround(1.0 / m.gas.gamma_c / opt.dt));
  const double burn_in = 50.0 / m.gas.gamma_c;
  const Vec3 moments = m.body.inertia.moments();

  // Per trajectory: time average over samples after relaxation.
  const std::size_t n = 200;
  const auto averages = parallel_map(n, threads(), [&](std::size_t i) {
    SimulationOptions o = opt;
    o.stream = i;
    const Trajectory traj = simulate_trajectory(eq, m, o);
    std::vector<double> acc(11, 0.0);
    int count = 0;
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
      if (traj.t[j] < burn_in) continue;
      const ParticleState& s = traj.states[j];
      for (int a = 0; a < 3; ++a) {
        acc[a] += s.p[a] * s.p[a] / m.body.mass / kt;
        acc[3 + a] += k_trans[a] * s.r[a] * s.r[a] / kt;
      }
      const Vec3 omega = body_rate_matrix(s.phi) * euler_rates(s.phi, s.pi, m.body.inertia);
      for (int a = 0; a < 3; ++a) acc[6 + a] += moments[a] * omega[a] * omega[a] / kt;
      const Vec3 axis = s.orientation().col(0);
      acc[9] += k_tilt_y * axis.z() * axis.z() / kt;
      acc[10] += k_tilt_z * axis.y() * axis.y() / kt;
      ++count;
    }
    for (double& v : acc) v /= count;
    return acc;
  });

  std::vector<std::vector<double>> modes(11);
  for (const auto& acc : averages)
    for (std::size_t k = 0; k < acc.size(); ++k) modes[k].push_back(acc[k]);
  static const char* names[] = {"px",   "py",   "pz",   "x",         "y",        "z",
                                "L1",   "L2",   "L3",   "tilt_y",    "tilt_z"};
  Outcome o;
  double worst_sigma = 0.0;
  std::string worst;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const testing::Estimate e = testing::estimate(modes[k]);
    const double z = std::abs(e.mean - 1.0) / e.sem;
    if (z > worst_sigma) {
      worst_sigma = z;
      worst = names[k];
    }
    if (z > 3.0) o.require(false, std::string(names[k]) + fmt(" <2E>/kT = %.3f +- %.3f", e.mean, e.sem));
  }
  o.require(worst_sigma <= 3.0,
            "11 modes within 3 SE (worst " + worst + fmt(" at %.2f SE)", worst_sigma));

  // Conservative limit.
  Model c = m;
  c.gas.gamma_c = 0.0;
  c.trap.chi.delta = Vec3(0.3, 0.1, 0.0);
  ParticleState s = eq;
  s.r = Vec3(0.02, -0.01, 0.03);
  s.p = Vec3(0.05, 0.1, -0.02);
  s.pi = AngularMomenta{0.01, -0.02, 0.015};
  const double period = 2.0 * kPi / std::sqrt(k_trans.maxCoeff() / m.body.mass);
  const double dt = 1e-4 * period;
  const double e0 = total_energy(s, c);
  double drift = 0.0;
  for (int i = 0; i < 100000; ++i) {
    s = symplectic_step(s, c, dt);
    drift = std::max(drift, std::abs(total_energy(s, c) - e0));
  }
  drift /= std::abs(e0);
  o.require(drift < 1e-6, fmt("Verlet relative energy drift over 1e5 steps = %.2e", drift));
  return o;
}

// 5. Current decomposition.
struct Detector {
  TrapParams trap;
  PhysicalConstants constants = PhysicalConstants::natural();
  HomodyneConfig cfg;
};

Detector current_setup(double delta_phi) {
  Detector d;
  d.trap = testing::natural_model(50.0).trap;
  d.trap.mode.wavelength = 4.0;
  d.trap.mode.waist = 2.0;
  d.trap.mode.rayleigh_range = 6.0;
  d.trap.chi.delta = Vec3(0.2, -0.1, 0.05);
  d.cfg.delta_phi = delta_phi;
  d.cfg.det.axis = Vec3(0.0, 0.0, -1.0);
  d.cfg.det.half_angle = 1.0;
  d.cfg.det.order_theta = 24;
  d.cfg.det.order_phi = 48;
  return d;
}

Outcome current_decomposition_scaling() {
  std::mt19937_64 rng(105);
  Detector d = current_setup(0.4);
  ParticleState s;
  s.phi = testing::random_angles(rng);
  const Vec3 dir = testing::random_unit(rng);
  auto error = [&](const TrapParams& trap, const Vec3& r) {
    const HomodyneDetector det(trap, d.constants, d.cfg);
    s.r = r;
    return std::abs(det.mean_current(s) - det.decompose(s).sum());
  };
  const double r0 = 0.08;
  const double slope_r = std::log2(error(d.trap, r0 * dir) / error(d.trap, 0.5 * r0 * dir));
  TrapParams half = d.trap;
  half.chi.delta *= 0.5;
  const double slope_chi = std::log2(error(d.trap, r0 * dir) / error(half, r0 * dir));

  const Detector base = current_setup(0.0);
  const Mat3 f = s.orientation();
  const double jr0 = HomodyneDetector(base.trap, base.constants, base.cfg).rotational(f);
  double residual = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const double phase = k * kPi / 12.0;
    const Detector dk = current_setup(phase);
    const double jr = HomodyneDetector(dk.trap, dk.constants, dk.cfg).rotational(f);
    residual = std::max(residual, std::abs(jr - jr0 * std::cos(phase)) / std::abs(jr0));
  }
  Outcome o;
  o.require(slope_r >= 1.8, fmt("|r| halving exponent = %.3f", slope_r));
  o.require(slope_chi >= 1.8, fmt("|dchi| halving exponent = %.3f", slope_chi));
  o.require(residual < 1e-3, fmt("J_R vs cos(dPhi) relative residual = %.2e", residual));
  return o;
}

// 6. Noise contract.
Outcome noise_contract() {
  Detector d = current_setup(0.3);
  d.cfg.det.eta = 0.8;
  d.cfg.dt = 1e-3;
  const HomodyneDetector det(d.trap, d.constants, d.cfg);
  ParticleState s;
  s.r = Vec3(0.02, -0.01, 0.03);
  s.phi = {0.3, 1.1, -0.5};
  const double mean = det.mean_current(s);
  Rng rng = make_rng(106, 0);
  double sum2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double dw = (det.sample(s, rng) - mean) * d.cfg.dt;
    sum2 += dw * dw;
  }
  const double expected = 2.0 * d.cfg.det.solid_angle() * d.cfg.det.eta * d.cfg.dt;
  const double ratio = sum2 / n / expected;

  d.cfg.det.eta = 0.0;
  const HomodyneDetector dark(d.trap, d.constants, d.cfg);
  bool zero = true;
  for (int i = 0; i < 1000; ++i) zero = zero && dark.sample(s, rng) == 0.0;
  Outcome o;
  o.require(std::abs(ratio - 1.0) < 0.05, fmt("Var[dW] / (2 Omega eta dt) = %.4f", ratio));
  o.require(zero, "eta = 0 current identically zero");
  return o;
}

// 7. SME ensemble recovery.
Model toy_oscillator(double gamma_c) {
  Model m;
  m.constants = PhysicalConstants::natural();
  m.trap.power = 1.0;
  m.trap.cross_section = 1.0;
  m.trap.volume = 1.0;
  m.trap.mode.wavelength = 20.0;
  m.trap.mode.waist = 2.0;
  m.trap.mode.rayleigh_range = 40.0;
  m.gas.gamma_c = gamma_c;
  m.gas.temperature = 2.0;
  return m;
}

DetectorGeometry backward_cap(double eta) {
  DetectorGeometry d;
  d.axis = Vec3(0.0, 0.0, -1.0);
  d.half_angle = 1.2;
  d.eta = eta;
  d.order_theta = 8;
  d.order_phi = 16;
  return d;
}

Outcome sme_recovery() {
  Outcome o;
  const Model m = toy_oscillator(0.2);
  const int dim = 20;
  const QuantumModel q = build_1d_translational_model(m.trap, m.body, m.gas, m.constants, dim);
  const HomodyneSetup setup =
      homodyne_setup(q, backward_cap(1.0), 0.5 * kPi, UnravelingKind::kCollective);
  const double dt = 0.01, t_end = 5.0 / m.gas.gamma_c;
  const int steps = static_cast<int>(std::lround(t_end / dt));
  const BelavkinIntegrator integ(setup.hamiltonian, setup.channels, setup.spec, dt);
  const DensityMatrix rho0 = fock_state(dim, 2);
  const std::size_t n = 500, chunk = 25;
  const auto partial = parallel_map(n / chunk, threads(), [&](std::size_t c) {
    DensityMatrix acc = DensityMatrix::Zero(dim, dim);
    for (std::size_t t = c * chunk; t < (c + 1) * chunk; ++t) {
      std::mt19937_64 rng = make_rng(107, t);
      DensityMatrix rho = rho0;
      for (int i = 0; i < steps; ++i) rho = integ.step(rho, rng).rho;
      acc += rho;
    }
    return acc;
  });
  DensityMatrix mean = DensityMatrix::Zero(dim, dim);
  for (const auto& p : partial) mean += p;
  mean /= static_cast<double>(n);
  const DensityMatrix exact = lindblad_exact(rho0, setup.hamiltonian, setup.channels, t_end);
  const double distance = trace_distance(mean, exact);
  o.require(distance <= 0.05, fmt("trace distance at 5 damping times = %.4f", distance));

  // Full efficiency: every channel monitored.
  Model lossless = toy_oscillator(0.0);
  lossless.trap.mode.wavelength = 4.0;
  const QuantumModel ql =
      build_1d_translational_model(lossless.trap, lossless.body, lossless.gas, lossless.constants, dim);
  DetectorGeometry sphere;
  sphere.order_theta = 4;
  sphere.order_phi = 8;
  const HomodyneSetup full = homodyne_setup(ql, sphere, 0.3, UnravelingKind::kPerChannel);
  const BelavkinIntegrator efficient(full.hamiltonian, full.channels, full.spec, dt);
  std::mt19937_64 rng = make_rng(107, 1u << 20);
  CVec psi = CVec::Zero(dim);
  psi(1) = psi(2) = std::sqrt(0.5);
  DensityMatrix rho = pure_state(psi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix next = efficient.step(rho, rng).rho;
    worst = std::max(worst, std::abs(purity(next) - purity(rho)));
    rho = next;
  }
  o.require(worst < 1e-6, fmt("max purity change per step at eta = 1: %.2e", worst));

  const bool hetero = validate_unraveling(UnravelingSpec::heterodyne(2, 1.0)).valid;
  const bool homo = validate_unraveling(UnravelingSpec::homodyne(2, 1.0)).valid;
  UnravelingSpec bad = UnravelingSpec::homodyne(2, 1.0);
  bad.eta.setConstant(0.5);
  const bool rejected = !validate_unraveling(bad).valid;
  o.require(hetero && homo && rejected, "validator cases (I,0) ok, (I,I) ok, (I/2,I) rejected");
  return o;
}

// 8. Current statistics for a frozen state.
Outcome frozen_state_statistics() {
  Outcome o;
  Model m = toy_oscillator(0.2);
  m.trap.mode.wavelength = 4.0;
  const int dim = 12;
  const QuantumModel q = build_1d_translational_model(m.trap, m.body, m.gas, m.constants, dim);
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;
  rho(0, 1) = rho(1, 0) = 0.35;
  const double dt = 1e-3;
  for (const auto kind : {UnravelingKind::kCollective, UnravelingKind::kPerChannel}) {
    DetectorGeometry det = backward_cap(0.75);
    if (kind == UnravelingKind::kPerChannel) {
      det.order_theta = 4;
      det.order_phi = 8;
    }
    const HomodyneSetup setup = homodyne_setup(q, det, 0.0, kind);
    const BelavkinIntegrator integ(setup.hamiltonian, setup.channels, setup.spec, dt);
    const CMat cs = collective_operator(q, SphereQuadrature(det));
    const double mean = det.eta * ((cs + cs.adjoint()) * rho).trace().real();
    std::mt19937_64 rng = make_rng(108, static_cast<std::uint64_t>(kind));
    std::vector<double> js;
    for (int i = 0; i < 10000; ++i) js.push_back(setup.current(integ.step(rho, rng).currents));
    const testing::Estimate e = testing::estimate(js);
    const double sigmas = std::abs(e.mean - mean) / e.sem;
    const double var = e.sem * e.sem * static_cast<double>(js.size());
    const double ratio = var / (2.0 * det.solid_angle() * det.eta / dt);
    const std::string label = kind == UnravelingKind::kCollective ? "collective" : "per-channel";
    o.require(sigmas <= 3.0, label + fmt(": |E[J] - eta tr[...]| = %.2f sigma", sigmas));
    o.require(std::abs(ratio - 1.0) < 0.05, label + fmt(": Var[J] dt / (2 Omega eta) = %.4f", ratio));
  }
  return o;
}

// 9. Spectral pipeline.
Outcome spectral_pipeline() {
  Model m = testing::natural_model(100.0);
  m.gas.gamma_c = 1.0;
  ParticleState eq;
  eq.phi = kAligned;
  const double h = 1e-4;
  const double k = second_difference(
      [&](double s) {
        ParticleState p = eq;
        p.r.x() = s;
        return potential(p, m);
      },
      h);
  const double f_expected = std::sqrt(k / m.body.mass) / (2.0 * kPi);

  SimulationOptions opt;
  opt.dt = 2e-3;
  opt.duration = 2000.0;
  opt.seed = 109;
  opt.stride = 5;
  opt.integrator = Integrator::kHeun;
  const Trajectory traj = simulate_trajectory(eq, m, opt);
  TimeSeries ts;
  ts.sample_rate = 1.0 / (opt.dt * opt.stride);
  for (const auto& s : traj.states) ts.values.push_back(s.r.x());
  const Spectrum spec = welch_psd(ts, 8192, 0.5);
  const SpectrumFit fit =
      lorentzian_fit(spec.frequency, spec.density, {0.5 * f_expected, 1.5 * f_expected});
  const double rel = std::abs(fit.center_hz - f_expected) / f_expected;
  Outcome o;
  o.require(rel < 0.02, fmt("fit center %.5f Hz vs stiffness %.5f Hz", fit.center_hz, f_expected) +
                            fmt(" (rel. error %.2e)", rel));
  return o;
}

#ifdef LEVITODYN_HAVE_CLI
// 10. Reproducibility.
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "levitodyn_acceptance_repro";
  fs::remove_all(root);
  Outcome o;
  for (const char* name : {"simulate", "sme_translational"}) {
    const std::string config = std::string(LEVITODYN_CONFIG_DIR) + "/" + name + ".ini";
    const std::string command = std::string(name) == "simulate" ? "simulate" : "sme";
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      dirs.push_back(root / (std::string(name) + "_" + std::to_string(run)));
      const std::string out = dirs.back().string();
      const char* argv[] = {"levitodyn", command.c_str(), "--config", config.c_str(), "--out",
                            out.c_str()};
      std::ostringstream sink;
      const int code = cli::run(6, argv, sink, std::cerr);
      o.require(code == cli::kOk, command + " run " + std::to_string(run) + " exit 0");
    }
    std::size_t files = 0;
    bool identical = true;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      identical = identical && slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
    }
    o.require(identical && files > 0, command + ": " + std::to_string(files) + " CSV files byte-identical");
  }
  fs::remove_all(root);
  return o;
}
#endif

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace levitodyn

int main(int argc, char** argv) {
  using namespace levitodyn;
  std::vector<Criterion> criteria{
      {1, "rotation algebra", 5.0, rotation_algebra},
      {2, "gradient-coupling equivalence", 5.0, coupling_equivalence},
      {3, "completeness and dipole integrals", 10.0, completeness_and_dipole},
      {4, "thermalization", 300.0, thermalization},
      {5, "current decomposition", 120.0, current_decomposition_scaling},
      {6, "noise contract", 10.0, noise_contract},
      {7, "SME ensemble recovery", 600.0, sme_recovery},
      {8, "current statistics for a frozen state", 60.0, frozen_state_statistics},
      {9, "spectral pipeline", 120.0, spectral_pipeline},
#ifdef LEVITODYN_HAVE_CLI
      {10, "reproducibility", 60.0, reproducibility},
#endif
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s; runtime %.1f s of %.0f s%s\n", pass ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str(), elapsed, c.budget_s, in_time ? "" : " [x]");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
