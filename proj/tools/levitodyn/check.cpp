#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "levitodyn/cli.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/errors.hpp"
#include "levitodyn/scattering.hpp"
#include "levitodyn/sme.hpp"
#include "levitodyn/trace_io.hpp"

namespace levitodyn::cli {
namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome verdict(bool pass, const std::string& label, double value) {
  std::ostringstream s;
  s << label << " = " << value;
  return {pass, s.str()};
}

EulerAngles random_angles(Rng& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  return {u(rng), u(rng), u(rng)};
}

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

CMat random_matrix(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> g;
  CMat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

DensityMatrix random_density(Eigen::Index d, Rng& rng) {
  const CMat a = random_matrix(d, rng);
  const CMat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Outcome rotation_algebra(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const EulerAngles phi = random_angles(rng);
    const Mat3 r = rotation_from_euler(phi);
    worst = std::max(worst, (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(r.determinant() - 1.0));
  }
  return verdict(worst < 1e-12, "max |R^T R - 1|, |det R - 1|", worst);
}

Outcome angular_velocity(Rng& rng) {
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const EulerAngles phi = random_angles(rng);
    const Vec3 rate = random_unit(rng);
    const Vec3 ahead = phi.vector() + h * rate;
    const Vec3 behind = phi.vector() - h * rate;
    const Mat3 dr = (rotation_from_euler(EulerAngles::from_vector(ahead)) -
                     rotation_from_euler(EulerAngles::from_vector(behind))) / (2.0 * h);
    const Mat3 omega = dr * rotation_from_euler(phi).transpose();
    worst = std::max(worst, (omega - skew(n_matrix(phi) * rate)).cwiseAbs().maxCoeff());
  }
  return verdict(worst < 1e-6, "max |dF F^T - [N phidot]x|", worst);
}

Outcome coupling_paths(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EulerAngles phi = random_angles(rng);
    Susceptibility chi;
    chi.chi0 = 1.0 + u(rng);
    chi.delta = Vec3(u(rng), u(rng), u(rng));
    const Polarization pol = elliptical_polarization(1.0 + u(rng), u(rng));
    worst = std::max(worst, std::abs(gradient_coupling(phi, chi, pol) -
                                     gradient_coupling_trig(phi, chi, pol)));
  }
  return verdict(worst < 1e-12, "max |trig - contraction|", worst);
}

Outcome completeness(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 n = random_unit(rng);
    const PolarizationBasis b = scattering_basis(n);
    const CMat3 sum = b.e1 * b.e1.adjoint() + b.e2 * b.e2.adjoint() +
                      (n * n.transpose()).cast<Complex>();
    worst = std::max(worst, (sum - CMat3::Identity()).cwiseAbs().maxCoeff());
  }
  return verdict(worst < 1e-12, "max |sum eps eps^dag + n n^T - 1|", worst);
}

Outcome dipole_integral(Rng& rng) {
  const CVec3 v = (random_unit(rng).cast<Complex>() +
                   Complex(0.0, 1.0) * random_unit(rng).cast<Complex>()).normalized();
  DetectorGeometry full;
  const Complex total =
      integrate_over_detector([&](const Vec3&, const CVec3& eps) { return Complex(std::norm(eps.dot(v))); }, full);
  const double err = std::abs(total.real() - 8.0 * kPi / 3.0);
  return verdict(err < 1e-10, "|sphere integral - 8 pi / 3|", err);
}

Outcome lindblad_trace(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix rho = random_density(5, rng);
    const CMat k = random_matrix(5, rng);
    const CMat d = dissipator_D(k, rho);
    const CMat hs = superoperator_H(k, rho);
    worst = std::max({worst, std::abs(d.trace()), std::abs(hs.trace()),
                      (d - d.adjoint()).cwiseAbs().maxCoeff()});
  }
  return verdict(worst < 1e-10, "max |tr D|, |tr H|, |D - D^dag|", worst);
}

Outcome unraveling_cases(Rng&) {
  const bool heterodyne = validate_unraveling(UnravelingSpec::heterodyne(2, 1.0)).valid;
  const bool homodyne = validate_unraveling(UnravelingSpec::homodyne(2, 1.0)).valid;
  UnravelingSpec bad = UnravelingSpec::heterodyne(2, 0.5);
  bad.xi(0, 0) = 0.9;
  const bool rejected = !validate_unraveling(bad).valid;
  return {heterodyne && homodyne && rejected,
          "heterodyne accepted, homodyne accepted, |Xi| > eta rejected"};
}

Outcome belavkin_positivity(Rng& rng) {
  const Eigen::Index d = 6;
  CMat h = random_matrix(d, rng);
  h = 0.5 * (h + h.adjoint());
  std::vector<LindbladChannel> channels = {{random_matrix(d, rng), 0.3},
                                           {random_matrix(d, rng), 0.2}};
  const BelavkinIntegrator full(h, channels, UnravelingSpec::homodyne(2, 1.0), 1e-3);
  const BelavkinIntegrator partial(h, channels, UnravelingSpec::heterodyne(2, 0.4), 1e-3);
  CVec psi(d);
  psi.setZero();
  psi[0] = 1.0;
  DensityMatrix a = pure_state(psi);
  DensityMatrix b = random_density(d, rng);
  double purity_loss = 0.0;
  double min_eig = 1.0;
  for (int s = 0; s < 10000; ++s) {
    const double before = purity(a);
    a = full.step(a, rng).rho;
    purity_loss = std::max(purity_loss, before - purity(a));
    b = partial.step(b, rng).rho;
    if (s % 100 == 0) {
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<CMat>(b).eigenvalues().minCoeff());
    }
  }
  const bool ok = purity_loss < 1e-6 && min_eig > -1e-8;
  std::ostringstream s;
  s << "purity loss per step " << purity_loss << ", min eigenvalue " << min_eig;
  return {ok, s.str()};
}

Outcome csv_roundtrip(Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<double> col(1000);
  for (auto& v : col) v = g(rng) * std::pow(10.0, 20.0 * g(rng));
  TraceTable table;
  table.add_column("v", col);
  const TraceTable back = parse_csv(to_csv(table));
  return {back.column("v") == col, "17-digit CSV round trip is exact"};
}

Outcome energy_conservation(const SimConfig& cfg) {
  Model model = cfg.model;
  model.gas.gamma_c = 0.0;
  model.recoil_on = false;
  model.constants.g = 0.0;
  ParticleState s;
  s.phi = {0.3, 1.1, -0.4};
  s.r = Vec3(0.1 * model.trap.mode.waist, -0.05 * model.trap.mode.waist,
             0.05 * model.trap.mode.rayleigh_range);
  const double h = 1e-4 * model.trap.mode.waist;
  auto at_x = [&](double x) {
    ParticleState p;
    p.r.x() = x;
    return potential(p, model);
  };
  const double stiffness = (at_x(h) - 2.0 * at_x(0.0) + at_x(-h)) / (h * h);
  if (!(stiffness > 0.0)) return {false, "trap is not confining along x"};
  const double period = 2.0 * kPi * std::sqrt(model.body.mass / stiffness);
  SimulationOptions opts;
  opts.dt = 1e-4 * period;
  opts.duration = 1e5 * opts.dt;
  opts.stride = 1000;
  opts.integrator = Integrator::kVerlet;
  const Trajectory traj = simulate_trajectory(s, model, opts);
  double drift = 0.0;
  const double e0 = traj.energy.front();
  for (const double e : traj.energy) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
  return verdict(drift < 1e-6, "relative energy drift over 1e5 steps", drift);
}

}  // namespace

int run_check(const RunContext& ctx) {
  Rng rng = make_rng(ctx.config.integrator.seed, 0);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suite = {
      {"rotation_algebra", [&] { return rotation_algebra(rng); }},
      {"angular_velocity_map", [&] { return angular_velocity(rng); }},
      {"coupling_evaluation_paths", [&] { return coupling_paths(rng); }},
      {"polarization_completeness", [&] { return completeness(rng); }},
      {"dipole_sphere_integral", [&] { return dipole_integral(rng); }},
      {"dissipator_trace", [&] { return lindblad_trace(rng); }},
      {"unraveling_validator", [&] { return unraveling_cases(rng); }},
      {"belavkin_positivity", [&] { return belavkin_positivity(rng); }},
      {"csv_roundtrip", [&] { return csv_roundtrip(rng); }},
      {"energy_conservation", [&] { return energy_conservation(ctx.config); }},
  };
  std::ostringstream report;
  int failures = 0;
  for (const auto& [name, test] : suite) {
    Outcome o;
    try {
      o = test();
    } catch (const Error& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    report << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
  }
  if (ctx.log) *ctx.log << report.str();
  std::ofstream file(ctx.out_dir / "check.txt");
  file << report.str();
  if (!file) throw IoFailure((ctx.out_dir / "check.txt").string() + ": write failed");
  return failures == 0 ? kOk : kFailure;
}

}  // namespace levitodyn::cli
