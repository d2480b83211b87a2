#include "levitodyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

template <typename F>
double central_difference(F&& f, double h, bool richardson) {
  if (!richardson) {
    return (f(h) - f(-h)) / (2.0 * h);
  }
  return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
}

double position_scale(const GaussianMode& mode) {
  return std::min(mode.waist, mode.rayleigh_range);
}

Vec3 intensity_gradient(const Vec3& r, const GaussianMode& mode, const ForceOptions& opts) {
  const double h = opts.relative_step * position_scale(mode);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    g[i] = central_difference(
        [&](double s) {
          Vec3 x = r;
          x[i] += s;
          return mode_intensity(mode, x);
        },
        h, opts.richardson);
  }
  return g;
}

Vec3 coupling_gradient(const ParticleState& state, const TrapParams& trap,
                       const ForceOptions& opts) {
  const double h = opts.relative_step;
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    g[i] = central_difference(
        [&](double s) {
          Vec3 v = state.phi.vector();
          v[i] += s;
          const Mat3 orientation = state.frame * rotation_from_euler(EulerAngles::from_vector(v));
          return gradient_coupling(orientation, trap.chi, trap.pol);
        },
        h, opts.richardson);
  }
  return g;
}

// chi_lab eps_d for the current orientation.
CVec3 induced_dipole(const Mat3& orientation, const TrapParams& trap) {
  return lab_susceptibility(orientation, trap.chi).cast<Complex>() * trap.pol.vector;
}

// hbar^2 k^2 gamma_s int sum_nu |eps^dag v|^2 n n^T dn, closed form.
Mat3 recoil_tensor(const CVec3& v, double scale) {
  const double v2 = v.squaredNorm();
  const Mat3 outer = (v * v.adjoint()).real();
  return scale * (4.0 * kPi / 15.0) * (4.0 * v2 * Mat3::Identity() - 2.0 * outer);
}

double recoil_scale(const Model& model) {
  const double k = model.trap.mode.wavenumber();
  const double gs = scattering_rate(model.trap, model.constants);
  return model.constants.hbar * model.constants.hbar * k * k * gs;
}

Vec3 radiation_force_at(const CVec3& v, double intensity, const Model& model) {
  const double k = model.trap.mode.wavenumber();
  const double gs = scattering_rate(model.trap, model.constants);
  return Vec3(0.0, 0.0,
              model.constants.hbar * k * gs * intensity * (8.0 * kPi / 3.0) * v.squaredNorm());
}

struct Drift {
  Vec3 rdot, pdot, phidot, pidot;
};

Drift drift(const ParticleState& s, const Model& model, const ForceOptions& opts) {
  const Generalized gen = forces_and_torques(s, model, opts);
  const InertiaTensor& inertia = model.body.inertia;
  const double gc = model.gas.gamma_c;
  Drift d;
  d.rdot = s.p / model.body.mass;
  d.pdot = gen.force - gc * s.p;
  d.phidot = euler_rates(s.phi, s.pi, inertia);
  d.pidot = gen.torque - kinetic_energy_angle_gradient(s.phi, s.pi, inertia) - gc * s.pi.vector();
  return d;
}

struct Noise {
  Vec3 dp, dpi;
};

Noise noise(const ParticleState& s, const Model& model, const Vec3& w_t, const Vec3& w_r,
            const Vec3& w_recoil) {
  const double kt = model.constants.k_b * model.gas.temperature;
  const double gc = model.gas.gamma_c;
  Noise n;
  n.dp = std::sqrt(2.0 * model.body.mass * gc * kt) * w_t;
  const Mat3 b = body_rate_matrix(s.phi);
  const Vec3 sqrt_i = model.body.inertia.moments().cwiseSqrt();
  n.dpi = std::sqrt(2.0 * gc * kt) * (b.transpose() * (sqrt_i.asDiagonal() * w_r));
  if (model.recoil_on) {
    const Mat3 d = recoil_tensor(induced_dipole(s.orientation(), model.trap), recoil_scale(model)) *
                   mode_intensity(model.trap.mode, s.r);
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(d);
    const Vec3 sd = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    n.dp += eig.eigenvectors() * (sd.asDiagonal() * (eig.eigenvectors().transpose() * w_recoil));
  }
  return n;
}

ParticleState advance(const ParticleState& s, const Drift& d, const Noise& n, double dt) {
  ParticleState out = s;
  out.r += d.rdot * dt;
  out.p += d.pdot * dt + n.dp;
  out.phi = EulerAngles::from_vector(s.phi.vector() + d.phidot * dt);
  out.pi = AngularMomenta::from_vector(s.pi.vector() + d.pidot * dt + n.dpi);
  return out;
}

Vec3 lab_momentum_any(const EulerAngles& phi, const AngularMomenta& pi) {
  if (std::abs(std::sin(phi.beta)) >= kDefaultGimbalThreshold) {
    return lab_angular_momentum(phi, pi);
  }
  const Mat3 nt = n_matrix(phi).transpose();
  return nt.completeOrthogonalDecomposition().solve(pi.vector());
}

// dH/dq with q = (r, phi) at fixed momenta.
void position_gradient(const ParticleState& s, const Model& model, const ForceOptions& opts,
                       Vec3& grad_r, Vec3& grad_phi) {
  const Generalized gen = forces_and_torques(s, model, opts);
  grad_r = -gen.force;
  grad_phi = -gen.torque + kinetic_energy_angle_gradient(s.phi, s.pi, model.body.inertia);
}

}  // namespace

void RigidBody::validate() const {
  if (!(mass > 0.0)) {
    throw InvalidArgument("particle mass must be positive");
  }
}

void GasParams::validate() const {
  if (!(gamma_c >= 0.0)) {
    throw InvalidArgument("gas collision rate must be non-negative");
  }
  if (!(temperature > 0.0)) {
    throw InvalidArgument("gas temperature must be positive");
  }
  if (!(constituent_mass > 0.0)) {
    throw InvalidArgument("gas constituent mass must be positive");
  }
}

Vec3 rotational_diffusion_weights(const InertiaTensor& inertia) {
  return Vec3::Constant(0.5 * inertia.trace()) - inertia.moments();
}

void Model::validate() const {
  trap.validate();
  body.validate();
  gas.validate();
}

double potential(const ParticleState& state, const Model& model) {
  const double k = model.trap.intensity_prefactor(model.constants);
  const double c = gradient_coupling(state.orientation(), model.trap.chi, model.trap.pol);
  return -k * mode_intensity(model.trap.mode, state.r) * c +
         model.body.mass * model.constants.g * state.r.x();
}

Generalized forces_and_torques(const ParticleState& state, const Model& model,
                               const ForceOptions& opts) {
  const TrapParams& trap = model.trap;
  const double k = trap.intensity_prefactor(model.constants);
  const Mat3 orientation = state.orientation();
  const double c = gradient_coupling(orientation, trap.chi, trap.pol);
  const double u2 = mode_intensity(trap.mode, state.r);

  Generalized out;
  out.force = k * c * intensity_gradient(state.r, trap.mode, opts);
  out.force.x() -= model.body.mass * model.constants.g;
  out.torque = k * u2 * coupling_gradient(state, trap, opts);
  if (model.recoil_on) {
    out.force += radiation_force_at(induced_dipole(orientation, trap), u2, model);
  }
  return out;
}

double kinetic_energy(const ParticleState& state, const Model& model) {
  return state.p.squaredNorm() / (2.0 * model.body.mass) +
         rotational_kinetic_energy(state.phi, state.pi, model.body.inertia);
}

double total_energy(const ParticleState& state, const Model& model) {
  return kinetic_energy(state, model) + potential(state, model);
}

Mat3 recoil_diffusion_coefficients(const Model& model) {
  const double scale = recoil_scale(model);
  if (scale == 0.0) {
    return Mat3::Zero();
  }
  const CVec3 v = induced_dipole(Mat3::Identity(), model.trap);
  DetectorGeometry sphere;
  sphere.order_theta = model.recoil_order_theta;
  sphere.order_phi = model.recoil_order_phi;
  const SphereQuadrature quad(sphere);
  Mat3 acc = Mat3::Zero();
  for (const auto& node : quad.nodes()) {
    const double w = std::norm(node.basis.e1.dot(v)) + std::norm(node.basis.e2.dot(v));
    acc += node.weight * w * node.n * node.n.transpose();
  }
  return scale * acc;
}

Vec3 radiation_pressure_force(const Model& model) {
  return radiation_force_at(induced_dipole(Mat3::Identity(), model.trap), 1.0, model);
}

bool needs_reseat(const ParticleState& state) {
  return std::abs(std::sin(state.phi.beta)) < kReseatSinBeta;
}

ParticleState reseat(const ParticleState& state) {
  const Mat3 r = state.orientation();
  const Vec3 lab = state.frame * lab_momentum_any(state.phi, state.pi);
  const EulerAngles seat{0.0, 0.5 * kPi, 0.0};
  ParticleState out = state;
  out.frame = r * rotation_from_euler(seat).transpose();
  out.phi = seat;
  out.pi = momenta_from_lab(seat, out.frame.transpose() * lab);
  return out;
}

ParticleState langevin_step(const ParticleState& state, const Model& model, double dt, Rng& rng,
                            const ForceOptions& opts) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  const ParticleState s = needs_reseat(state) ? reseat(state) : state;
  std::normal_distribution<double> normal;
  const double sdt = std::sqrt(dt);
  Vec3 w_t, w_r, w_c = Vec3::Zero();
  for (int i = 0; i < 3; ++i) w_t[i] = normal(rng) * sdt;
  for (int i = 0; i < 3; ++i) w_r[i] = normal(rng) * sdt;
  if (model.recoil_on) {
    for (int i = 0; i < 3; ++i) w_c[i] = normal(rng) * sdt;
  }

  const Drift d0 = drift(s, model, opts);
  const Noise n0 = noise(s, model, w_t, w_r, w_c);
  const ParticleState pred = advance(s, d0, n0, dt);
  const Drift d1 = drift(pred, model, opts);
  const Noise n1 = noise(pred, model, w_t, w_r, w_c);

  const Drift dm{0.5 * (d0.rdot + d1.rdot), 0.5 * (d0.pdot + d1.pdot),
                 0.5 * (d0.phidot + d1.phidot), 0.5 * (d0.pidot + d1.pidot)};
  const Noise nm{0.5 * (n0.dp + n1.dp), 0.5 * (n0.dpi + n1.dpi)};
  return advance(s, dm, nm, dt);
}

ParticleState symplectic_step(const ParticleState& state, const Model& model, double dt,
                              const ForceOptions& opts) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  constexpr int kMaxIter = 100;
  constexpr double kTol = 1e-15;
  const ParticleState s = needs_reseat(state) ? reseat(state) : state;
  const InertiaTensor& inertia = model.body.inertia;
  const double h = 0.5 * dt;

  const Generalized gen0 = forces_and_torques(s, model, opts);
  ParticleState half = s;
  half.p = s.p + h * gen0.force;
  // pi_{1/2} = pi - h (dU/dphi + dT/dphi(phi, pi_{1/2}))
  Vec3 pih = s.pi.vector();
  for (int it = 0; it < kMaxIter; ++it) {
    const Vec3 next = s.pi.vector() + h * gen0.torque -
                      h * kinetic_energy_angle_gradient(s.phi, AngularMomenta::from_vector(pih),
                                                        inertia);
    const double change = (next - pih).norm();
    pih = next;
    if (change <= kTol * pih.norm()) break;
  }
  half.pi = AngularMomenta::from_vector(pih);

  ParticleState out = half;
  out.r = s.r + dt * half.p / model.body.mass;
  const Vec3 rate0 = euler_rates(s.phi, half.pi, inertia);
  Vec3 phi1 = s.phi.vector() + dt * rate0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Vec3 next =
        s.phi.vector() + h * (rate0 + euler_rates(EulerAngles::from_vector(phi1), half.pi, inertia));
    const double change = (next - phi1).norm();
    phi1 = next;
    if (change <= kTol * (1.0 + phi1.norm())) break;
  }
  out.phi = EulerAngles::from_vector(phi1);

  Vec3 grad_r, grad_phi;
  position_gradient(out, model, opts, grad_r, grad_phi);
  out.p = half.p - h * grad_r;
  out.pi = AngularMomenta::from_vector(pih - h * grad_phi);
  return out;
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Trajectory simulate_trajectory(const ParticleState& initial, const Model& model,
                               const SimulationOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.duration >= 0.0)) {
    throw InvalidArgument("simulation needs dt > 0 and duration >= 0");
  }
  if (opts.stride < 1) {
    throw InvalidArgument("output stride must be at least 1");
  }
  const double steps_real = std::round(opts.duration / opts.dt);
  if (steps_real > static_cast<double>(opts.max_steps)) {
    std::ostringstream msg;
    msg << "duration / dt = " << steps_real << " exceeds max_steps = " << opts.max_steps;
    throw InvalidArgument(msg.str());
  }
  const auto steps = static_cast<std::int64_t>(steps_real);
  Integrator method = opts.integrator;
  if (method == Integrator::kAuto) {
    method = (model.gas.gamma_c == 0.0 && !model.recoil_on) ? Integrator::kVerlet
                                                             : Integrator::kHeun;
  }

  Rng rng = make_rng(opts.seed, opts.stream);
  Trajectory out;
  const auto samples = static_cast<std::size_t>(steps / opts.stride + 1);
  out.t.reserve(samples);
  out.states.reserve(samples);
  out.energy.reserve(samples);

  ParticleState s = initial;
  auto record = [&](std::int64_t step) {
    out.t.push_back(static_cast<double>(step) * opts.dt);
    out.states.push_back(s);
    out.energy.push_back(total_energy(s, model));
  };
  record(0);
  for (std::int64_t step = 1; step <= steps; ++step) {
    s = method == Integrator::kVerlet ? symplectic_step(s, model, opts.dt, opts.forces)
                                      : langevin_step(s, model, opts.dt, rng, opts.forces);
    if (!s.finite()) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "non-finite state at step " << step << " (t = " << step * opts.dt
          << "): r = (" << s.r.transpose() << "), p = (" << s.p.transpose() << "), phi = ("
          << s.phi.vector().transpose() << ")";
      throw NumericalBlowup(msg.str());
    }
    if (step % opts.stride == 0) {
      record(step);
    }
  }
  return out;
}

}  // namespace levitodyn
