#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "levitodyn/constants.hpp"
#include "levitodyn/kinematics.hpp"
#include "levitodyn/scattering.hpp"
#include "levitodyn/trap.hpp"

namespace levitodyn {

struct RigidBody {
  double mass = 1.0;  // M, kg
  InertiaTensor inertia = InertiaTensor::spherical(1.0);

  void validate() const;
};

struct GasParams {
  double gamma_c = 0.0;           // 1/s
  double temperature = 300.0;     // K
  double constituent_mass = 1.0;  // m, kg

  void validate() const;
};

// Rotational diffusion weights (tr I / 2 - I_zeta).
Vec3 rotational_diffusion_weights(const InertiaTensor& inertia);

// Everything the classical engine needs. Immutable once built.
struct Model {
  TrapParams trap;
  RigidBody body;
  GasParams gas;
  PhysicalConstants constants;
  bool recoil_on = false;
  // Detector-independent quadrature used for the recoil terms.
  int recoil_order_theta = 16;
  int recoil_order_phi = 32;

  void validate() const;
};

struct ForceOptions {
  double relative_step = 1e-6;  // h / characteristic scale
  bool richardson = false;      // 5-point stencil instead of 3-point
};

struct Generalized {
  Vec3 force = Vec3::Zero();   // N
  Vec3 torque = Vec3::Zero();  // conjugate to (alpha, beta, gamma), J
};

// U(r, phi) = -(V P / c sigma_L) |u(r)|^2 coupling(phi) + M g x.
double potential(const ParticleState& state, const Model& model);

// (-dU/dr, -dU/dphi) by central differences. Includes gravity and, with
// recoil on, the mean radiation-pressure force.
Generalized forces_and_torques(const ParticleState& state, const Model& model,
                               const ForceOptions& opts = {});

double kinetic_energy(const ParticleState& state, const Model& model);
double total_energy(const ParticleState& state, const Model& model);

// Momentum diffusion matrix D_p (noise covariance of p per unit time).
Mat3 recoil_diffusion_coefficients(const Model& model);
// Mean radiation-pressure force at the focus, along e_z.
Vec3 radiation_pressure_force(const Model& model);

// |sin beta| below which the Euler chart is re-seated. Keeping beta inside
// [pi/4, 3pi/4] bounds the Euler rates by sqrt(2) times the body rates.
inline constexpr double kReseatSinBeta = 0.7071067811865476;  // sin(pi / 4)

// Re-expresses the state in a new reference frame where beta = pi/2. The lab
// orientation and lab angular momentum are unchanged.
ParticleState reseat(const ParticleState& state);
bool needs_reseat(const ParticleState& state);

using Rng = std::mt19937_64;

// One stochastic Heun step of the full Langevin system.
ParticleState langevin_step(const ParticleState& state, const Model& model, double dt, Rng& rng,
                            const ForceOptions& opts = {});

// One generalized Stormer-Verlet step of the Hamiltonian flow (no gas, no
// recoil). Implicit stages are solved by fixed-point iteration.
ParticleState symplectic_step(const ParticleState& state, const Model& model, double dt,
                              const ForceOptions& opts = {});

enum class Integrator { kAuto, kHeun, kVerlet };

struct SimulationOptions {
  double dt = 1e-6;
  double duration = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // trajectory index within an ensemble
  int stride = 1;
  std::int64_t max_steps = 100'000'000;
  Integrator integrator = Integrator::kAuto;
  ForceOptions forces;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<ParticleState> states;
  std::vector<double> energy;
};

// Independent stream for (seed, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Throws InvalidArgument when duration / dt exceeds max_steps and
// NumericalBlowup on any non-finite state.
Trajectory simulate_trajectory(const ParticleState& initial, const Model& model,
                               const SimulationOptions& opts);

}  // namespace levitodyn
