#pragma once

#include <functional>
#include <vector>

#include "levitodyn/dynamics.hpp"
#include "levitodyn/scattering.hpp"
#include "levitodyn/sme.hpp"

namespace levitodyn {

// Scattering amplitude operator A_{n,nu} for a direction and polarization.
using AmplitudeOperator = std::function<CMat(const Vec3& n, const CVec3& eps)>;

// Truncated toy model. Hamiltonians are stored as H / hbar (rad/s).
struct QuantumModel {
  CMat hamiltonian;
  std::vector<LindbladChannel> gas;
  AmplitudeOperator amplitude;
  double gamma_s = 0.0;
  CMat position;  // x for the oscillator, sin(theta) for the rotor
  double frequency = 0.0;  // harmonic angular frequency about x = 0 or theta = 0, rad/s

  Eigen::Index dim() const { return hamiltonian.rows(); }
};

// One channel per quadrature node and polarization with rate gamma_s w.
std::vector<LindbladChannel> scattering_channels(const QuantumModel& model,
                                                 const SphereQuadrature& quad);
// sqrt(gamma_s) sum_nu int_S A dn over a detector cap.
CMat collective_operator(const QuantumModel& model, const SphereQuadrature& cap);

// Quadrature over the complement of a detector cap (empty for a full-sphere
// detector).
std::vector<QuadratureNode> complement_nodes(const DetectorGeometry& det);

// Oscillator along x in a Fock basis: H = omega a^dag a with omega from the
// transverse trap stiffness, scattering operators linearized in x, and the
// Caldeira-Leggett pair (friction Hamiltonian plus one Lindblad channel).
// Throws InvalidArgument for fock_dim < 10.
QuantumModel build_1d_translational_model(const TrapParams& trap, const RigidBody& body,
                                          const GasParams& gas,
                                          const PhysicalConstants& constants, int fock_dim);

// Rotation about the lab z axis in the basis |-l>..|l>: kinetic term
// hbar m^2 / (2 I3), orientation potential from the Fourier components of
// the gradient coupling (mean removed), and four planar gas channels.
// Throws InvalidArgument for l_max < 5.
QuantumModel build_planar_rotor_model(const TrapParams& trap, const RigidBody& body,
                                      const GasParams& gas, const PhysicalConstants& constants,
                                      int l_max);

// Fourier coefficient c_k of the gradient coupling as a function of the
// rotation angle about lab z.
Complex planar_coupling_harmonic(const TrapParams& trap, int k);

// Bose-Einstein occupation 1 / (exp(hbar omega / kT) - 1).
double thermal_occupation(double hbar_omega, double kt);

// How the photocurrent is read out.
enum class UnravelingKind {
  kCollective,  // one current from the whole cap
  kPerChannel,  // one current per quadrature node and polarization
};

// Monitored channels first, followed by the compressed unmonitored rest
// (complement of the cap, gas, and for a collective readout the part of the
// cap orthogonal to the collective mode). The recorded current is
// J = sum_k weight_k Re J_k over the monitored channels, with mean
// eta tr[(c_S e^{i dPhi} + h.c.) rho] and variance 2 Omega eta / dt.
struct HomodyneSetup {
  CMat hamiltonian;
  std::vector<LindbladChannel> channels;
  UnravelingSpec spec;
  Eigen::VectorXd current_weights;

  double current(const CVec& channel_currents) const;
};

HomodyneSetup homodyne_setup(const QuantumModel& model, const DetectorGeometry& det,
                             double delta_phi, UnravelingKind kind);

CMat number_operator(Eigen::Index dim);
CMat annihilation_operator(Eigen::Index dim);

}  // namespace levitodyn
