#pragma once

#include "levitodyn/constants.hpp"
#include "levitodyn/kinematics.hpp"
#include "levitodyn/optics.hpp"

namespace levitodyn {

// Optical trap and the particle's optical response.
struct TrapParams {
  double power = 1.0;          // P, W
  double cross_section = 1.0;  // sigma_L, m^2
  double volume = 1.0;         // V, m^3
  GaussianMode mode;
  Polarization pol;
  Susceptibility chi;
  // Laser angular frequency; derived as 2 pi c / lambda when not positive.
  double omega_override = 0.0;

  // V P / (c sigma_L): the gradient potential per unit |u|^2 and unit coupling.
  double intensity_prefactor(const PhysicalConstants& k) const {
    return volume * power / (k.c * cross_section);
  }
  double laser_angular_frequency(const PhysicalConstants& k) const {
    return omega_override > 0.0 ? omega_override : 2.0 * kPi * k.c / mode.wavelength;
  }
  void validate() const;
};

// Phase-space point of the rigid particle. Angles are measured in a reference
// frame `frame` (identity unless the integrator has re-seated the Euler
// parametrization away from gimbal lock); the lab orientation is frame * F(phi).
struct ParticleState {
  Vec3 r = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  EulerAngles phi;
  AngularMomenta pi;
  Mat3 frame = Mat3::Identity();

  Mat3 orientation() const { return frame * rotation_from_euler(phi); }
  bool finite() const;
};

}  // namespace levitodyn
