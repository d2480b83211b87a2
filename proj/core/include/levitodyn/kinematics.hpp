#pragma once

#include "levitodyn/types.hpp"

namespace levitodyn {

// Below this |sin(beta)| the angular-velocity map N is treated as singular.
inline constexpr double kDefaultGimbalThreshold = 1e-8;

// z-y'-z'' Euler angles, radians. Stored unwrapped.
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  Vec3 vector() const { return {alpha, beta, gamma}; }
  static EulerAngles from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

// Momenta conjugate to (alpha, beta, gamma), J s.
struct AngularMomenta {
  double pi_alpha = 0.0;
  double pi_beta = 0.0;
  double pi_gamma = 0.0;

  Vec3 vector() const { return {pi_alpha, pi_beta, pi_gamma}; }
  static AngularMomenta from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

// Principal moments of inertia, kg m^2.
class InertiaTensor {
 public:
  // Throws InvalidArgument unless all moments are positive and satisfy the
  // triangle inequalities I_i + I_j >= I_k.
  InertiaTensor(double i1, double i2, double i3);

  static InertiaTensor spherical(double i0) { return {i0, i0, i0}; }

  double operator[](int axis) const { return moments_[axis]; }
  const Vec3& moments() const { return moments_; }
  Mat3 matrix() const { return moments_.asDiagonal(); }
  Mat3 inverse() const { return moments_.cwiseInverse().asDiagonal(); }
  double trace() const { return moments_.sum(); }

 private:
  Vec3 moments_;
};

// Right-handed rotation by `angle` about coordinate axis 1 (x), 2 (y) or 3 (z).
Mat3 axis_rotation(int axis, double angle);

// F(phi) = F_z(alpha) F_y(beta) F_z(gamma); maps body-frame to lab-frame
// components.
Mat3 rotation_from_euler(const EulerAngles& phi);

// Euler angles of a rotation matrix. When `reference` is given, alpha and
// gamma are shifted by multiples of 2 pi to lie closest to it.
EulerAngles euler_from_rotation(const Mat3& rotation,
                                const EulerAngles* reference = nullptr);

// Columns [e_z | F_z(alpha) e_y | F_z(alpha) F_y(beta) e_z]; omega_lab = N phidot.
Mat3 n_matrix(const EulerAngles& phi);

// Throws GimbalLock when |sin(beta)| < threshold.
Mat3 n_matrix_inverse(const EulerAngles& phi,
                      double threshold = kDefaultGimbalThreshold);

// B = F^T N, mapping phidot to the body-frame angular velocity. Depends on
// (beta, gamma) only.
Mat3 body_rate_matrix(const EulerAngles& phi);

// Partial derivatives of body_rate_matrix with respect to alpha, beta, gamma
// (the alpha derivative is identically zero).
Mat3 body_rate_matrix_derivative(const EulerAngles& phi, int angle);

// L_lab = (N^T)^{-1} pi.
Vec3 lab_angular_momentum(const EulerAngles& phi, const AngularMomenta& pi,
                          double threshold = kDefaultGimbalThreshold);

// pi = N^T L_lab.
AngularMomenta momenta_from_lab(const EulerAngles& phi, const Vec3& lab_momentum);

// pi^T N^{-1} F I^{-1} F^T (N^T)^{-1} pi / 2.
double rotational_kinetic_energy(const EulerAngles& phi, const AngularMomenta& pi,
                                 const InertiaTensor& inertia,
                                 double threshold = kDefaultGimbalThreshold);

// Euler-angle rates phidot = dT/dpi.
Vec3 euler_rates(const EulerAngles& phi, const AngularMomenta& pi,
                 const InertiaTensor& inertia,
                 double threshold = kDefaultGimbalThreshold);

// dT/dphi at fixed pi (the alpha component vanishes).
Vec3 kinetic_energy_angle_gradient(const EulerAngles& phi, const AngularMomenta& pi,
                                   const InertiaTensor& inertia,
                                   double threshold = kDefaultGimbalThreshold);

// Generalized mass matrix B^T I B of the rotor in Euler coordinates.
Mat3 rotational_mass_matrix(const EulerAngles& phi, const InertiaTensor& inertia);

// (L_zeta)_{ij} = -epsilon_{zeta i j}, zeta in {1, 2, 3}, so that
// exp(theta L_zeta) = F_zeta(theta).
Mat3 rotation_generator(int axis);

// Skew matrix [v]_x with [v]_x w = v x w.
Mat3 skew(const Vec3& v);

}  // namespace levitodyn
