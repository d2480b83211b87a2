#pragma once

#include <array>

#include "levitodyn/kinematics.hpp"
#include "levitodyn/types.hpp"

namespace levitodyn {

// Trapping-field polarization eps_d = (b_x, i b_y, 0) / sqrt(b_x^2 + b_y^2).
struct Polarization {
  CVec3 vector = CVec3(1.0, 0.0, 0.0);
  double bx = 1.0;
  double by = 0.0;

  bool is_linear() const { return bx == 0.0 || by == 0.0; }
};

// Throws DegeneratePolarization when b_x = b_y = 0.
Polarization elliptical_polarization(double bx, double by);

// Paraxial Gaussian mode with independent transverse asymmetry factors.
struct GaussianMode {
  double waist = 1.0;           // w0, m
  double rayleigh_range = 1.0;  // z_R, m
  double wavelength = 1.0;      // lambda, m
  double a1 = 1.0;
  double a2 = 1.0;

  double wavenumber() const { return 2.0 * kPi / wavelength; }
  double width(double z) const;  // w(z)
  void validate() const;
};

// u(r) = (w0 / w(z)) exp(-(a1 x^2 + a2 y^2) / w(z)^2) exp(i k z).
Complex mode_value(const GaussianMode& mode, const Vec3& r);

// |u(r)|^2, evaluated without forming the complex phase.
double mode_intensity(const GaussianMode& mode, const Vec3& r);

// Taylor coefficients c_{k,l,m} of prefactor * |u|^2 about the focus, all
// k + l + m <= 4.
class IntensityExpansion {
 public:
  static constexpr int kMaxOrder = 4;

  IntensityExpansion(const GaussianMode& mode, double prefactor);

  double coefficient(int k, int l, int m) const;
  double evaluate(const Vec3& r) const;

 private:
  static constexpr int kSide = kMaxOrder + 1;
  std::array<double, kSide * kSide * kSide> table_{};
};

IntensityExpansion intensity_expansion(const GaussianMode& mode, double prefactor);

// chi = chi0 (1 + delta_chi) with delta_chi diagonal in the body frame.
struct Susceptibility {
  double chi0 = 1.0;
  Vec3 delta = Vec3::Zero();

  Vec3 principal() const { return chi0 * (Vec3::Ones() + delta); }
  Mat3 body_tensor() const { return principal().asDiagonal(); }
  double anisotropy_norm() const { return delta.cwiseAbs().maxCoeff(); }
  // Throws InvalidArgument unless every principal value is positive.
  void validate() const;
};

// Orthonormal transverse basis (e1, e2) for a scattering direction n.
struct PolarizationBasis {
  CVec3 e1;
  CVec3 e2;
  Vec3 n;

  const CVec3& operator[](int nu) const { return nu == 1 ? e1 : e2; }
};

// Deterministic right-handed triad (e1, e2, n). Throws NotUnitVector when
// |n| deviates from 1 by more than 1e-10.
PolarizationBasis scattering_basis(const Vec3& n);

struct CircularAmplitudes {
  Complex left;
  Complex right;
};

// amp_L = (amp_x + i amp_y) / sqrt2, amp_R = (amp_x - i amp_y) / sqrt2.
CircularAmplitudes circular_from_linear(Complex amp_x, Complex amp_y);

// F chi F^T.
Mat3 lab_susceptibility(const EulerAngles& phi, const Susceptibility& chi);
Mat3 lab_susceptibility(const Mat3& orientation, const Susceptibility& chi);

// Re(eps_d^dagger F chi F^T eps_d), by matrix contraction.
double gradient_coupling(const EulerAngles& phi, const Susceptibility& chi,
                         const Polarization& pol);
double gradient_coupling(const Mat3& orientation, const Susceptibility& chi,
                         const Polarization& pol);

// Same quantity from the closed-form trigonometric expansion in
// (alpha, beta, gamma, b_x, b_y). Kept as an independent evaluation path.
double gradient_coupling_trig(const EulerAngles& phi, const Susceptibility& chi,
                              const Polarization& pol);

}  // namespace levitodyn
