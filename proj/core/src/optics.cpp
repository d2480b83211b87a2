#include "levitodyn/optics.hpp"

#include <cmath>

#include "levitodyn/errors.hpp"

namespace levitodyn {

Polarization elliptical_polarization(double bx, double by) {
  const double norm2 = bx * bx + by * by;
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw DegeneratePolarization("polarization parameters b_x and b_y are both zero");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  Polarization pol;
  pol.vector = CVec3(Complex(bx * inv, 0.0), Complex(0.0, by * inv), Complex(0.0, 0.0));
  pol.bx = bx;
  pol.by = by;
  return pol;
}

double GaussianMode::width(double z) const {
  const double zr = z / rayleigh_range;
  return waist * std::sqrt(1.0 + zr * zr);
}

void GaussianMode::validate() const {
  if (!(waist > 0.0 && rayleigh_range > 0.0 && wavelength > 0.0)) {
    throw InvalidArgument("beam waist, Rayleigh range and wavelength must be positive");
  }
}

double mode_intensity(const GaussianMode& mode, const Vec3& r) {
  const double zr = r[2] / mode.rayleigh_range;
  const double s = 1.0 + zr * zr;
  const double w2 = mode.waist * mode.waist * s;
  return std::exp(-2.0 * (mode.a1 * r[0] * r[0] + mode.a2 * r[1] * r[1]) / w2) / s;
}

Complex mode_value(const GaussianMode& mode, const Vec3& r) {
  const double w = mode.width(r[2]);
  const double envelope =
      (mode.waist / w) * std::exp(-(mode.a1 * r[0] * r[0] + mode.a2 * r[1] * r[1]) / (w * w));
  return std::polar(envelope, mode.wavenumber() * r[2]);
}

IntensityExpansion::IntensityExpansion(const GaussianMode& mode, double prefactor) {
  // |u|^2 = s^-1 exp(-q / s) with s = 1 + z^2/zR^2, q = 2 (a1 x^2 + a2 y^2) / w0^2.
  // To fourth order: (1 - zeta + zeta^2) - q (1 - 2 zeta) + q^2 / 2.
  const double w2 = mode.waist * mode.waist;
  const double zr2 = mode.rayleigh_range * mode.rayleigh_range;
  const double qx = 2.0 * mode.a1 / w2;
  const double qy = 2.0 * mode.a2 / w2;
  auto set = [&](int k, int l, int m, double v) {
    table_[(k * kSide + l) * kSide + m] = prefactor * v;
  };
  set(0, 0, 0, 1.0);
  set(0, 0, 2, -1.0 / zr2);
  set(0, 0, 4, 1.0 / (zr2 * zr2));
  set(2, 0, 0, -qx);
  set(0, 2, 0, -qy);
  set(2, 0, 2, 2.0 * qx / zr2);
  set(0, 2, 2, 2.0 * qy / zr2);
  set(4, 0, 0, 0.5 * qx * qx);
  set(0, 4, 0, 0.5 * qy * qy);
  set(2, 2, 0, qx * qy);
}

double IntensityExpansion::coefficient(int k, int l, int m) const {
  if (k < 0 || l < 0 || m < 0 || k + l + m > kMaxOrder) {
    throw InvalidArgument("expansion index outside total order 4");
  }
  return table_[(k * kSide + l) * kSide + m];
}

double IntensityExpansion::evaluate(const Vec3& r) const {
  double sum = 0.0;
  for (int k = 0; k <= kMaxOrder; ++k) {
    for (int l = 0; k + l <= kMaxOrder; ++l) {
      for (int m = 0; k + l + m <= kMaxOrder; ++m) {
        const double c = table_[(k * kSide + l) * kSide + m];
        if (c != 0.0) {
          sum += c * std::pow(r[0], k) * std::pow(r[1], l) * std::pow(r[2], m);
        }
      }
    }
  }
  return sum;
}

IntensityExpansion intensity_expansion(const GaussianMode& mode, double prefactor) {
  return IntensityExpansion(mode, prefactor);
}

void Susceptibility::validate() const {
  if (!(principal().minCoeff() > 0.0)) {
    throw InvalidArgument("principal susceptibilities chi0 (1 + delta_chi) must be positive");
  }
}

PolarizationBasis scattering_basis(const Vec3& n) {
  const double norm = n.norm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    throw NotUnitVector("scattering direction is not a unit vector");
  }
  PolarizationBasis basis;
  basis.n = n;
  Vec3 e1, e2;
  if (std::abs(n[2]) < 0.999) {
    e1 = Vec3::UnitZ().cross(n).normalized();
    e2 = n.cross(e1);
  } else {
    // Near the beam axis: e2 from e_x, chosen so that n = e_z gives (e_x, e_y).
    e2 = n.cross(Vec3::UnitX()).normalized();
    e1 = e2.cross(n);
  }
  basis.e1 = e1.cast<Complex>();
  basis.e2 = e2.cast<Complex>();
  return basis;
}

CircularAmplitudes circular_from_linear(Complex amp_x, Complex amp_y) {
  const Complex i(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return {(amp_x + i * amp_y) * inv_sqrt2, (amp_x - i * amp_y) * inv_sqrt2};
}

Mat3 lab_susceptibility(const Mat3& orientation, const Susceptibility& chi) {
  return orientation * chi.principal().asDiagonal() * orientation.transpose();
}

Mat3 lab_susceptibility(const EulerAngles& phi, const Susceptibility& chi) {
  return lab_susceptibility(rotation_from_euler(phi), chi);
}

double gradient_coupling(const Mat3& orientation, const Susceptibility& chi,
                         const Polarization& pol) {
  const Mat3 lab = lab_susceptibility(orientation, chi);
  // Imaginary part vanishes identically for a real symmetric tensor.
  return (pol.vector.adjoint() * lab.cast<Complex>() * pol.vector)(0, 0).real();
}

double gradient_coupling(const EulerAngles& phi, const Susceptibility& chi,
                         const Polarization& pol) {
  return gradient_coupling(rotation_from_euler(phi), chi, pol);
}

double gradient_coupling_trig(const EulerAngles& phi, const Susceptibility& chi,
                              const Polarization& pol) {
  const double ca = std::cos(phi.alpha), sa = std::sin(phi.alpha);
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  const double cg = std::cos(phi.gamma), sg = std::sin(phi.gamma);
  const Vec3 x = chi.principal();
  const auto sq = [](double v) { return v * v; };
  const double along_x = x[0] * sq(ca * cb * cg - sa * sg) +
                         x[1] * sq(ca * cb * sg + sa * cg) +
                         x[2] * sq(ca) * sq(sb);
  const double along_y = x[0] * sq(sa * cb * cg + ca * sg) +
                         x[1] * sq(ca * cg - sa * cb * sg) +
                         x[2] * sq(sa) * sq(sb);
  const double bx2 = pol.bx * pol.bx;
  const double by2 = pol.by * pol.by;
  return (bx2 * along_x + by2 * along_y) / (bx2 + by2);
}

}  // namespace levitodyn
