#include "levitodyn/scattering.hpp"

#include <cmath>
#include <memory>

#include <gsl/gsl_integration.h>

#include "levitodyn/errors.hpp"

namespace levitodyn {

void TrapParams::validate() const {
  if (!(power > 0.0 && cross_section > 0.0 && volume > 0.0)) {
    throw InvalidArgument("trap power, beam cross-section and particle volume must be positive");
  }
  mode.validate();
  chi.validate();
}

bool ParticleState::finite() const {
  return r.allFinite() && p.allFinite() && phi.vector().allFinite() &&
         pi.vector().allFinite() && frame.allFinite();
}

double effective_cross_section(double volume, double wavelength) {
  const double l2 = wavelength * wavelength;
  return kPi * kPi * volume * volume / (l2 * l2);
}

double scattering_rate(const TrapParams& trap, const PhysicalConstants& k) {
  return scatter_params(trap, k).gamma_s;
}

ScatterParams scatter_params(const TrapParams& trap, const PhysicalConstants& k) {
  ScatterParams out;
  out.sigma_r_tilde = effective_cross_section(trap.volume, trap.mode.wavelength);
  out.omega_l = trap.laser_angular_frequency(k);
  out.gamma_s = out.sigma_r_tilde / trap.cross_section * trap.power / (k.hbar * out.omega_l);
  return out;
}

double clausius_mossotti(double epsilon_r) {
  return 3.0 * (epsilon_r - 1.0) / (epsilon_r + 2.0);
}

double rayleigh_cross_section(double volume, double epsilon_r, double wavelength) {
  if (!(epsilon_r > 1.0)) {
    throw UnphysicalDielectric("dielectric function must exceed 1");
  }
  const double f = (epsilon_r - 1.0) / (epsilon_r + 2.0);
  const double l2 = wavelength * wavelength;
  return 24.0 * kPi * kPi * kPi * volume * volume / (l2 * l2) * f * f;
}

double DetectorGeometry::solid_angle() const {
  return 2.0 * kPi * (1.0 - std::cos(half_angle));
}

void DetectorGeometry::validate() const {
  if (!(half_angle > 0.0 && half_angle <= kPi)) {
    throw InvalidArgument("detector half-angle must lie in (0, pi]");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("detector efficiency must lie in [0, 1]");
  }
  if (order_theta < 2 || order_phi < 2) {
    throw InvalidArgument("detector quadrature order must be at least 2");
  }
  if (!(axis.norm() > 0.0)) {
    throw InvalidArgument("detector axis must be nonzero");
  }
}

SphereQuadrature::SphereQuadrature(const DetectorGeometry& det) {
  det.validate();
  const Vec3 axis = det.axis.normalized();
  const PolarizationBasis frame = scattering_basis(axis);
  Mat3 to_lab;
  to_lab.col(0) = frame.e1.real();
  to_lab.col(1) = frame.e2.real();
  to_lab.col(2) = axis;

  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(det.order_theta),
            &gsl_integration_glfixed_table_free);
  const double cos_min = std::cos(det.half_angle);
  const double dphi = 2.0 * kPi / det.order_phi;
  nodes_.reserve(static_cast<std::size_t>(det.order_theta) * det.order_phi);
  for (int i = 0; i < det.order_theta; ++i) {
    double ct = 0.0, wt = 0.0;
    gsl_integration_glfixed_point(cos_min, 1.0, i, &ct, &wt, table.get());
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < det.order_phi; ++j) {
      const double az = (j + 0.5) * dphi;
      Vec3 n = to_lab * Vec3(st * std::cos(az), st * std::sin(az), ct);
      n.normalize();
      nodes_.push_back({n, wt * dphi, scattering_basis(n)});
    }
  }
  solid_angle_ = det.solid_angle();
}

Complex integrate_over_detector(const DirectionIntegrand& f, const DetectorGeometry& det) {
  return SphereQuadrature(det).integrate(f);
}

Complex classical_amplitude(const Vec3& r, const Mat3& orientation, const TrapParams& trap,
                            const Vec3& n, const CVec3& eps) {
  const Mat3 chi_lab = lab_susceptibility(orientation, trap.chi);
  const Complex coupling = eps.dot(chi_lab.cast<Complex>() * trap.pol.vector);
  const Complex phase = std::polar(1.0, trap.mode.wavenumber() * n.dot(r));
  return coupling * mode_value(trap.mode, r) * phase;
}

Complex classical_amplitude(const ParticleState& state, const TrapParams& trap, const Vec3& n,
                            int nu) {
  if (nu != 1 && nu != 2) {
    throw InvalidArgument("polarization index must be 1 or 2");
  }
  const PolarizationBasis basis = scattering_basis(n);
  return classical_amplitude(state.r, state.orientation(), trap, n, basis[nu]);
}

}  // namespace levitodyn
