#pragma once

#include <functional>
#include <vector>

#include "levitodyn/optics.hpp"
#include "levitodyn/trap.hpp"

namespace levitodyn {

struct ScatterParams {
  double gamma_s = 0.0;        // 1/s
  double sigma_r_tilde = 0.0;  // m^2
  double omega_l = 0.0;        // rad/s
};

// sigma~_R = pi^2 V^2 / lambda^4.
double effective_cross_section(double volume, double wavelength);

// gamma_s = (sigma~_R / sigma_L) P / (hbar omega_L).
double scattering_rate(const TrapParams& trap, const PhysicalConstants& k);
ScatterParams scatter_params(const TrapParams& trap, const PhysicalConstants& k);

// sigma_R = (24 pi^3 V^2 / lambda^4) ((eps_R - 1) / (eps_R + 2))^2.
// Throws UnphysicalDielectric for eps_R <= 1.
double rayleigh_cross_section(double volume, double epsilon_r, double wavelength);

// Isotropic susceptibility 3 (eps_R - 1) / (eps_R + 2) of a dielectric sphere.
double clausius_mossotti(double epsilon_r);

// Collection cap S: all directions within half_angle of axis.
struct DetectorGeometry {
  Vec3 axis = Vec3::UnitZ();
  double half_angle = kPi;  // rad, (0, pi]
  double eta = 1.0;         // efficiency
  int order_theta = 32;     // Gauss-Legendre nodes in cos(theta)
  int order_phi = 64;       // trapezoid nodes in azimuth

  double solid_angle() const;  // 2 pi (1 - cos half_angle)
  void validate() const;
};

struct QuadratureNode {
  Vec3 n;
  double weight;
  PolarizationBasis basis;
};

// Product Gauss-Legendre (cos theta) x trapezoid (azimuth) rule over a cap,
// with the scattering basis precomputed at every node.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(const DetectorGeometry& det);

  const std::vector<QuadratureNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double solid_angle() const { return solid_angle_; }

  // sum_nu int_S f(n, eps_{n,nu}) dn
  template <typename F>
  Complex integrate(F&& f) const {
    Complex sum = 0.0;
    for (const auto& node : nodes_) {
      sum += node.weight * (f(node.n, node.basis.e1) + f(node.n, node.basis.e2));
    }
    return sum;
  }

 private:
  std::vector<QuadratureNode> nodes_;
  double solid_angle_ = 0.0;
};

using DirectionIntegrand = std::function<Complex(const Vec3& n, const CVec3& eps)>;

Complex integrate_over_detector(const DirectionIntegrand& f, const DetectorGeometry& det);

// A^(cl)_{n,nu} = [eps_{n,nu}^dagger F chi F^T eps_d] u(r) exp(i k n.r).
// Throws NotUnitVector for |n| != 1; nu is 1 or 2.
Complex classical_amplitude(const ParticleState& state, const TrapParams& trap, const Vec3& n,
                            int nu);
Complex classical_amplitude(const Vec3& r, const Mat3& orientation, const TrapParams& trap,
                            const Vec3& n, const CVec3& eps);

}  // namespace levitodyn
