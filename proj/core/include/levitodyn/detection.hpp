#pragma once

#include "levitodyn/dynamics.hpp"
#include "levitodyn/scattering.hpp"

namespace levitodyn {

// Coefficient of z^2 in the second-order expansion of u(r) exp(i k n.r).
enum class PositionExpansion {
  kConsistent,  // -(zR^2 k^2 + 1) / (2 zR^2), the Taylor coefficient of the mode
  kPublished,   // -(zR^2 k^2 + 2) / (2 zR^2)
};

struct HomodyneConfig {
  double delta_phi = 0.0;  // local-oscillator phase, rad
  DetectorGeometry det;
  double dt = 1e-6;   // s
  double gain = 1.0;  // local-oscillator amplitude folded into one constant
  PositionExpansion expansion = PositionExpansion::kConsistent;

  void validate() const;
};

struct CurrentDecomposition {
  double j0 = 0.0;
  double jt = 0.0;
  double jr = 0.0;
  double jrt = 0.0;

  double sum() const { return j0 + jt + jr + jrt; }
};

// Classical homodyne detector over a collection cap. Holds the quadrature
// and the scattering rate so repeated evaluations are cheap.
class HomodyneDetector {
 public:
  HomodyneDetector(const TrapParams& trap, const PhysicalConstants& constants,
                   const HomodyneConfig& cfg);

  // 2 eta sqrt(gamma_s) sum_nu int_S Re(A e^{i dPhi}).
  double mean_current(const ParticleState& state) const;
  double mean_current(const Vec3& r, const Mat3& orientation) const;

  // mean_current + dW / dt with Var[dW] = 2 Omega eta dt.
  double sample(const ParticleState& state, Rng& rng) const;
  double noise_variance() const;

  double constant_part() const { return j0_; }
  double translational(const Vec3& r) const;
  double rotational(const Mat3& orientation) const;
  double mixed(const Vec3& r, const Mat3& orientation) const;
  CurrentDecomposition decompose(const ParticleState& state) const;

  // Expansion of u(r) exp(i k n.r) - 1 through second order in r.
  Complex position_expansion(const Vec3& r, const Vec3& n) const;

  const HomodyneConfig& config() const { return cfg_; }
  const SphereQuadrature& quadrature() const { return quad_; }
  double scattering_rate() const { return gamma_s_; }

 private:
  // 2 eta chi0 sqrt(gamma_s) gain int Re[sum_nu eps^dag M eps_d e^{i dPhi} g(n)].
  template <typename G>
  double contract(const CMat3& m, G&& g) const;

  TrapParams trap_;
  HomodyneConfig cfg_;
  SphereQuadrature quad_;
  double gamma_s_;
  double scale_;  // 2 eta sqrt(gamma_s) gain
  Complex phase_;
  double j0_;
};

// Free-function forms; each builds a detector.
double homodyne_current(const ParticleState& state, const TrapParams& trap,
                        const PhysicalConstants& constants, const HomodyneConfig& cfg, Rng& rng);
double current_translational(const Vec3& r, const TrapParams& trap,
                             const PhysicalConstants& constants, const HomodyneConfig& cfg);
double current_rotational(const EulerAngles& phi, const TrapParams& trap,
                          const PhysicalConstants& constants, const HomodyneConfig& cfg);
CurrentDecomposition current_decomposition(const ParticleState& state, const TrapParams& trap,
                                           const PhysicalConstants& constants,
                                           const HomodyneConfig& cfg);

}  // namespace levitodyn
