#include "levitodyn/detection.hpp"

#include <cmath>

#include "levitodyn/errors.hpp"

namespace levitodyn {

void HomodyneConfig::validate() const {
  if (!(dt > 0.0)) {
    throw InvalidArgument("homodyne sampling interval must be positive");
  }
  det.validate();
}

HomodyneDetector::HomodyneDetector(const TrapParams& trap, const PhysicalConstants& constants,
                                   const HomodyneConfig& cfg)
    : trap_(trap),
      cfg_(cfg),
      quad_((cfg.validate(), cfg.det)),
      gamma_s_(levitodyn::scattering_rate(trap, constants)),
      scale_(2.0 * cfg.det.eta * std::sqrt(gamma_s_) * cfg.gain),
      phase_(std::polar(1.0, cfg.delta_phi)) {
  j0_ = contract(CMat3::Identity(), [](const Vec3&) { return Complex(1.0); });
}

template <typename G>
double HomodyneDetector::contract(const CMat3& m, G&& g) const {
  const CVec3 field = m * trap_.pol.vector;
  double acc = 0.0;
  for (const auto& node : quad_.nodes()) {
    const Complex c = node.basis.e1.dot(field) + node.basis.e2.dot(field);
    acc += node.weight * std::real(c * phase_ * g(node.n));
  }
  return scale_ * trap_.chi.chi0 * acc;
}

double HomodyneDetector::mean_current(const Vec3& r, const Mat3& orientation) const {
  const CMat3 chi = lab_susceptibility(orientation, trap_.chi).cast<Complex>() / trap_.chi.chi0;
  const Complex u = mode_value(trap_.mode, r);
  const double k = trap_.mode.wavenumber();
  return contract(chi, [&](const Vec3& n) { return u * std::polar(1.0, k * n.dot(r)); });
}

double HomodyneDetector::mean_current(const ParticleState& state) const {
  return mean_current(state.r, state.orientation());
}

double HomodyneDetector::noise_variance() const {
  return 2.0 * quad_.solid_angle() * cfg_.det.eta * cfg_.dt;
}

double HomodyneDetector::sample(const ParticleState& state, Rng& rng) const {
  if (cfg_.det.eta == 0.0) {
    return 0.0;
  }
  std::normal_distribution<double> normal;
  const double dw = std::sqrt(noise_variance()) * normal(rng);
  return mean_current(state) + dw / cfg_.dt;
}

Complex HomodyneDetector::position_expansion(const Vec3& r, const Vec3& n) const {
  const GaussianMode& mode = trap_.mode;
  const double k = mode.wavenumber();
  const double zr2 = mode.rayleigh_range * mode.rayleigh_range;
  const double w02 = mode.waist * mode.waist;
  const double nr = n.dot(r);
  const double z = r.z();
  const double zz_extra = cfg_.expansion == PositionExpansion::kPublished ? 2.0 : 1.0;
  const double real = -k * k * nr * z - 0.5 * k * k * nr * nr - mode.a1 * r.x() * r.x() / w02 -
                      mode.a2 * r.y() * r.y() / w02 - (zr2 * k * k + zz_extra) / (2.0 * zr2) * z * z;
  return {real, k * (nr + z)};
}

double HomodyneDetector::translational(const Vec3& r) const {
  return contract(CMat3::Identity(), [&](const Vec3& n) { return position_expansion(r, n); });
}

double HomodyneDetector::rotational(const Mat3& orientation) const {
  const Mat3 delta = orientation * trap_.chi.delta.asDiagonal() * orientation.transpose();
  return contract(delta.cast<Complex>(), [](const Vec3&) { return Complex(1.0); });
}

double HomodyneDetector::mixed(const Vec3& r, const Mat3& orientation) const {
  const Mat3 delta = orientation * trap_.chi.delta.asDiagonal() * orientation.transpose();
  return contract(delta.cast<Complex>(), [&](const Vec3& n) { return position_expansion(r, n); });
}

CurrentDecomposition HomodyneDetector::decompose(const ParticleState& state) const {
  const Mat3 orientation = state.orientation();
  return {j0_, translational(state.r), rotational(orientation), mixed(state.r, orientation)};
}

double homodyne_current(const ParticleState& state, const TrapParams& trap,
                        const PhysicalConstants& constants, const HomodyneConfig& cfg, Rng& rng) {
  return HomodyneDetector(trap, constants, cfg).sample(state, rng);
}

double current_translational(const Vec3& r, const TrapParams& trap,
                             const PhysicalConstants& constants, const HomodyneConfig& cfg) {
  return HomodyneDetector(trap, constants, cfg).translational(r);
}

double current_rotational(const EulerAngles& phi, const TrapParams& trap,
                          const PhysicalConstants& constants, const HomodyneConfig& cfg) {
  return HomodyneDetector(trap, constants, cfg).rotational(rotation_from_euler(phi));
}

CurrentDecomposition current_decomposition(const ParticleState& state, const TrapParams& trap,
                                           const PhysicalConstants& constants,
                                           const HomodyneConfig& cfg) {
  return HomodyneDetector(trap, constants, cfg).decompose(state);
}

}  // namespace levitodyn
