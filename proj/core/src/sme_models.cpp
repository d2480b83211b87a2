#include "levitodyn/sme_models.hpp"

#include <cmath>

#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

constexpr int kFourierSamples = 64;
constexpr int kMaxHarmonic = 4;

// |m> -> |m + k| on the basis m = -l..l, truncated at the edges.
CMat shift(int l, int k) {
  const int dim = 2 * l + 1;
  CMat s = CMat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const int to = j + k;
    if (to >= 0 && to < dim) s(to, j) = 1.0;
  }
  return s;
}

CMat symmetrized(const CMat& a, const CMat& b) {
  return 0.5 * (a * b + b * a);
}

double planar_coupling(const TrapParams& trap, double theta) {
  return gradient_coupling(axis_rotation(3, theta), trap.chi, trap.pol);
}

}  // namespace

CMat annihilation_operator(Eigen::Index dim) {
  CMat a = CMat::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

CMat number_operator(Eigen::Index dim) {
  CMat n = CMat::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) n(j, j) = static_cast<double>(j);
  return n;
}

double thermal_occupation(double hbar_omega, double kt) {
  return 1.0 / std::expm1(hbar_omega / kt);
}

std::vector<LindbladChannel> scattering_channels(const QuantumModel& model,
                                                 const SphereQuadrature& quad) {
  std::vector<LindbladChannel> out;
  out.reserve(2 * quad.size());
  for (const auto& node : quad.nodes()) {
    for (int nu = 1; nu <= 2; ++nu) {
      out.push_back({model.amplitude(node.n, node.basis[nu]), model.gamma_s * node.weight});
    }
  }
  return out;
}

CMat collective_operator(const QuantumModel& model, const SphereQuadrature& cap) {
  CMat sum = CMat::Zero(model.dim(), model.dim());
  for (const auto& node : cap.nodes()) {
    sum += node.weight * (model.amplitude(node.n, node.basis.e1) +
                          model.amplitude(node.n, node.basis.e2));
  }
  return std::sqrt(model.gamma_s) * sum;
}

std::vector<QuadratureNode> complement_nodes(const DetectorGeometry& det) {
  if (det.half_angle >= kPi) return {};
  DetectorGeometry rest = det;
  rest.axis = -det.axis.normalized();
  rest.half_angle = kPi - det.half_angle;
  return SphereQuadrature(rest).nodes();
}

QuantumModel build_1d_translational_model(const TrapParams& trap, const RigidBody& body,
                                          const GasParams& gas,
                                          const PhysicalConstants& constants, int fock_dim) {
  if (fock_dim < 10) {
    throw InvalidArgument("Fock dimension must be at least 10");
  }
  trap.validate();
  body.validate();
  gas.validate();
  const double hbar = constants.hbar;
  const double m = body.mass;
  const Mat3 chi = lab_susceptibility(Mat3::Identity(), trap.chi);
  const double coupling = gradient_coupling(Mat3::Identity(), trap.chi, trap.pol);
  const double stiffness = trap.intensity_prefactor(constants) * coupling * 4.0 * trap.mode.a1 /
                           (trap.mode.waist * trap.mode.waist);
  if (!(stiffness > 0.0)) {
    throw InvalidArgument("trap is not confining along x");
  }
  const double omega = std::sqrt(stiffness / m);
  const Complex i(0.0, 1.0);

  const CMat a = annihilation_operator(fock_dim);
  const CMat ad = a.adjoint();
  const CMat x = std::sqrt(hbar / (2.0 * m * omega)) * (a + ad);
  const CMat p = i * std::sqrt(hbar * m * omega / 2.0) * (ad - a);

  QuantumModel model;
  model.frequency = omega;
  model.position = x;
  model.hamiltonian = omega * number_operator(fock_dim) + (gas.gamma_c / (2.0 * hbar)) * (x * p + p * x);
  const double four_mkt = 4.0 * m * constants.k_b * gas.temperature;
  model.gas.push_back({std::sqrt(four_mkt) / hbar * (x + (i * hbar / four_mkt) * p), gas.gamma_c});

  model.gamma_s = scattering_rate(trap, constants);
  const double k = trap.mode.wavenumber();
  const CVec3 field = chi.cast<Complex>() * trap.pol.vector;
  const CMat id = CMat::Identity(fock_dim, fock_dim);
  model.amplitude = [field, k, x, id, i](const Vec3& n, const CVec3& eps) -> CMat {
    return eps.dot(field) * (id + (i * k * n.x()) * x);
  };
  return model;
}

Complex planar_coupling_harmonic(const TrapParams& trap, int k) {
  Complex acc = 0.0;
  for (int j = 0; j < kFourierSamples; ++j) {
    const double theta = 2.0 * kPi * j / kFourierSamples;
    acc += planar_coupling(trap, theta) * std::polar(1.0, -k * theta);
  }
  return acc / static_cast<double>(kFourierSamples);
}

QuantumModel build_planar_rotor_model(const TrapParams& trap, const RigidBody& body,
                                      const GasParams& gas, const PhysicalConstants& constants,
                                      int l_max) {
  if (l_max < 5) {
    throw InvalidArgument("angular momentum cutoff must be at least 5");
  }
  trap.validate();
  body.validate();
  gas.validate();
  const double hbar = constants.hbar;
  const int dim = 2 * l_max + 1;
  const double i3 = body.inertia[2];
  const Complex i(0.0, 1.0);

  CMat p = CMat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) p(j, j) = hbar * (j - l_max);
  const CMat up = shift(l_max, 1);
  const CMat down = shift(l_max, -1);
  const CMat cos_t = 0.5 * (up + down);
  const CMat sin_t = (up - down) / (2.0 * i);

  QuantumModel model;
  model.position = sin_t;
  model.hamiltonian = (p * p) / (2.0 * i3 * hbar);
  const double depth = trap.intensity_prefactor(constants);
  double curvature = 0.0;  // d^2 C / d theta^2 at theta = 0
  for (int k = -kMaxHarmonic; k <= kMaxHarmonic; ++k) {
    if (k == 0) continue;
    const Complex c = planar_coupling_harmonic(trap, k);
    if (std::abs(c) < 1e-14) continue;
    model.hamiltonian -= (depth / hbar) * c * shift(l_max, k);
    curvature -= (c * static_cast<double>(k * k)).real();
  }
  model.frequency = curvature < 0.0 ? std::sqrt(-depth * curvature / i3) : 0.0;

  const double kt = constants.k_b * gas.temperature;
  const double kappa = hbar / (4.0 * kt * i3);
  const Vec3 weights = rotational_diffusion_weights(body.inertia);
  const double base = 4.0 * gas.constituent_mass * kt * gas.gamma_c / (hbar * hbar);
  const CMat sp = symmetrized(sin_t, p);
  const CMat cp = symmetrized(cos_t, p);
  model.gas.push_back({cos_t - i * kappa * sp, base * weights[0]});
  model.gas.push_back({sin_t + i * kappa * cp, base * weights[0]});
  model.gas.push_back({-sin_t - i * kappa * cp, base * weights[1]});
  model.gas.push_back({cos_t - i * kappa * sp, base * weights[1]});

  model.gamma_s = scattering_rate(trap, constants);
  const Mat3 chi = trap.chi.body_tensor();
  auto lab = [&](double theta) {
    const Mat3 r = axis_rotation(3, theta);
    return Mat3(r * chi * r.transpose());
  };
  const Mat3 m_plus = lab(0.0);
  const Mat3 m_minus = lab(0.5 * kPi);
  const Mat3 m_diag = lab(0.25 * kPi);
  const Mat3 m0 = 0.5 * (m_plus + m_minus);
  const Mat3 mc = 0.5 * (m_plus - m_minus);
  const Mat3 ms = m_diag - m0;
  const CMat up2 = shift(l_max, 2);
  const CMat down2 = shift(l_max, -2);
  const CMat cos2 = 0.5 * (up2 + down2);
  const CMat sin2 = (up2 - down2) / (2.0 * i);
  const CMat id = CMat::Identity(dim, dim);
  const CVec3 e0 = m0.cast<Complex>() * trap.pol.vector;
  const CVec3 ec = mc.cast<Complex>() * trap.pol.vector;
  const CVec3 es = ms.cast<Complex>() * trap.pol.vector;
  model.amplitude = [=](const Vec3&, const CVec3& eps) -> CMat {
    return eps.dot(e0) * id + eps.dot(ec) * cos2 + eps.dot(es) * sin2;
  };
  return model;
}

double HomodyneSetup::current(const CVec& channel_currents) const {
  double j = 0.0;
  for (Eigen::Index k = 0; k < current_weights.size(); ++k) {
    j += current_weights[k] * channel_currents[k].real();
  }
  return j;
}

HomodyneSetup homodyne_setup(const QuantumModel& model, const DetectorGeometry& det,
                             double delta_phi, UnravelingKind kind) {
  det.validate();
  const SphereQuadrature cap(det);
  const Complex phase = std::polar(1.0, delta_phi);
  std::vector<LindbladChannel> monitored;
  std::vector<double> node_weights;
  for (const auto& node : cap.nodes()) {
    for (int nu = 1; nu <= 2; ++nu) {
      monitored.push_back({phase * model.amplitude(node.n, node.basis[nu]),
                           model.gamma_s * node.weight});
      node_weights.push_back(node.weight);
    }
  }

  std::vector<LindbladChannel> hidden = model.gas;
  for (const auto& node : complement_nodes(det)) {
    for (int nu = 1; nu <= 2; ++nu) {
      hidden.push_back({model.amplitude(node.n, node.basis[nu]), model.gamma_s * node.weight});
    }
  }

  HomodyneSetup setup;
  setup.hamiltonian = model.hamiltonian;
  if (kind == UnravelingKind::kCollective) {
    // C = sum_k u_k c_k with u_k = sqrt(w_k / 2 Omega) carries the whole
    // current; the cap channels projected off u stay unmonitored.
    double total = 0.0;
    for (const double w : node_weights) total += w;
    const Eigen::Index d = model.dim();
    CMat collective = CMat::Zero(d, d);
    std::vector<CMat> scaled;
    std::vector<double> u;
    for (std::size_t k = 0; k < monitored.size(); ++k) {
      scaled.push_back(std::sqrt(monitored[k].rate) * monitored[k].op);
      u.push_back(std::sqrt(node_weights[k] / total));
      collective += u.back() * scaled.back();
    }
    for (std::size_t k = 0; k < scaled.size(); ++k) {
      hidden.push_back({scaled[k] - u[k] * collective, 1.0});
    }
    setup.channels.push_back({collective, 1.0});
    setup.current_weights = Eigen::VectorXd::Constant(1, std::sqrt(total));
  } else {
    setup.channels = monitored;
    setup.current_weights = Eigen::Map<const Eigen::VectorXd>(
        node_weights.data(), static_cast<Eigen::Index>(node_weights.size())).cwiseSqrt();
  }
  const auto n_monitored = static_cast<Eigen::Index>(setup.channels.size());
  for (auto& ch : compress_channels(hidden)) setup.channels.push_back(std::move(ch));

  const auto n = static_cast<Eigen::Index>(setup.channels.size());
  setup.spec.eta = Eigen::VectorXd::Zero(n);
  setup.spec.eta.head(n_monitored).setConstant(det.eta);
  setup.spec.xi = CMat(setup.spec.eta.cast<Complex>().asDiagonal());
  return setup;
}

}  // namespace levitodyn
