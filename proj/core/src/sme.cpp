#include "levitodyn/sme.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

void require_square(const CMat& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream msg;
    msg << what << " is " << m.rows() << "x" << m.cols() << ", expected " << dim << "x" << dim;
    throw DimensionMismatch(msg.str());
  }
}

void require_channels(const std::vector<LindbladChannel>& channels, Eigen::Index dim) {
  for (const auto& ch : channels) {
    require_square(ch.op, dim, "channel operator");
    if (!(ch.rate >= 0.0)) {
      throw InvalidArgument("channel rate must be non-negative");
    }
  }
}

CMat vec_to_matrix(const CVec& v, Eigen::Index dim) {
  return Eigen::Map<const CMat>(v.data(), dim, dim);
}

}  // namespace

void check_density_matrix(const DensityMatrix& rho, const DensityTolerance& tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw InvalidArgument("density matrix must be square and non-empty");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > tol.trace) {
    throw InvalidArgument("density matrix trace differs from 1");
  }
  const CMat herm = 0.5 * (rho + rho.adjoint());
  const double lo = Eigen::SelfAdjointEigenSolver<CMat>(herm, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
  if (lo < tol.min_eigenvalue) {
    std::ostringstream msg;
    msg << "density matrix has eigenvalue " << lo;
    throw InvalidArgument(msg.str());
  }
}

double purity(const DensityMatrix& rho) {
  return (rho * rho).trace().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const CMat diff = a - b;
  const CMat herm = 0.5 * (diff + diff.adjoint());
  return 0.5 * Eigen::SelfAdjointEigenSolver<CMat>(herm, Eigen::EigenvaluesOnly)
                   .eigenvalues()
                   .cwiseAbs()
                   .sum();
}

DensityMatrix hermitize_normalize(const DensityMatrix& rho) {
  CMat out = 0.5 * (rho + rho.adjoint());
  return out / out.trace().real();
}

DensityMatrix pure_state(const CVec& psi) {
  const CVec unit = psi.normalized();
  return unit * unit.adjoint();
}

DensityMatrix fock_state(Eigen::Index dim, Eigen::Index n) {
  if (n < 0 || n >= dim) {
    throw InvalidArgument("Fock index outside the truncated space");
  }
  CMat rho = CMat::Zero(dim, dim);
  rho(n, n) = 1.0;
  return rho;
}

CMat dissipator_D(const CMat& k, const DensityMatrix& rho) {
  require_square(k, rho.rows(), "operator");
  const CMat kd = k.adjoint();
  const CMat kdk = kd * k;
  return k * rho * kd - 0.5 * (kdk * rho + rho * kdk);
}

CMat superoperator_H(const CMat& k, const DensityMatrix& rho) {
  require_square(k, rho.rows(), "operator");
  const CMat a = k * rho + rho * k.adjoint();
  return a - a.trace() * rho;
}

CMat lindblad_rhs(const DensityMatrix& rho, const CMat& h,
                  const std::vector<LindbladChannel>& channels) {
  const Complex i(0.0, 1.0);
  require_square(h, rho.rows(), "Hamiltonian");
  require_channels(channels, rho.rows());
  CMat out = -i * (h * rho - rho * h);
  for (const auto& ch : channels) {
    if (ch.rate != 0.0) {
      out += ch.rate * dissipator_D(ch.op, rho);
    }
  }
  return out;
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const CMat& h,
                            const std::vector<LindbladChannel>& channels, double dt) {
  const CMat k1 = lindblad_rhs(rho, h, channels);
  const CMat k2 = lindblad_rhs(rho + dt * k1, h, channels);
  return hermitize_normalize(rho + 0.5 * dt * (k1 + k2));
}

CMat lindblad_generator(const CMat& h, const std::vector<LindbladChannel>& channels) {
  const Eigen::Index d = h.rows();
  require_square(h, d, "Hamiltonian");
  require_channels(channels, d);
  const Complex i(0.0, 1.0);
  const CMat id = CMat::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X)
  auto kron = [d](const CMat& a, const CMat& b) {
    CMat out(d * d, d * d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        out.block(r * d, c * d, d, d) = a(r, c) * b;
      }
    }
    return out;
  };
  CMat g = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    const CMat kdk = ch.op.adjoint() * ch.op;
    g += ch.rate * (kron(ch.op.conjugate(), ch.op) - 0.5 * kron(id, kdk) -
                    0.5 * kron(kdk.transpose(), id));
  }
  return g;
}

DensityMatrix lindblad_exact(const DensityMatrix& rho, const CMat& h,
                             const std::vector<LindbladChannel>& channels, double t) {
  const Eigen::Index d = rho.rows();
  const CMat prop = (lindblad_generator(h, channels) * t).exp();
  const CVec v = Eigen::Map<const CVec>(rho.data(), d * d);
  return vec_to_matrix(prop * v, d);
}

std::vector<LindbladChannel> compress_channels(const std::vector<LindbladChannel>& channels,
                                               double rel_tol) {
  if (channels.empty()) return {};
  const Eigen::Index d = channels.front().op.rows();
  require_channels(channels, d);
  std::vector<const LindbladChannel*> live;
  for (const auto& ch : channels) {
    if (ch.rate > 0.0) live.push_back(&ch);
  }
  if (live.empty()) return {};
  const auto n = static_cast<Eigen::Index>(live.size());
  CMat v(d * d, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v.col(k) = std::sqrt(live[k]->rate) * Eigen::Map<const CVec>(live[k]->op.data(), d * d);
  }
  // Eigenpairs of V V^dag, taken from whichever Gram matrix is smaller.
  const bool small = n < d * d;
  const Eigen::SelfAdjointEigenSolver<CMat> eig(small ? CMat(v.adjoint() * v)
                                                      : CMat(v * v.adjoint()));
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<LindbladChannel> out;
  for (Eigen::Index j = eig.eigenvalues().size() - 1; j >= 0; --j) {
    const double s = eig.eigenvalues()[j];
    if (!(s > rel_tol * top && s > 0.0)) continue;
    const CVec dir = small ? CVec(v * eig.eigenvectors().col(j) / std::sqrt(s))
                           : CVec(eig.eigenvectors().col(j));
    out.push_back({vec_to_matrix(dir, d), s});
  }
  return out;
}

UnravelingSpec UnravelingSpec::heterodyne(Eigen::Index n, double eta) {
  return {Eigen::VectorXd::Constant(n, eta), CMat::Zero(n, n)};
}

UnravelingSpec UnravelingSpec::homodyne(Eigen::Index n, double eta) {
  return {Eigen::VectorXd::Constant(n, eta), CMat(Eigen::VectorXd::Constant(n, eta).cast<Complex>().asDiagonal())};
}

Eigen::MatrixXd UnravelingSpec::block_covariance() const {
  const Eigen::Index n = eta.size();
  const Eigen::MatrixXd e = eta.asDiagonal();
  Eigen::MatrixXd b(2 * n, 2 * n);
  b.topLeftCorner(n, n) = e + xi.real();
  b.topRightCorner(n, n) = xi.imag();
  b.bottomLeftCorner(n, n) = xi.imag();
  b.bottomRightCorner(n, n) = e - xi.real();
  return 0.5 * b;
}

UnravelingCheck validate_unraveling(const UnravelingSpec& spec, double tol) {
  UnravelingCheck out;
  const Eigen::Index n = spec.eta.size();
  if (spec.xi.rows() != n || spec.xi.cols() != n) {
    out.message = "correlation matrix size does not match the efficiency vector";
    return out;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(spec.eta[k] >= 0.0 && spec.eta[k] <= 1.0)) {
      out.message = "efficiency outside [0, 1]";
      return out;
    }
  }
  if ((spec.xi - spec.xi.transpose()).cwiseAbs().maxCoeff() > tol) {
    out.message = "correlation matrix is not symmetric";
    return out;
  }
  out.min_eigenvalue = n == 0 ? 0.0
                              : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                    spec.block_covariance(), Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .minCoeff();
  out.valid = out.min_eigenvalue >= -tol;
  if (!out.valid) {
    std::ostringstream msg;
    msg << "block covariance has eigenvalue " << out.min_eigenvalue;
    out.message = msg.str();
  }
  return out;
}

BelavkinIntegrator::BelavkinIntegrator(const CMat& h, std::vector<LindbladChannel> channels,
                                       UnravelingSpec spec, double dt)
    : spec_(std::move(spec)), dt_(dt) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  const Eigen::Index d = h.rows();
  require_square(h, d, "Hamiltonian");
  require_channels(channels, d);
  if (spec_.size() != static_cast<Eigen::Index>(channels.size())) {
    throw InvalidUnraveling("unraveling size differs from the channel count");
  }
  const UnravelingCheck check = validate_unraveling(spec_);
  if (!check.valid) {
    throw InvalidUnraveling(check.message);
  }
  const Complex i(0.0, 1.0);
  const CMat u = (-i * dt * h).exp();
  CMat a = CMat::Zero(d, d);
  for (const auto& ch : channels) {
    ops_.push_back(std::sqrt(ch.rate) * ch.op);
    a -= 0.5 * ops_.back().adjoint() * ops_.back();
  }
  base_ = u + a * u * dt;
  CMat weight = base_.adjoint() * base_;
  for (const CMat& c : ops_) {
    const CMat cu = c * u;
    weight += dt * cu.adjoint() * cu;
  }
  const Eigen::SelfAdjointEigenSolver<CMat> weight_eig(weight);
  const CMat r = weight_eig.eigenvectors() *
                 weight_eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                 weight_eig.eigenvectors().adjoint();
  base_ = base_ * r;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    const double lost = 1.0 - spec_.eta[static_cast<Eigen::Index>(k)];
    ops_u_.push_back(ops_[k] * u * r);
    ops_lost_.push_back(lost > 0.0 ? CMat(std::sqrt(lost * dt) * ops_u_.back()) : CMat());
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec_.block_covariance());
  noise_factor_ = eig.eigenvectors() *
                  eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

CVec BelavkinIntegrator::sample_noise(std::mt19937_64& rng) const {
  const Eigen::Index n = channels();
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(2 * n);
  for (Eigen::Index j = 0; j < 2 * n; ++j) z[j] = normal(rng);
  const Eigen::VectorXd xy = std::sqrt(dt_) * (noise_factor_ * z);
  CVec dw(n);
  for (Eigen::Index k = 0; k < n; ++k) dw[k] = Complex(xy[k], xy[n + k]);
  return dw;
}

CVec BelavkinIntegrator::mean_currents(const DensityMatrix& rho) const {
  const Eigen::Index n = channels();
  CVec expect(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    // tr[c rho] without forming the product
    expect[k] = ops_[static_cast<std::size_t>(k)].transpose().cwiseProduct(rho).sum();
  }
  return spec_.eta.cast<Complex>().cwiseProduct(expect) + spec_.xi * expect.conjugate();
}

CVec BelavkinIntegrator::noise_from_currents(const DensityMatrix& rho,
                                             const CVec& currents) const {
  if (currents.size() != channels()) {
    throw DimensionMismatch("current vector length differs from the channel count");
  }
  return (currents - mean_currents(rho)) * dt_;
}

BelavkinResult BelavkinIntegrator::step_with_noise(const DensityMatrix& rho,
                                                   const CVec& dw) const {
  if (dw.size() != channels()) {
    throw DimensionMismatch("noise vector length differs from the channel count");
  }
  require_square(rho, base_.rows(), "density matrix");
  BelavkinResult out;
  out.dw = dw;
  out.currents = mean_currents(rho) + dw / dt_;
  CMat m = base_;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    m += ops_u_[k] * (std::conj(out.currents[static_cast<Eigen::Index>(k)]) * dt_);
  }
  CMat next = m * rho * m.adjoint();
  for (const CMat& c : ops_lost_) {
    if (c.size() > 0) next += c * rho * c.adjoint();
  }
  out.rho = hermitize_normalize(next);
  return out;
}

BelavkinResult BelavkinIntegrator::step(const DensityMatrix& rho, std::mt19937_64& rng) const {
  return step_with_noise(rho, sample_noise(rng));
}

BelavkinResult belavkin_step(const DensityMatrix& rho, const CMat& h,
                             const std::vector<LindbladChannel>& channels,
                             const UnravelingSpec& spec, double dt, std::mt19937_64& rng) {
  return BelavkinIntegrator(h, channels, spec, dt).step(rho, rng);
}

HomodyneSme::HomodyneSme(const CMat& h, const std::vector<LindbladChannel>& gas,
                         const std::vector<LindbladChannel>& scattering, const CMat& collective,
                         double solid_angle, double eta, double dt)
    : h_(h), collective_(collective), solid_angle_(solid_angle), eta_(eta), dt_(dt) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidUnraveling("detector efficiency outside [0, 1]");
  }
  if (!(solid_angle > 0.0)) {
    throw InvalidUnraveling("detector solid angle must be positive");
  }
  const Eigen::Index d = h.rows();
  require_square(h, d, "Hamiltonian");
  require_square(collective, d, "collective operator");
  channels_ = gas;
  channels_.insert(channels_.end(), scattering.begin(), scattering.end());
  require_channels(channels_, d);
}

double HomodyneSme::mean_current(const DensityMatrix& rho) const {
  return eta_ * ((collective_ + collective_.adjoint()) * rho).trace().real();
}

HomodyneSmeResult HomodyneSme::step_with_noise(const DensityMatrix& rho, double dw) const {
  HomodyneSmeResult out;
  out.dw = dw;
  out.current = mean_current(rho) + dw / dt_;
  const CMat next = rho + dt_ * lindblad_rhs(rho, h_, channels_) +
                    superoperator_H(collective_, rho) * dw;
  out.rho = hermitize_normalize(next);
  return out;
}

HomodyneSmeResult HomodyneSme::step(const DensityMatrix& rho, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  return step_with_noise(rho, std::sqrt(noise_variance()) * normal(rng));
}

double HomodyneSme::sample_current(const DensityMatrix& rho, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  return mean_current(rho) + std::sqrt(noise_variance()) * normal(rng) / dt_;
}

HomodyneSmeResult homodyne_sme_step(const DensityMatrix& rho, const CMat& h,
                                    const std::vector<LindbladChannel>& gas,
                                    const std::vector<LindbladChannel>& scattering,
                                    const CMat& collective, double solid_angle, double eta,
                                    double dt, std::mt19937_64& rng) {
  return HomodyneSme(h, gas, scattering, collective, solid_angle, eta, dt).step(rho, rng);
}

}  // namespace levitodyn
