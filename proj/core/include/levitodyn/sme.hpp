#pragma once

#include <random>
#include <string>
#include <vector>

#include "levitodyn/types.hpp"

namespace levitodyn {

// Density matrices are plain complex matrices; check_density_matrix enforces
// the invariants where it matters.
using DensityMatrix = CMat;

struct DensityTolerance {
  double hermitian = 1e-10;
  double trace = 1e-9;
  double min_eigenvalue = -1e-8;
};

// Throws InvalidArgument naming the first violated invariant.
void check_density_matrix(const DensityMatrix& rho, const DensityTolerance& tol = {});

double purity(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
// (rho + rho^dag) / 2 scaled to unit trace.
DensityMatrix hermitize_normalize(const DensityMatrix& rho);
DensityMatrix pure_state(const CVec& psi);
DensityMatrix fock_state(Eigen::Index dim, Eigen::Index n);

struct LindbladChannel {
  CMat op;
  double rate = 0.0;  // 1/s
};

// K rho K^dag - {K^dag K, rho} / 2
CMat dissipator_D(const CMat& k, const DensityMatrix& rho);
// K rho + rho K^dag - tr[K rho + rho K^dag] rho
CMat superoperator_H(const CMat& k, const DensityMatrix& rho);

// -i [H, rho] + sum rate D[K] rho, with H given in angular-frequency units
// (H / hbar).
CMat lindblad_rhs(const DensityMatrix& rho, const CMat& h,
                  const std::vector<LindbladChannel>& channels);
// Heun step followed by trace renormalization.
DensityMatrix lindblad_step(const DensityMatrix& rho, const CMat& h,
                            const std::vector<LindbladChannel>& channels, double dt);
// Column-stacking generator: vec(rho)' = G vec(rho).
CMat lindblad_generator(const CMat& h, const std::vector<LindbladChannel>& channels);
// exp(G t) applied to rho.
DensityMatrix lindblad_exact(const DensityMatrix& rho, const CMat& h,
                             const std::vector<LindbladChannel>& channels, double t);

// Equivalent channel set of minimal size: sum r_i D[K_i] = sum s_j D[V_j].
// Eigenvalues of the channel Gram matrix below rel_tol * max are dropped.
std::vector<LindbladChannel> compress_channels(const std::vector<LindbladChannel>& channels,
                                               double rel_tol = 1e-13);

// Efficiencies (diagonal of eta) and correlation matrix Xi over channels.
struct UnravelingSpec {
  Eigen::VectorXd eta;
  CMat xi;

  static UnravelingSpec heterodyne(Eigen::Index n, double eta = 1.0);
  // Real Wiener increments: Xi = eta.
  static UnravelingSpec homodyne(Eigen::Index n, double eta = 1.0);
  Eigen::Index size() const { return eta.size(); }
  // 1/2 [[eta + Re Xi, Im Xi], [Im Xi, eta - Re Xi]]
  Eigen::MatrixXd block_covariance() const;
};

struct UnravelingCheck {
  bool valid = false;
  double min_eigenvalue = 0.0;
  std::string message;
};

UnravelingCheck validate_unraveling(const UnravelingSpec& spec, double tol = 1e-10);

struct BelavkinResult {
  DensityMatrix rho;
  CVec currents;  // J_k
  CVec dw;        // dW_k
};

// Conditional evolution under general diffusive monitoring of every channel.
// Channel k enters as c_k = sqrt(rate_k) K_k. The update is the Kraus form
//   M = (U + A U dt + sum_k c_k U J_k^* dt) R,  A = -1/2 sum c^dag c,  U = exp(-i H dt)
//   rho' ~ M rho M^dag + sum_k (1 - eta_k) c_k U R rho (c_k U R)^dag dt
// with R = S^{-1/2} and S the noise average of the Kraus weights, so the
// averaged map is trace preserving. It keeps rho positive and reduces to the
// Ito equation at first order.
class BelavkinIntegrator {
 public:
  // Throws InvalidUnraveling when spec fails validation or sizes disagree.
  BelavkinIntegrator(const CMat& h, std::vector<LindbladChannel> channels, UnravelingSpec spec,
                     double dt);

  // Draws dW with E[dW dW^dag] = eta dt and E[dW dW^T] = Xi dt.
  CVec sample_noise(std::mt19937_64& rng) const;
  BelavkinResult step(const DensityMatrix& rho, std::mt19937_64& rng) const;
  BelavkinResult step_with_noise(const DensityMatrix& rho, const CVec& dw) const;
  // Inverse of the current relation: dW_k = (J_k - mean_k) dt.
  CVec noise_from_currents(const DensityMatrix& rho, const CVec& currents) const;
  // tr[(eta_kk' c_k' + Xi_kk' c_k'^dag) rho]
  CVec mean_currents(const DensityMatrix& rho) const;

  Eigen::Index channels() const { return static_cast<Eigen::Index>(ops_.size()); }
  double dt() const { return dt_; }

 private:
  std::vector<CMat> ops_;   // c_k
  std::vector<CMat> ops_u_;     // c_k U R
  std::vector<CMat> ops_lost_;  // sqrt((1 - eta_k) dt) c_k U R
  CMat base_;                   // (U + A U dt) R
  UnravelingSpec spec_;
  Eigen::MatrixXd noise_factor_;  // 2n x 2n, covariance = F F^T (per unit dt)
  double dt_;
};

BelavkinResult belavkin_step(const DensityMatrix& rho, const CMat& h,
                             const std::vector<LindbladChannel>& channels,
                             const UnravelingSpec& spec, double dt, std::mt19937_64& rng);

// Per-step record of a monitored run.
struct MeasurementRecord {
  double dt = 0.0;
  std::vector<CVec> currents;
  std::vector<CVec> noise;
};

// Homodyne model with a single real current: the scattering channels enter
// the unconditional part and the collective operator
// c_S = sqrt(gamma_s) sum_nu int_S A dn drives the innovation term
//   d rho = L rho dt + H[c_S] rho dW,   E[dW^2] = 2 Omega eta dt,
//   J dt = eta tr[(c_S + c_S^dag) rho] dt + dW.
struct HomodyneSmeResult {
  DensityMatrix rho;
  double current = 0.0;
  double dw = 0.0;
};

class HomodyneSme {
 public:
  HomodyneSme(const CMat& h, const std::vector<LindbladChannel>& gas,
              const std::vector<LindbladChannel>& scattering, const CMat& collective,
              double solid_angle, double eta, double dt);

  double noise_variance() const { return 2.0 * solid_angle_ * eta_ * dt_; }
  double mean_current(const DensityMatrix& rho) const;
  HomodyneSmeResult step(const DensityMatrix& rho, std::mt19937_64& rng) const;
  HomodyneSmeResult step_with_noise(const DensityMatrix& rho, double dw) const;
  // Current sample for a frozen state (no state update).
  double sample_current(const DensityMatrix& rho, std::mt19937_64& rng) const;

 private:
  CMat h_;
  std::vector<LindbladChannel> channels_;
  CMat collective_;
  double solid_angle_;
  double eta_;
  double dt_;
};

HomodyneSmeResult homodyne_sme_step(const DensityMatrix& rho, const CMat& h,
                                    const std::vector<LindbladChannel>& gas,
                                    const std::vector<LindbladChannel>& scattering,
                                    const CMat& collective, double solid_angle, double eta,
                                    double dt, std::mt19937_64& rng);

}  // namespace levitodyn
