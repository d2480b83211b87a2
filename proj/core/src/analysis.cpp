#include "levitodyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <sstream>

#include <fftw3.h>
#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "levitodyn/errors.hpp"
#include "levitodyn/types.hpp"

namespace levitodyn {
namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

double model_value(const Eigen::VectorXd& p, double omega_ref, double w) {
  const double w0 = p[1] * omega_ref;
  const double gamma = std::exp(p[2]);
  const double d = w * w - w0 * w0;
  return std::exp(p[0]) / (d * d + gamma * gamma * w * w) + std::exp(p[3]);
}

struct LogResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::vector<double> omega;
  std::vector<double> log_data;
  double omega_ref = 1.0;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(omega.size()); }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < omega.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = std::log(model_value(p, omega_ref, omega[i])) - log_data[i];
    }
    return 0;
  }
};

}  // namespace

Spectrum welch_psd(const TimeSeries& ts, std::size_t segment_length, double overlap) {
  if (!(ts.sample_rate > 0.0)) {
    throw InvalidArgument("sample rate must be positive");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw InvalidArgument("overlap must lie in [0, 1)");
  }
  if (segment_length < 2) {
    throw InvalidArgument("segment length must be at least 2");
  }
  if (segment_length > ts.values.size()) {
    std::ostringstream msg;
    msg << "segment length " << segment_length << " exceeds series length " << ts.values.size();
    throw SegmentTooLong(msg.str());
  }
  const std::size_t len = segment_length;
  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(len) * (1.0 - overlap))));
  std::vector<double> window(len);
  double wsum2 = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    window[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(len)));
    wsum2 += window[n] * window[n];
  }

  const std::size_t bins = len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  RealFft fft(len);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + len <= ts.values.size(); start += step) {
    const auto first = ts.values.begin() + static_cast<std::ptrdiff_t>(start);
    const double mean = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) /
                        static_cast<double>(len);
    double* in = fft.input();
    for (std::size_t n = 0; n < len; ++n) {
      in[n] = (ts.values[start + n] - mean) * window[n];
    }
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) acc[k] += fft.power(k);
    ++segments;
  }

  Spectrum out;
  out.frequency.resize(bins);
  out.density.resize(bins);
  const double norm = 1.0 / (ts.sample_rate * wsum2 * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequency[k] = static_cast<double>(k) * ts.sample_rate / static_cast<double>(len);
    const bool edge = k == 0 || (len % 2 == 0 && k == bins - 1);
    out.density[k] = acc[k] * norm * (edge ? 1.0 : 2.0);
  }
  return out;
}

double SpectrumFit::evaluate(double f_hz) const {
  const double w = 2.0 * kPi * f_hz;
  const double w0 = 2.0 * kPi * center_hz;
  const double g = 2.0 * kPi * linewidth_hz;
  const double d = w * w - w0 * w0;
  return amplitude / (d * d + g * g * w * w) + plateau;
}

SpectrumFit lorentzian_fit(std::span<const double> frequency, std::span<const double> psd,
                           const FitWindow& window) {
  if (frequency.size() != psd.size()) {
    throw DimensionMismatch("frequency and psd lengths differ");
  }
  std::vector<double> f, s;
  for (std::size_t i = 0; i < frequency.size(); ++i) {
    if (frequency[i] >= window.f_min && frequency[i] <= window.f_max && psd[i] > 0.0 &&
        std::isfinite(psd[i])) {
      f.push_back(frequency[i]);
      s.push_back(psd[i]);
    }
  }
  if (f.size() < 8) {
    throw FitDiverged("fewer than 8 usable points in the fit window");
  }
  const auto peak_it = std::max_element(s.begin(), s.end());
  const auto peak = static_cast<std::size_t>(peak_it - s.begin());
  if (peak == 0 || peak == s.size() - 1) {
    throw FitDiverged("fit window has no interior maximum");
  }
  const double scale = *peak_it;
  for (double& v : s) v /= scale;

  const double floor0 = std::max(*std::min_element(s.begin(), s.end()), 1e-12);
  const double half = 0.5 * (1.0 + floor0);
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && s[lo] > half) --lo;
  while (hi + 1 < s.size() && s[hi] > half) ++hi;
  const double omega_ref = 2.0 * kPi * f[peak];
  double gamma0 = 2.0 * kPi * (f[hi] - f[lo]);
  if (!(gamma0 > 0.0) || s[lo] > half || s[hi] > half) gamma0 = 0.1 * omega_ref;
  const double amp0 = std::max(1.0 - floor0, 1e-6) * gamma0 * gamma0 * omega_ref * omega_ref;

  LogResidual functor;
  functor.omega_ref = omega_ref;
  for (std::size_t i = 0; i < f.size(); ++i) {
    functor.omega.push_back(2.0 * kPi * f[i]);
    functor.log_data.push_back(std::log(s[i]));
  }
  Eigen::VectorXd p(4);
  p << std::log(amp0), 1.0, std::log(gamma0), std::log(floor0);

  Eigen::NumericalDiff<LogResidual> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LogResidual>> lm(diff);
  lm.parameters.maxfev = 4000;
  const int status = lm.minimize(p);
  if (status < 1 || status > 4 || !p.allFinite()) {
    std::ostringstream msg;
    msg << "Levenberg-Marquardt stopped with status " << status;
    throw FitDiverged(msg.str());
  }

  SpectrumFit out;
  const double w0 = std::abs(p[1]) * omega_ref;
  out.center_hz = w0 / (2.0 * kPi);
  out.linewidth_hz = std::exp(p[2]) / (2.0 * kPi);
  out.amplitude = std::exp(p[0]) * scale;
  out.plateau = std::exp(p[3]) * scale;
  if (!(out.center_hz >= window.f_min && out.center_hz <= window.f_max)) {
    std::ostringstream msg;
    msg << "fitted center " << out.center_hz << " Hz left the window";
    throw FitDiverged(msg.str());
  }
  out.linewidth_unbounded = out.linewidth_hz > window.f_max - window.f_min;

  Eigen::VectorXd r(functor.values());
  functor(p, r);
  const auto n = static_cast<double>(r.size());
  out.residual_rms = std::sqrt(r.squaredNorm() / n);
  Eigen::MatrixXd jac(functor.values(), 4);
  diff.df(p, jac);
  const Eigen::Matrix4d jtj = jac.transpose() * jac;
  const double s2 = r.squaredNorm() / std::max(n - 4.0, 1.0);
  Eigen::Matrix4d cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::Vector4d scale_vec(1.0, omega_ref, 1.0, 1.0);
  out.covariance = scale_vec.asDiagonal() * cov * scale_vec.asDiagonal();
  return out;
}

}  // namespace levitodyn
