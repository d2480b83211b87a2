#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace levitodyn {

struct TimeSeries {
  double sample_rate = 1.0;  // Hz
  std::vector<double> values;
};

struct Spectrum {
  std::vector<double> frequency;  // Hz
  std::vector<double> density;    // one-sided, units^2 / Hz
};

// Hann-windowed averaged periodogram with per-segment mean removal. The
// density integrates to the series variance. Throws SegmentTooLong when the
// segment exceeds the series and InvalidArgument for overlap outside [0, 1).
Spectrum welch_psd(const TimeSeries& ts, std::size_t segment_length, double overlap = 0.5);

struct FitWindow {
  double f_min = 0.0;  // Hz
  double f_max = 0.0;  // Hz
};

// S(w) = A / ((w^2 - w0^2)^2 + gamma^2 w^2) + floor, w = 2 pi f.
struct SpectrumFit {
  double center_hz = 0.0;     // w0 / 2 pi
  double linewidth_hz = 0.0;  // gamma / 2 pi
  double plateau = 0.0;       // floor
  double amplitude = 0.0;     // A
  // Covariance of (ln A, w0, ln gamma, ln floor) from the log-residual fit.
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  double residual_rms = 0.0;
  // Linewidth exceeds the fit window.
  bool linewidth_unbounded = false;

  double evaluate(double f_hz) const;
};

// Least squares on log(S) inside the window. The data are normalized by
// their maximum first, so the result does not depend on the overall scale.
// Throws FitDiverged when the window has no interior maximum, the solver
// fails, or the center leaves the window.
SpectrumFit lorentzian_fit(std::span<const double> frequency, std::span<const double> psd,
                           const FitWindow& window);

}  // namespace levitodyn
