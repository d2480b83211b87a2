#include <cmath>
#include <ostream>

#include "levitodyn/analysis.hpp"
#include "levitodyn/cli.hpp"
#include "levitodyn/errors.hpp"
#include "levitodyn/plot.hpp"
#include "levitodyn/trace_io.hpp"

namespace levitodyn::cli {

int run_psd(const RunContext& ctx) {
  const PsdSettings& ps = ctx.config.psd;
  if (ps.input.empty()) throw ConfigInvalid("psd.input: required for the psd command");
  const TraceTable trace = read_csv(ps.input);
  const auto& t = trace.column("t");
  if (t.size() < 2) throw IoFailure(ps.input.string() + ": need at least two samples");
  const double step = t[1] - t[0];
  const double span = t.back() - t.front();
  const double expected = step * static_cast<double>(t.size() - 1);
  if (!(step > 0.0) || std::abs(span - expected) > 1e-6 * std::abs(expected)) {
    throw IoFailure(ps.input.string() + ": time column is not uniformly sampled");
  }

  const TimeSeries series{1.0 / step, trace.column(ps.column)};
  const Spectrum spectrum = welch_psd(series, ps.segment_length, ps.overlap);
  TraceTable out;
  out.add_column("frequency_hz", spectrum.frequency);
  out.add_column("psd_value", spectrum.density);
  write_csv(ctx.out_dir / "psd.csv", out);
  write_svg(ctx.out_dir / "psd.svg", spectrum.frequency, spectrum.density,
            {.title = "PSD of " + ps.column, .x_label = "f [Hz]", .y_label = "PSD",
             .log_x = true, .log_y = true});

  if (ps.fit_max_hz > 0.0) {
    const SpectrumFit fit =
        lorentzian_fit(spectrum.frequency, spectrum.density, {ps.fit_min_hz, ps.fit_max_hz});
    TraceTable row;
    row.add_column("center_hz", {fit.center_hz});
    row.add_column("linewidth_hz", {fit.linewidth_hz});
    row.add_column("plateau", {fit.plateau});
    row.add_column("amplitude", {fit.amplitude});
    row.add_column("residual_rms", {fit.residual_rms});
    row.add_column("center_sigma_hz", {std::sqrt(fit.covariance(1, 1)) / (2.0 * kPi)});
    row.add_column("linewidth_unbounded", {fit.linewidth_unbounded ? 1.0 : 0.0});
    write_csv(ctx.out_dir / "psd_fit.csv", row);
    if (ctx.log) {
      *ctx.log << "psd: fit center " << fit.center_hz << " Hz, linewidth " << fit.linewidth_hz
               << " Hz\n";
    }
  } else if (ctx.log) {
    *ctx.log << "psd: " << spectrum.frequency.size() << " bins -> " << ctx.out_dir.string()
             << '\n';
  }
  return kOk;
}

}  // namespace levitodyn::cli
