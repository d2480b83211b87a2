#include <ostream>

#include "levitodyn/cli.hpp"
#include "levitodyn/detection.hpp"
#include "levitodyn/plot.hpp"
#include "levitodyn/trace_io.hpp"

namespace levitodyn::cli {
namespace {

const char* variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::kX: return "x";
    case SweepVariable::kY: return "y";
    case SweepVariable::kZ: return "z";
    case SweepVariable::kAlpha: return "alpha";
    case SweepVariable::kBeta: return "beta";
    case SweepVariable::kGamma: return "gamma";
  }
  return "?";
}

void assign(ParticleState& s, SweepVariable v, double value) {
  switch (v) {
    case SweepVariable::kX: s.r.x() = value; break;
    case SweepVariable::kY: s.r.y() = value; break;
    case SweepVariable::kZ: s.r.z() = value; break;
    case SweepVariable::kAlpha: s.phi.alpha = value; break;
    case SweepVariable::kBeta: s.phi.beta = value; break;
    case SweepVariable::kGamma: s.phi.gamma = value; break;
  }
}

}  // namespace

int run_currents(const RunContext& ctx) {
  const SimConfig& cfg = ctx.config;
  cfg.detector.validate();
  const HomodyneDetector detector(cfg.model.trap, cfg.model.constants, cfg.detector);
  const SweepSettings& sw = cfg.sweep;
  const auto n = static_cast<std::size_t>(sw.points);

  std::vector<std::vector<double>> cols(6, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double value = sw.start + (sw.stop - sw.start) * static_cast<double>(i) /
                                        static_cast<double>(n - 1);
    ParticleState s = cfg.initial;
    assign(s, sw.variable, value);
    const CurrentDecomposition d = detector.decompose(s);
    const double row[6] = {value, d.j0, d.jt, d.jr, d.jrt, detector.mean_current(s)};
    for (std::size_t c = 0; c < 6; ++c) cols[c][i] = row[c];
  }
  TraceTable table;
  const char* names[6] = {variable_name(sw.variable), "J0", "JT", "JR", "JRT", "J_mean"};
  for (std::size_t c = 0; c < 6; ++c) table.add_column(names[c], std::move(cols[c]));
  write_csv(ctx.out_dir / "currents.csv", table);
  write_svg(ctx.out_dir / "currents.svg", table.data[0], table.column("J_mean"),
            {.title = "mean homodyne current", .x_label = names[0], .y_label = "J"});
  if (ctx.log) *ctx.log << "currents: " << n << " points -> " << ctx.out_dir.string() << '\n';
  return kOk;
}

}  // namespace levitodyn::cli
