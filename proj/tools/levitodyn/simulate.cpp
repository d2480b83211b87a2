#include <ostream>

#include "levitodyn/cli.hpp"
#include "levitodyn/detection.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/ensemble.hpp"
#include "levitodyn/plot.hpp"
#include "levitodyn/trace_io.hpp"

namespace levitodyn::cli {
namespace {

// Detector noise uses streams disjoint from the integrator's.
constexpr std::uint64_t kDetectorStream = std::uint64_t{1} << 63;

}  // namespace

int run_simulate(const RunContext& ctx) {
  const SimConfig& cfg = ctx.config;
  cfg.detector.validate();
  const HomodyneDetector detector(cfg.model.trap, cfg.model.constants, cfg.detector);
  const auto count = static_cast<std::size_t>(cfg.trajectories);

  const auto tables = parallel_map(count, ctx.threads, [&](std::size_t i) {
    SimulationOptions opts = cfg.integrator;
    opts.stream = i;
    const Trajectory traj = simulate_trajectory(cfg.initial, cfg.model, opts);
    Rng rng = make_rng(opts.seed, kDetectorStream | i);
    std::vector<double> current;
    current.reserve(traj.states.size());
    for (const auto& s : traj.states) current.push_back(detector.sample(s, rng));
    return trajectory_table(traj, current);
  });

  for (std::size_t i = 0; i < count; ++i) {
    write_csv(ctx.out_dir / indexed_name("trajectory", i, count, ".csv"), tables[i]);
  }
  const TraceTable& first = tables.front();
  write_svg(ctx.out_dir / "trajectory.svg", first.column("t"), first.column("x"),
            {.title = "x(t)", .x_label = "t [s]", .y_label = "x [m]"});
  write_svg(ctx.out_dir / "current.svg", first.column("t"), first.column("J"),
            {.title = "homodyne current", .x_label = "t [s]", .y_label = "J"});
  if (ctx.log) {
    *ctx.log << "simulate: " << count << " trajectories, " << first.rows()
             << " samples each -> " << ctx.out_dir.string() << '\n';
  }
  return kOk;
}

}  // namespace levitodyn::cli
