#include <cmath>
#include <ostream>

#include "levitodyn/cli.hpp"
#include "levitodyn/ensemble.hpp"
#include "levitodyn/errors.hpp"
#include "levitodyn/plot.hpp"
#include "levitodyn/sme_models.hpp"
#include "levitodyn/trace_io.hpp"

namespace levitodyn::cli {
namespace {

// Trajectories summed per task; fixed so the ensemble sum does not depend on
// the thread count.
constexpr std::size_t kChunk = 16;

struct ChunkResult {
  std::vector<TraceTable> tables;
  std::vector<CMat> rho_sum;  // per recorded sample
};

}  // namespace

int run_sme(const RunContext& ctx) {
  const SimConfig& cfg = ctx.config;
  const QuantumSettings& q = cfg.quantum;
  const bool rotor = q.model == QuantumModelKind::kRotor;
  const QuantumModel model =
      rotor ? build_planar_rotor_model(cfg.model.trap, cfg.model.body, cfg.model.gas,
                                       cfg.model.constants, q.l_max)
            : build_1d_translational_model(cfg.model.trap, cfg.model.body, cfg.model.gas,
                                           cfg.model.constants, q.fock_dim);
  const HomodyneSetup setup =
      homodyne_setup(model, cfg.detector.det, cfg.detector.delta_phi, q.unraveling);
  const BelavkinIntegrator integrator(setup.hamiltonian, setup.channels, setup.spec, q.dt);

  const Eigen::Index dim = model.dim();
  const Eigen::Index level = rotor ? q.initial_level + q.l_max : q.initial_level;
  if (level < 0 || level >= dim) {
    throw ConfigInvalid("quantum.initial_level: outside the truncated basis");
  }
  const DensityMatrix rho0 = fock_state(dim, level);
  const auto steps = static_cast<std::int64_t>(std::llround(q.duration / q.dt));
  if (steps < 1) throw ConfigInvalid("quantum.duration_s: shorter than one step");
  const std::int64_t samples = steps / q.stride + 1;
  const auto count = static_cast<std::size_t>(q.trajectories);
  const std::uint64_t seed = cfg.integrator.seed;

  auto expect = [&](const DensityMatrix& rho) { return (model.position * rho).trace().real(); };

  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const auto results = parallel_map(chunks, ctx.threads, [&](std::size_t c) {
    ChunkResult out;
    out.rho_sum.assign(static_cast<std::size_t>(samples), CMat::Zero(dim, dim));
    for (std::size_t i = c * kChunk; i < std::min(count, (c + 1) * kChunk); ++i) {
      Rng rng = make_rng(seed, i);
      DensityMatrix rho = rho0;
      std::vector<double> t, j, x, p;
      auto record = [&](std::int64_t step, double current) {
        t.push_back(static_cast<double>(step) * q.dt);
        j.push_back(current);
        x.push_back(expect(rho));
        p.push_back(purity(rho));
        out.rho_sum[static_cast<std::size_t>(step / q.stride)] += rho;
      };
      record(0, 0.0);
      double accumulated = 0.0;
      for (std::int64_t s = 1; s <= steps; ++s) {
        BelavkinResult r = integrator.step(rho, rng);
        rho = std::move(r.rho);
        if (!rho.allFinite()) {
          throw NumericalBlowup("sme trajectory " + std::to_string(i) + ": non-finite state at t = " +
                                std::to_string(static_cast<double>(s) * q.dt));
        }
        accumulated += setup.current(r.currents);
        if (s % q.stride == 0) {
          record(s, accumulated / q.stride);
          accumulated = 0.0;
        }
      }
      TraceTable table;
      table.add_column("t", std::move(t));
      table.add_column("J", std::move(j));
      table.add_column("position_mean", std::move(x));
      table.add_column("purity", std::move(p));
      out.tables.push_back(std::move(table));
    }
    return out;
  });

  std::vector<CMat> mean(static_cast<std::size_t>(samples), CMat::Zero(dim, dim));
  std::size_t index = 0;
  for (const auto& chunk : results) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += chunk.rho_sum[k];
    for (const auto& table : chunk.tables) {
      write_csv(ctx.out_dir / indexed_name("sme_trajectory", index++, count, ".csv"), table);
    }
  }

  std::vector<double> t, x_mean, x_ref, distance;
  DensityMatrix ref = rho0;
  for (std::int64_t s = 0; s <= steps; ++s) {
    if (s > 0) ref = lindblad_step(ref, setup.hamiltonian, setup.channels, q.dt);
    if (s % q.stride != 0) continue;
    const CMat avg = mean[static_cast<std::size_t>(s / q.stride)] / static_cast<double>(count);
    t.push_back(static_cast<double>(s) * q.dt);
    x_mean.push_back(expect(avg));
    x_ref.push_back(expect(ref));
    distance.push_back(trace_distance(avg, ref));
  }
  TraceTable ensemble;
  ensemble.add_column("t", std::move(t));
  ensemble.add_column("position_ensemble", std::move(x_mean));
  ensemble.add_column("position_lindblad", std::move(x_ref));
  ensemble.add_column("trace_distance", std::move(distance));
  write_csv(ctx.out_dir / "sme_ensemble.csv", ensemble);
  const TraceTable& first = results.front().tables.front();
  write_svg(ctx.out_dir / "sme_current.svg", first.column("t"), first.column("J"),
            {.title = "conditional homodyne current", .x_label = "t [s]", .y_label = "J"});
  if (ctx.log) {
    *ctx.log << "sme: " << count << " trajectories, dimension " << dim << ", "
             << setup.channels.size() << " channels, final trace distance "
             << ensemble.column("trace_distance").back() << '\n';
  }
  return kOk;
}

}  // namespace levitodyn::cli
