#include "levitodyn/cli.hpp"

#include <cstdio>
#include <ostream>
#include <vector>

#include "CLI11.hpp"
#include "levitodyn/ensemble.hpp"
#include "levitodyn/errors.hpp"

namespace levitodyn::cli {

std::string indexed_name(const std::string& stem, std::size_t index, std::size_t count,
                         const std::string& ext) {
  if (count <= 1) return stem + ext;
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu", index);
  return stem + buf + ext;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ro-translational dynamics and homodyne detection of a levitated particle"};
  app.name("levitodyn");
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("command", command, "simulate | currents | sme | psd | check")
      ->required()
      ->check(CLI::IsMember({"simulate", "currents", "sme", "psd", "check"}));
  app.add_option("--config", config_path, "Configuration file")->required();
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", seed, "Overrides integrator.seed");
  app.add_option("--threads", threads, "Worker threads (default: LEVITODYN_THREADS, then all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunContext ctx;
    ctx.config = load_config(config_path);
    if (seed) ctx.config.integrator.seed = *seed;
    ctx.threads = resolve_threads(threads);
    ctx.out_dir = out_dir;
    ctx.log = &out;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailure(out_dir.string() + ": " + ec.message());

    if (command == "simulate") return run_simulate(ctx);
    if (command == "currents") return run_currents(ctx);
    if (command == "sme") return run_sme(ctx);
    if (command == "psd") return run_psd(ctx);
    return run_check(ctx);
  } catch (const ConfigInvalid& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalBlowup& e) {
    err << "numerical blowup: " << e.what() << '\n';
    return kBlowup;
  } catch (const IoFailure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace levitodyn::cli
