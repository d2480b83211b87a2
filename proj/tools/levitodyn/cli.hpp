#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "levitodyn/config.hpp"

namespace levitodyn::cli {

struct RunContext {
  SimConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  std::ostream* log = nullptr;
};

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kBlowup = 3;
inline constexpr int kIoError = 4;

int run_simulate(const RunContext& ctx);
int run_currents(const RunContext& ctx);
int run_sme(const RunContext& ctx);
int run_psd(const RunContext& ctx);
int run_check(const RunContext& ctx);

// Full command line, including argv[0]. Messages go to out / err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "name_0007.csv" style names for ensemble members.
std::string indexed_name(const std::string& stem, std::size_t index, std::size_t count,
                         const std::string& ext);

}  // namespace levitodyn::cli
