#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "levitodyn/detection.hpp"
#include "levitodyn/dynamics.hpp"
#include "levitodyn/sme_models.hpp"

namespace levitodyn {

enum class QuantumModelKind { kTranslational, kRotor };
enum class SweepVariable { kX, kY, kZ, kAlpha, kBeta, kGamma };

struct QuantumSettings {
  QuantumModelKind model = QuantumModelKind::kTranslational;
  int fock_dim = 20;
  int l_max = 20;
  double dt = 1e-3;
  double duration = 1.0;
  int trajectories = 1;
  int stride = 1;
  UnravelingKind unraveling = UnravelingKind::kCollective;
  int initial_level = 0;  // Fock level, or m for the rotor
};

struct SweepSettings {
  SweepVariable variable = SweepVariable::kX;
  double start = 0.0;
  double stop = 0.0;
  int points = 11;
};

struct PsdSettings {
  std::filesystem::path input;
  std::string column = "x";
  std::size_t segment_length = 4096;
  double overlap = 0.5;
  double fit_min_hz = 0.0;
  double fit_max_hz = 0.0;  // <= 0 disables the fit
};

// Parsed and validated run configuration.
struct SimConfig {
  Model model;
  HomodyneConfig detector;
  ParticleState initial;
  SimulationOptions integrator;
  int trajectories = 1;
  QuantumSettings quantum;
  SweepSettings sweep;
  PsdSettings psd;
};

// Reads the sectioned key = value format. Unknown sections or keys, malformed
// numbers and out-of-range values throw ConfigInvalid with a
// "section.key: ..." message.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = std::filesystem::path("."));

}  // namespace levitodyn
