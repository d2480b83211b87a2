#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "levitodyn/dynamics.hpp"

namespace levitodyn {

// Column-major numeric table with a mandatory header row.
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[c][row]

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  // Throws IoFailure for an unknown column.
  const std::vector<double>& column(const std::string& name) const;
  void add_column(std::string name, std::vector<double> values);
};

// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

std::string to_csv(const TraceTable& table);
TraceTable parse_csv(const std::string& text);

// Throws IoFailure when the file cannot be written or read, or when a row is
// malformed.
void write_csv(const std::filesystem::path& path, const TraceTable& table);
TraceTable read_csv(const std::filesystem::path& path);

// t, x, y, z, px, py, pz, alpha, beta, gamma, pi_alpha, pi_beta, pi_gamma,
// J, energy. Angles and conjugate momenta are reported in the lab chart.
// `current` may be empty, in which case J is written as 0.
TraceTable trajectory_table(const Trajectory& traj, const std::vector<double>& current);

// State in the lab chart (frame = identity). Near gimbal lock the momenta
// come from the well-conditioned map pi = N^T L.
ParticleState to_lab_chart(const ParticleState& state);

}  // namespace levitodyn
