#include "levitodyn/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "levitodyn/errors.hpp"

namespace levitodyn {

const std::vector<double>& TraceTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return data[c];
  }
  throw IoFailure("no column named '" + name + "'");
}

void TraceTable::add_column(std::string name, std::vector<double> values) {
  if (!data.empty() && values.size() != rows()) {
    throw IoFailure("column '" + name + "' has " + std::to_string(values.size()) +
                    " rows, expected " + std::to_string(rows()));
  }
  columns.push_back(std::move(name));
  data.push_back(std::move(values));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw IoFailure("cannot format number");
  return std::string(buf, ptr);
}

std::string to_csv(const TraceTable& table) {
  if (table.columns.empty() || table.rows() == 0) throw IoFailure("empty trace: nothing to write");
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(table.data[c][r]);
    }
    out += '\n';
  }
  return out;
}

TraceTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  TraceTable table;
  if (!std::getline(in, line) || line.empty()) throw IoFailure("empty trace: missing header");
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) table.columns.push_back(name);
  }
  table.data.assign(table.columns.size(), {});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw IoFailure("line " + std::to_string(line_no) + ": bad number in column '" +
                        table.columns[c] + "'");
      }
      table.data[c].push_back(v);
      p = next;
      const bool last = c + 1 == table.columns.size();
      if (last ? p != end : (p == end || *p != ',')) {
        throw IoFailure("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.columns.size()) + " fields");
      }
      ++p;
    }
  }
  if (table.rows() == 0) throw IoFailure("empty trace: no data rows");
  return table;
}

void write_csv(const std::filesystem::path& path, const TraceTable& table) {
  const std::string text = to_csv(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoFailure(path.string() + ": write failed");
}

TraceTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path.string() + ": cannot open for reading");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_csv(text.str());
  } catch (const IoFailure& e) {
    throw IoFailure(path.string() + ": " + e.what());
  }
}

ParticleState to_lab_chart(const ParticleState& state) {
  if (state.frame.isIdentity(0.0)) return state;
  ParticleState out = state;
  const Vec3 lab_l = state.frame * lab_angular_momentum(state.phi, state.pi, 0.0);
  out.phi = euler_from_rotation(state.orientation());
  out.pi = momenta_from_lab(out.phi, lab_l);
  out.frame = Mat3::Identity();
  return out;
}

TraceTable trajectory_table(const Trajectory& traj, const std::vector<double>& current) {
  const std::size_t n = traj.states.size();
  if (!current.empty() && current.size() != n) {
    throw IoFailure("current has " + std::to_string(current.size()) + " samples, trace has " +
                    std::to_string(n));
  }
  std::vector<std::vector<double>> cols(15, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const ParticleState s = to_lab_chart(traj.states[i]);
    const double row[15] = {traj.t[i],
                            s.r.x(), s.r.y(), s.r.z(),
                            s.p.x(), s.p.y(), s.p.z(),
                            s.phi.alpha, s.phi.beta, s.phi.gamma,
                            s.pi.pi_alpha, s.pi.pi_beta, s.pi.pi_gamma,
                            current.empty() ? 0.0 : current[i],
                            traj.energy[i]};
    for (std::size_t c = 0; c < 15; ++c) cols[c][i] = row[c];
  }
  static const char* names[15] = {"t",     "x",        "y",       "z",        "px",
                                  "py",    "pz",       "alpha",   "beta",     "gamma",
                                  "pi_alpha", "pi_beta", "pi_gamma", "J",      "energy"};
  TraceTable table;
  for (std::size_t c = 0; c < 15; ++c) table.add_column(names[c], std::move(cols[c]));
  return table;
}

}  // namespace levitodyn
