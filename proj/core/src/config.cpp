#include "levitodyn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"particle",
       {"mass_kg", "inertia1_kg_m2", "inertia2_kg_m2", "inertia3_kg_m2", "volume_m3", "chi0",
        "delta_chi1", "delta_chi2", "delta_chi3"}},
      {"trap",
       {"power_w", "cross_section_m2", "wavelength_m", "waist_m", "rayleigh_range_m",
        "asymmetry_a1", "asymmetry_a2", "bx", "by", "laser_omega_rad_s"}},
      {"gas", {"collision_rate_hz", "temperature_k", "constituent_mass_kg"}},
      {"detector",
       {"axis_x", "axis_y", "axis_z", "half_angle_rad", "efficiency", "lo_phase_rad",
        "order_theta", "order_phi", "gain", "sample_interval_s", "expansion"}},
      {"integrator",
       {"dt_s", "duration_s", "seed", "stride", "recoil_on", "method", "trajectories",
        "max_steps", "richardson", "relative_step"}},
      {"initial",
       {"x_m", "y_m", "z_m", "px_kg_m_s", "py_kg_m_s", "pz_kg_m_s", "alpha_rad", "beta_rad",
        "gamma_rad", "pi_alpha_j_s", "pi_beta_j_s", "pi_gamma_j_s"}},
      {"constants", {"preset", "hbar_j_s", "kb_j_k", "c_m_s", "epsilon0_f_m", "g_m_s2"}},
      {"quantum",
       {"model", "fock_dim", "l_max", "dt_s", "duration_s", "trajectories", "stride",
        "unraveling", "initial_level"}},
      {"currents", {"sweep", "start", "stop", "points"}},
      {"psd", {"input", "column", "segment_length", "overlap", "fit_min_hz", "fit_max_hz"}},
  };
  return s;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigInvalid(path + ": " + what);
}

enum class Bound { kAny, kPositive, kNonNegative };

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  double number(const std::string& section, const std::string& key, double fallback,
                Bound bound = Bound::kAny) const {
    const auto text = raw(section, key);
    if (!text) return fallback;
    const std::string path = section + "." + key;
    double v = 0.0;
    const char* first = text->data();
    const char* last = first + text->size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      fail(path, "expected a number, got '" + *text + "'");
    }
    if (bound == Bound::kPositive && !(v > 0.0)) fail(path, "must be positive");
    if (bound == Bound::kNonNegative && !(v >= 0.0)) fail(path, "must be non-negative");
    return v;
  }

  long long integer(const std::string& section, const std::string& key, long long fallback,
                    long long min_value) const {
    const auto text = raw(section, key);
    if (!text) return fallback;
    const std::string path = section + "." + key;
    long long v = 0;
    const char* first = text->data();
    const char* last = first + text->size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(path, "expected an integer, got '" + *text + "'");
    if (v < min_value) fail(path, "must be at least " + std::to_string(min_value));
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
    const auto text = raw(section, key);
    if (!text) return fallback;
    std::uint64_t v = 0;
    const char* first = text->data();
    const char* last = first + text->size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      fail(section + "." + key, "expected a non-negative integer, got '" + *text + "'");
    }
    return v;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) const {
    const auto text = raw(section, key);
    if (!text) return fallback;
    if (*text == "true" || *text == "1" || *text == "on") return true;
    if (*text == "false" || *text == "0" || *text == "off") return false;
    fail(section + "." + key, "expected true or false, got '" + *text + "'");
  }

  template <typename E>
  E choice(const std::string& section, const std::string& key, E fallback,
           const std::map<std::string, E>& options) const {
    const auto text = raw(section, key);
    if (!text) return fallback;
    const auto it = options.find(*text);
    if (it == options.end()) {
      std::string names;
      for (const auto& [name, value] : options) names += (names.empty() ? "" : "|") + name;
      fail(section + "." + key, "expected one of " + names + ", got '" + *text + "'");
    }
    return it->second;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) fail(section, "key outside any section");
      fail(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) fail(section + "." + key, "unknown key");
    }
  }
}

}  // namespace

SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigInvalid(std::string("syntax: ") + e.what());
  }
  check_keys(tree);
  const Reader r(tree);
  SimConfig cfg;

  PhysicalConstants& k = cfg.model.constants;
  k = r.choice<bool>("constants", "preset", false, {{"si", false}, {"natural", true}})
          ? PhysicalConstants::natural()
          : PhysicalConstants::si();
  k.hbar = r.number("constants", "hbar_j_s", k.hbar, Bound::kPositive);
  k.k_b = r.number("constants", "kb_j_k", k.k_b, Bound::kPositive);
  k.c = r.number("constants", "c_m_s", k.c, Bound::kPositive);
  k.epsilon_0 = r.number("constants", "epsilon0_f_m", k.epsilon_0, Bound::kPositive);
  k.g = r.number("constants", "g_m_s2", k.g);

  RigidBody& body = cfg.model.body;
  body.mass = r.number("particle", "mass_kg", body.mass, Bound::kPositive);
  try {
    body.inertia = InertiaTensor(r.number("particle", "inertia1_kg_m2", 1.0, Bound::kPositive),
                                 r.number("particle", "inertia2_kg_m2", 1.0, Bound::kPositive),
                                 r.number("particle", "inertia3_kg_m2", 1.0, Bound::kPositive));
  } catch (const InvalidArgument& e) {
    fail("particle.inertia", e.what());
  }

  TrapParams& trap = cfg.model.trap;
  trap.volume = r.number("particle", "volume_m3", trap.volume, Bound::kPositive);
  trap.chi.chi0 = r.number("particle", "chi0", trap.chi.chi0, Bound::kPositive);
  trap.chi.delta = Vec3(r.number("particle", "delta_chi1", 0.0),
                        r.number("particle", "delta_chi2", 0.0),
                        r.number("particle", "delta_chi3", 0.0));
  try {
    trap.chi.validate();
  } catch (const InvalidArgument& e) {
    fail("particle.delta_chi", e.what());
  }
  trap.power = r.number("trap", "power_w", trap.power, Bound::kPositive);
  trap.cross_section = r.number("trap", "cross_section_m2", trap.cross_section, Bound::kPositive);
  trap.mode.wavelength = r.number("trap", "wavelength_m", trap.mode.wavelength, Bound::kPositive);
  trap.mode.waist = r.number("trap", "waist_m", trap.mode.waist, Bound::kPositive);
  trap.mode.rayleigh_range =
      r.number("trap", "rayleigh_range_m", trap.mode.rayleigh_range, Bound::kPositive);
  trap.mode.a1 = r.number("trap", "asymmetry_a1", trap.mode.a1, Bound::kPositive);
  trap.mode.a2 = r.number("trap", "asymmetry_a2", trap.mode.a2, Bound::kPositive);
  trap.omega_override = r.number("trap", "laser_omega_rad_s", 0.0, Bound::kNonNegative);
  try {
    trap.pol = elliptical_polarization(r.number("trap", "bx", 1.0), r.number("trap", "by", 0.0));
  } catch (const DegeneratePolarization& e) {
    fail("trap.bx", e.what());
  }

  GasParams& gas = cfg.model.gas;
  gas.gamma_c = r.number("gas", "collision_rate_hz", gas.gamma_c, Bound::kNonNegative);
  gas.temperature = r.number("gas", "temperature_k", gas.temperature, Bound::kPositive);
  gas.constituent_mass =
      r.number("gas", "constituent_mass_kg", gas.constituent_mass, Bound::kPositive);

  SimulationOptions& sim = cfg.integrator;
  sim.dt = r.number("integrator", "dt_s", sim.dt, Bound::kPositive);
  sim.duration = r.number("integrator", "duration_s", sim.duration, Bound::kNonNegative);
  sim.seed = r.unsigned_integer("integrator", "seed", 0);
  sim.stride = static_cast<int>(r.integer("integrator", "stride", 1, 1));
  sim.max_steps = r.integer("integrator", "max_steps", sim.max_steps, 1);
  sim.integrator = r.choice<Integrator>(
      "integrator", "method", Integrator::kAuto,
      {{"auto", Integrator::kAuto}, {"heun", Integrator::kHeun}, {"verlet", Integrator::kVerlet}});
  sim.forces.richardson = r.flag("integrator", "richardson", false);
  sim.forces.relative_step =
      r.number("integrator", "relative_step", sim.forces.relative_step, Bound::kPositive);
  cfg.model.recoil_on = r.flag("integrator", "recoil_on", false);
  cfg.trajectories = static_cast<int>(r.integer("integrator", "trajectories", 1, 1));

  HomodyneConfig& det = cfg.detector;
  det.det.axis = Vec3(r.number("detector", "axis_x", 0.0), r.number("detector", "axis_y", 0.0),
                      r.number("detector", "axis_z", 1.0));
  if (!(det.det.axis.norm() > 0.0)) fail("detector.axis", "must be nonzero");
  det.det.axis.normalize();
  det.det.half_angle = r.number("detector", "half_angle_rad", det.det.half_angle, Bound::kPositive);
  if (det.det.half_angle > kPi) fail("detector.half_angle_rad", "must not exceed pi");
  det.det.eta = r.number("detector", "efficiency", det.det.eta, Bound::kNonNegative);
  if (det.det.eta > 1.0) fail("detector.efficiency", "must lie in [0, 1]");
  det.det.order_theta = static_cast<int>(r.integer("detector", "order_theta", 32, 2));
  det.det.order_phi = static_cast<int>(r.integer("detector", "order_phi", 64, 2));
  det.delta_phi = r.number("detector", "lo_phase_rad", 0.0);
  det.gain = r.number("detector", "gain", 1.0);
  det.dt = r.number("detector", "sample_interval_s", sim.dt * sim.stride, Bound::kPositive);
  det.expansion = r.choice<PositionExpansion>(
      "detector", "expansion", PositionExpansion::kConsistent,
      {{"consistent", PositionExpansion::kConsistent},
       {"published", PositionExpansion::kPublished}});

  ParticleState& s = cfg.initial;
  s.r = Vec3(r.number("initial", "x_m", 0.0), r.number("initial", "y_m", 0.0),
             r.number("initial", "z_m", 0.0));
  s.p = Vec3(r.number("initial", "px_kg_m_s", 0.0), r.number("initial", "py_kg_m_s", 0.0),
             r.number("initial", "pz_kg_m_s", 0.0));
  s.phi = {r.number("initial", "alpha_rad", 0.0), r.number("initial", "beta_rad", 0.0),
           r.number("initial", "gamma_rad", 0.0)};
  s.pi = {r.number("initial", "pi_alpha_j_s", 0.0), r.number("initial", "pi_beta_j_s", 0.0),
          r.number("initial", "pi_gamma_j_s", 0.0)};

  QuantumSettings& q = cfg.quantum;
  q.model = r.choice<QuantumModelKind>(
      "quantum", "model", q.model,
      {{"translational", QuantumModelKind::kTranslational}, {"rotor", QuantumModelKind::kRotor}});
  q.fock_dim = static_cast<int>(r.integer("quantum", "fock_dim", q.fock_dim, 10));
  q.l_max = static_cast<int>(r.integer("quantum", "l_max", q.l_max, 5));
  q.dt = r.number("quantum", "dt_s", q.dt, Bound::kPositive);
  q.duration = r.number("quantum", "duration_s", q.duration, Bound::kPositive);
  q.trajectories = static_cast<int>(r.integer("quantum", "trajectories", q.trajectories, 1));
  q.stride = static_cast<int>(r.integer("quantum", "stride", q.stride, 1));
  q.unraveling = r.choice<UnravelingKind>(
      "quantum", "unraveling", q.unraveling,
      {{"per_channel", UnravelingKind::kPerChannel}, {"collective", UnravelingKind::kCollective}});
  q.initial_level = static_cast<int>(r.integer("quantum", "initial_level", 0, -1'000'000));

  SweepSettings& sw = cfg.sweep;
  sw.variable = r.choice<SweepVariable>(
      "currents", "sweep", sw.variable,
      {{"x", SweepVariable::kX}, {"y", SweepVariable::kY}, {"z", SweepVariable::kZ},
       {"alpha", SweepVariable::kAlpha}, {"beta", SweepVariable::kBeta},
       {"gamma", SweepVariable::kGamma}});
  sw.start = r.number("currents", "start", sw.start);
  sw.stop = r.number("currents", "stop", sw.stop);
  sw.points = static_cast<int>(r.integer("currents", "points", sw.points, 2));

  PsdSettings& psd = cfg.psd;
  if (const auto input = r.raw("psd", "input")) {
    psd.input = std::filesystem::path(*input);
    if (psd.input.is_relative()) psd.input = base_dir / psd.input;
  }
  if (const auto column = r.raw("psd", "column")) psd.column = *column;
  psd.segment_length =
      static_cast<std::size_t>(r.integer("psd", "segment_length", 4096, 2));
  psd.overlap = r.number("psd", "overlap", psd.overlap, Bound::kNonNegative);
  if (psd.overlap >= 1.0) fail("psd.overlap", "must lie in [0, 1)");
  psd.fit_min_hz = r.number("psd", "fit_min_hz", 0.0, Bound::kNonNegative);
  psd.fit_max_hz = r.number("psd", "fit_max_hz", 0.0, Bound::kNonNegative);

  try {
    trap.mode.validate();
  } catch (const InvalidArgument& e) {
    fail("trap", e.what());
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigInvalid(path.string() + ": cannot open");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

}  // namespace levitodyn
