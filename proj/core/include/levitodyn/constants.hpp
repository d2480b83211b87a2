#pragma once

namespace levitodyn {

// SI values (CODATA 2018). Override individual fields only for
// nondimensionalized runs.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;      // J s
  double k_b = 1.380649e-23;          // J / K
  double c = 299792458.0;             // m / s
  double epsilon_0 = 8.8541878128e-12;  // F / m
  double g = 9.80665;                 // m / s^2

  static PhysicalConstants si() { return {}; }

  // hbar = k_b = c = 1, no gravity. Convenient for toy models and tests.
  static PhysicalConstants natural() { return {1.0, 1.0, 1.0, 1.0, 0.0}; }
};

}  // namespace levitodyn
