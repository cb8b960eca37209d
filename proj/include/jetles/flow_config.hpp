#pragma once

#include <cmath>
#include <string>

#include "jetles/error.hpp"

namespace jetles {

// Physical and numerical constants of a run, all dimensionless.
//
// Velocities are scaled by the jet exit velocity, lengths by the jet exit
// diameter, and density and temperature by their free-stream values. With
// that scaling the gas constant is R = cp - cv = 1 / (gamma M^2) and the
// reference viscosity is 1 / Re.
struct FlowConfig {
  double gamma = 1.4;
  double prandtl = 0.72;
  double reynolds = 1.5744e6;
  double mach_jet = 1.4;
  double pressure_ratio = 1.0;
  double temperature_ratio = 1.0;
  double mu_ref = 1.0 / 1.5744e6;
  double t_ref = 1.0;
  double t0_ref = 1.0;
  double s1 = 0.38;  // 110.4 K / 288.15 K
  double cp = 0.0;
  double cv = 0.0;
  double dt = 1.0e-4;
  double k2 = 0.25;
  double k4 = 1.0 / 64.0;

  double gas_constant() const { return cp - cv; }

  // Recomputes cp and cv from gamma and mach_jet.
  void derive_heat_capacities() {
    const double r = 1.0 / (gamma * mach_jet * mach_jet);
    cv = r / (gamma - 1.0);
    cp = gamma * cv;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid flow configuration: " + msg); };
    if (!(gamma > 1.0)) fail("gamma must exceed 1");
    if (!(cp - cv > 0.0)) fail("cp - cv must be positive");
    if (!(std::abs(cp / cv - gamma) <= 1e-12 * gamma)) fail("cp / cv must equal gamma");
    if (!(prandtl > 0.0)) fail("prandtl must be positive");
    if (!(dt > 0.0)) fail("dt must be positive");
    if (!(k2 >= 0.0)) fail("k2 must be non-negative");
    if (!(k4 > 0.0)) fail("k4 must be positive");
    if (!(mach_jet > 0.0)) fail("mach must be positive");
    if (!(reynolds > 0.0)) fail("reynolds must be positive");
    if (!(mu_ref >= 0.0)) fail("mu_ref must be non-negative");
    if (!(t_ref > 0.0) || !(t0_ref > 0.0)) fail("reference temperatures must be positive");
    if (!(s1 >= 0.0)) fail("s1 must be non-negative");
    if (!(pressure_ratio > 0.0) || !(temperature_ratio > 0.0)) fail("PR and TR must be positive");
  }

  static FlowConfig jet_defaults() {
    FlowConfig c;
    c.derive_heat_capacities();
    return c;
  }
};

}  // namespace jetles
