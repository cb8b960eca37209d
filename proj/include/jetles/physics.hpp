#pragma once

// Thermodynamic closures, Sutherland viscosity, Stokes stresses, and the
// Cartesian inviscid/viscous flux vectors.

#include <array>
#include <cmath>
#include <string>

#include "jetles/error.hpp"
#include "jetles/flow_config.hpp"

namespace jetles {

inline constexpr int kNcons = 5;

using Conservative = std::array<double, kNcons>;
using Vec3 = std::array<double, 3>;
using Tensor3 = std::array<Vec3, 3>;

struct PrimitiveState {
  double rho = 0.0;
  Vec3 u{};
  double p = 0.0;
  double t = 0.0;
};

// Stress components are stored xx, yy, zz, xy, xz, yz.
struct ViscousTerms {
  std::array<double, 6> tau{};
  Vec3 qflux{};
  double mu = 0.0;
  double kappa = 0.0;

  double tau_ij(int i, int j) const {
    if (i == j) return tau[i];
    const int s = i + j;  // 1 -> xy, 2 -> xz, 3 -> yz
    return tau[2 + s];
  }
};

inline double sutherland_viscosity(double t, const FlowConfig& cfg) {
  if (!(t > 0.0)) throw InvalidState("non-positive temperature in viscosity law", {-1, -1, -1});
  const double ratio = t / cfg.t_ref;
  return cfg.mu_ref * ratio * std::sqrt(ratio) * (cfg.t0_ref + cfg.s1) / (t + cfg.s1);
}

inline double pressure_from_conservative(const double* q, double gamma) {
  if (!(q[0] > 0.0)) throw InvalidState("non-positive density", {-1, -1, -1});
  const double ke = 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0];
  const double p = (gamma - 1.0) * (q[4] - ke);
  if (!(p > 0.0)) throw InvalidState("non-positive pressure", {-1, -1, -1});
  return p;
}

inline double pressure_from_conservative(const Conservative& q, const FlowConfig& cfg) {
  return pressure_from_conservative(q.data(), cfg.gamma);
}

inline double temperature_from_state(double p, double rho, const FlowConfig& cfg) {
  if (!(rho > 0.0)) throw InvalidState("non-positive density", {-1, -1, -1});
  return p / (rho * (cfg.cp - cfg.cv));
}

inline PrimitiveState to_primitive(const Conservative& q, const FlowConfig& cfg) {
  PrimitiveState w;
  w.p = pressure_from_conservative(q.data(), cfg.gamma);
  w.rho = q[0];
  w.u = {q[1] / q[0], q[2] / q[0], q[3] / q[0]};
  w.t = temperature_from_state(w.p, w.rho, cfg);
  return w;
}

inline Conservative to_conservative(const PrimitiveState& w, const FlowConfig& cfg) {
  const double ke = 0.5 * w.rho * (w.u[0] * w.u[0] + w.u[1] * w.u[1] + w.u[2] * w.u[2]);
  return {w.rho, w.rho * w.u[0], w.rho * w.u[1], w.rho * w.u[2], w.p / (cfg.gamma - 1.0) + ke};
}

// Builds a state from density, velocity and pressure, deriving temperature.
inline PrimitiveState make_primitive(double rho, Vec3 u, double p, const FlowConfig& cfg) {
  PrimitiveState w{rho, u, p, 0.0};
  w.t = temperature_from_state(p, rho, cfg);
  return w;
}

inline double sound_speed(const PrimitiveState& w, const FlowConfig& cfg) {
  return std::sqrt(cfg.gamma * w.p / w.rho);
}

// grad_u[i][j] = ∂u_i/∂x_j.
inline ViscousTerms viscous_terms(const Tensor3& grad_u, const Vec3& grad_t, double t, const FlowConfig& cfg) {
  ViscousTerms v;
  v.mu = sutherland_viscosity(t, cfg);
  v.kappa = v.mu * cfg.cp / cfg.prandtl;
  const double div = grad_u[0][0] + grad_u[1][1] + grad_u[2][2];
  const double third = 2.0 / 3.0 * div;
  v.tau[0] = v.mu * (2.0 * grad_u[0][0] - third);
  v.tau[1] = v.mu * (2.0 * grad_u[1][1] - third);
  v.tau[2] = v.mu * (2.0 * grad_u[2][2] - third);
  v.tau[3] = v.mu * (grad_u[0][1] + grad_u[1][0]);
  v.tau[4] = v.mu * (grad_u[0][2] + grad_u[2][0]);
  v.tau[5] = v.mu * (grad_u[1][2] + grad_u[2][1]);
  for (int j = 0; j < 3; ++j) v.qflux[j] = -v.kappa * grad_t[j];
  return v;
}

inline Conservative inviscid_flux(const Conservative& q, const FlowConfig& cfg, int direction) {
  const double p = pressure_from_conservative(q.data(), cfg.gamma);
  const double un = q[1 + direction] / q[0];
  Conservative e{q[0] * un, q[1] * un, q[2] * un, q[3] * un, (q[4] + p) * un};
  e[1 + direction] += p;
  return e;
}

inline Conservative viscous_flux(const ViscousTerms& vt, const Vec3& u, int direction) {
  const int j = direction;
  const double t0 = vt.tau_ij(0, j), t1 = vt.tau_ij(1, j), t2 = vt.tau_ij(2, j);
  return {0.0, t0, t1, t2, t0 * u[0] + t1 * u[1] + t2 * u[2] - vt.qflux[j]};
}

}  // namespace jetles
