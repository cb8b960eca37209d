#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jetles/physics.hpp"

using namespace jetles;

namespace {

FlowConfig unit_gas() {
  FlowConfig c = FlowConfig::jet_defaults();
  c.cv = 2.5;
  c.cp = 3.5;
  return c;
}

}  // namespace

TEST(Sutherland, CollapsesToReferenceViscosity) {
  FlowConfig c = FlowConfig::jet_defaults();
  c.mu_ref = 3.0e-5;
  c.t_ref = 1.0;
  c.t0_ref = 1.0;
  EXPECT_DOUBLE_EQ(sutherland_viscosity(1.0, c), 3.0e-5);
}

TEST(Sutherland, HandEvaluatedPoint) {
  FlowConfig c = FlowConfig::jet_defaults();
  c.mu_ref = 1.0;
  c.t_ref = 1.0;
  c.t0_ref = 1.0;
  c.s1 = 0.38;
  const double oracle = 2.0 * std::sqrt(2.0) * 1.38 / 2.38;
  EXPECT_NEAR(sutherland_viscosity(2.0, c), oracle, 1e-14);
  EXPECT_NEAR(sutherland_viscosity(2.0, c), 1.6399, 2e-4);
  EXPECT_LT(sutherland_viscosity(1.5, c), sutherland_viscosity(2.0, c));
}

TEST(Sutherland, PositiveAndMonotoneOnRange) {
  FlowConfig c = FlowConfig::jet_defaults();
  double prev = 0.0;
  for (int n = 1; n <= 1000; ++n) {
    const double mu = sutherland_viscosity(0.01 * n, c);
    EXPECT_GT(mu, prev);
    prev = mu;
  }
  EXPECT_THROW(sutherland_viscosity(0.0, c), InvalidState);
  EXPECT_THROW(sutherland_viscosity(-1.0, c), InvalidState);
}

TEST(EquationOfState, PressureInversion) {
  const FlowConfig c = unit_gas();
  EXPECT_DOUBLE_EQ(pressure_from_conservative(Conservative{1, 0, 0, 0, 2.5}, c), 1.0);
  EXPECT_DOUBLE_EQ(pressure_from_conservative(Conservative{1, 1, 0, 0, 3.0}, c), 0.4 * 2.5);
  EXPECT_THROW(pressure_from_conservative(Conservative{0, 0, 0, 0, 1}, c), InvalidState);
  EXPECT_THROW(pressure_from_conservative(Conservative{1, 3, 0, 0, 1}, c), InvalidState);
}

TEST(EquationOfState, Temperature) {
  FlowConfig c = unit_gas();
  c.cv = 1.0;
  c.cp = 2.0;
  EXPECT_DOUBLE_EQ(temperature_from_state(1.0, 1.0, c), 1.0);
  c.cv = 1.0;
  c.cp = 1.4;
  EXPECT_NEAR(temperature_from_state(2.0, 1.0, c), 5.0, 1e-14);
  EXPECT_THROW(temperature_from_state(1.0, 0.0, c), InvalidState);
}

TEST(EquationOfState, RandomRoundTrips) {
  const FlowConfig c = FlowConfig::jet_defaults();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.1, 5.0), vel(-3.0, 3.0);
  for (int n = 0; n < 1000; ++n) {
    const PrimitiveState w = make_primitive(pos(rng), {vel(rng), vel(rng), vel(rng)}, pos(rng), c);
    const Conservative q = to_conservative(w, c);
    const PrimitiveState back = to_primitive(q, c);
    EXPECT_NEAR(back.p, w.p, 1e-13 * w.p);
    EXPECT_NEAR(back.rho, w.rho, 1e-15 * w.rho);
    EXPECT_NEAR(back.t, w.t, 1e-13 * w.t);
    EXPECT_NEAR(back.rho * back.t * c.gas_constant(), back.p, 1e-14 * back.p);
    const Conservative again = to_conservative(back, c);
    for (int k = 0; k < kNcons; ++k) EXPECT_NEAR(again[k], q[k], 1e-13 * (std::abs(q[k]) + 1.0));
  }
}

TEST(ViscousTerms, Quiescent) {
  const FlowConfig c = FlowConfig::jet_defaults();
  const ViscousTerms v = viscous_terms(Tensor3{}, Vec3{}, 1.0, c);
  for (double t : v.tau) EXPECT_EQ(t, 0.0);
  for (double q : v.qflux) EXPECT_EQ(q, 0.0);
}

TEST(ViscousTerms, PureShear) {
  const FlowConfig c = FlowConfig::jet_defaults();
  Tensor3 g{};
  g[0][1] = 2.0;
  const ViscousTerms v = viscous_terms(g, Vec3{}, 1.0, c);
  EXPECT_DOUBLE_EQ(v.tau_ij(0, 1), v.mu * 2.0);
  EXPECT_DOUBLE_EQ(v.tau_ij(1, 0), v.mu * 2.0);
  EXPECT_EQ(v.tau_ij(0, 0), 0.0);
  EXPECT_EQ(v.tau_ij(1, 1), 0.0);
  EXPECT_EQ(v.tau_ij(2, 2), 0.0);
}

TEST(ViscousTerms, DilationAnnihilatedAndTraceFree) {
  const FlowConfig c = FlowConfig::jet_defaults();
  Tensor3 g{};
  g[0][0] = g[1][1] = g[2][2] = 0.7;
  const ViscousTerms v = viscous_terms(g, Vec3{}, 1.0, c);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(v.tau_ij(d, d), 0.0, 1e-20);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    Tensor3 r{};
    for (auto& row : r)
      for (auto& x : row) x = u(rng);
    const ViscousTerms w = viscous_terms(r, Vec3{u(rng), u(rng), u(rng)}, 1.3, c);
    double norm = 0.0;
    for (double t : w.tau) norm = std::max(norm, std::abs(t));
    EXPECT_LE(std::abs(w.tau[0] + w.tau[1] + w.tau[2]), 1e-12 * norm);
  }
}

TEST(ViscousTerms, HeatFluxUsesPrandtlConductivity) {
  const FlowConfig c = FlowConfig::jet_defaults();
  const ViscousTerms v = viscous_terms(Tensor3{}, Vec3{1.0, -2.0, 0.5}, 1.0, c);
  EXPECT_DOUBLE_EQ(v.kappa, v.mu * c.cp / c.prandtl);
  EXPECT_DOUBLE_EQ(v.qflux[1], 2.0 * v.kappa);
}

TEST(InviscidFlux, RestState) {
  const FlowConfig c = unit_gas();
  const Conservative q{1, 0, 0, 0, 2.5};
  for (int d = 0; d < 3; ++d) {
    const Conservative e = inviscid_flux(q, c, d);
    EXPECT_EQ(e[0], 0.0);
    for (int m = 0; m < 3; ++m) EXPECT_DOUBLE_EQ(e[1 + m], m == d ? 1.0 : 0.0);
    EXPECT_EQ(e[4], 0.0);
  }
}

TEST(InviscidFlux, HandEvaluated) {
  const FlowConfig c = unit_gas();
  const PrimitiveState w{1.0, {2.0, 0.0, 0.0}, 1.0, 1.0};
  const Conservative q = to_conservative(w, c);
  const double e = q[4];
  EXPECT_DOUBLE_EQ(e, 2.5 + 2.0);
  const Conservative f = inviscid_flux(q, c, 0);
  EXPECT_DOUBLE_EQ(f[0], 2.0);
  EXPECT_DOUBLE_EQ(f[1], 5.0);
  EXPECT_EQ(f[2], 0.0);
  EXPECT_EQ(f[3], 0.0);
  EXPECT_DOUBLE_EQ(f[4], (e + 1.0) * 2.0);
}

TEST(InviscidFlux, MassFluxIsMomentum) {
  const FlowConfig c = FlowConfig::jet_defaults();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.1, 5.0), vel(-3.0, 3.0);
  for (int n = 0; n < 1000; ++n) {
    const Conservative q = to_conservative(make_primitive(pos(rng), {vel(rng), vel(rng), vel(rng)}, pos(rng), c), c);
    for (int d = 0; d < 3; ++d) EXPECT_EQ(inviscid_flux(q, c, d)[0], q[1 + d]);
  }
}

TEST(ViscousFlux, Assembly) {
  ViscousTerms v{};
  for (int d = 0; d < 3; ++d)
    for (double x : viscous_flux(v, {1, 2, 3}, d)) EXPECT_EQ(x, 0.0);
  v.mu = 0.5;
  v.tau[3] = 0.5 * 4.0;  // xy = μ s
  const Conservative f = viscous_flux(v, {1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 2.0);
  EXPECT_DOUBLE_EQ(f[4], 2.0);
  v.qflux = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(viscous_flux(v, {0, 0, 0}, 2)[4], -3.0);
  EXPECT_EQ(viscous_flux(v, {5, 5, 5}, 0)[0], 0.0);
}
