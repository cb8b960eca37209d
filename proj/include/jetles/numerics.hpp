#pragma once

// Spatial operators on curvilinear blocks: central differences, scalar
// artificial dissipation, right-hand-side assembly, and the five-stage
// Runge-Kutta update.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "jetles/block_array.hpp"
#include "jetles/error.hpp"
#include "jetles/flow_config.hpp"
#include "jetles/grid.hpp"
#include "jetles/physics.hpp"

namespace jetles {

using ConservativeField = BlockArray<kNcons>;

// Primitive layout: rho, u, v, w, p, T.
inline constexpr int kNprim = 6;
using PrimitiveField = BlockArray<kNprim>;

// Per node: viscous flux contracted with the scaled metric row of each
// computational direction, 3 directions x (3 momentum + energy).
inline constexpr int kNvisc = 12;
using ViscousFluxField = BlockArray<kNvisc>;

struct RkScheme {
  static constexpr int stages = 5;
  std::array<double, 5> alphas{0.25, 1.0 / 6.0, 0.375, 0.5, 1.0};
};

// q^(k) = q^n - alpha_k dt RHS(q^(k-1)). `stage(s, alpha, q0, q)` must
// overwrite q with the stage-s value computed from q0 and the current q.
template <class State, class Stage>
void rk5_advance(const RkScheme& rk, State& q, Stage&& stage) {
  const State q0 = q;
  for (int s = 0; s < RkScheme::stages; ++s) stage(s, rk.alphas[s], q0, q);
}

// Index-space derivative of a scalar field along one axis over the interior.
inline BlockArray<1> central_derivative(const BlockArray<1>& f, const BlockTopology& topo, int axis) {
  const Extents e = f.extents();
  if (e[axis] < 3) throw ConfigError("central derivative needs at least 3 nodes along the axis");
  BlockArray<1> out(e);
  const std::ptrdiff_t s = f.stride(axis);
  const bool lo = topo.fringe[axis][kLow], hi = topo.fringe[axis][kHigh];
  for_each_node(f.interior(), [&](int i, int j, int k) {
    const int t = axis == kXi ? i : axis == kEta ? j : k;
    out(i, j, k) = axis_difference(f.at(i, j, k), s, t, e[axis], lo, hi);
  });
  return out;
}

// Pressure switch: normalized second difference of pressure.
inline double pressure_sensor(double pm, double p0, double pp) {
  return std::abs(pp - 2.0 * p0 + pm) / (pp + 2.0 * p0 + pm);
}

// Blended second/fourth-difference flux at the face between nodes t and t+1.
// q points at node t; s is the node stride (in doubles) along the line.
inline double dissipation_face_flux(const double* q, std::ptrdiff_t s, double lam_face, double eps2, double eps4,
                                    bool full_stencil) {
  const double d2 = q[s] - q[0];
  if (!full_stencil) return lam_face * (eps2 * d2);
  const double d4 = q[2 * s] - 3.0 * q[s] + 3.0 * q[0] - q[-s];
  return lam_face * (eps2 * d2 - eps4 * d4);
}

// One-dimensional dissipation along a line of n values: returns
// D_{t+1/2} - D_{t-1/2} at every node. Faces missing a neighbor for the
// fourth difference keep only the second-difference part; on a periodic
// line every face is complete.
inline std::vector<double> dissipation_line(std::span<const double> q, std::span<const double> lambda,
                                            std::span<const double> p, double k2, double k4, bool periodic) {
  const int n = static_cast<int>(q.size());
  auto wrap = [n](int t) { return ((t % n) + n) % n; };
  std::vector<double> nu(n, 0.0);
  for (int t = 0; t < n; ++t) {
    if (!periodic && (t == 0 || t == n - 1)) continue;
    nu[t] = pressure_sensor(p[wrap(t - 1)], p[t], p[wrap(t + 1)]);
  }
  const int faces = periodic ? n : n - 1;
  std::vector<double> face(faces, 0.0);
  for (int t = 0; t < faces; ++t) {
    const int t1 = wrap(t + 1);
    const double eps2 = k2 * std::max(nu[t], nu[t1]);
    const double eps4 = std::max(0.0, k4 - eps2);
    const double lam = 0.5 * (lambda[t] + lambda[t1]);
    const double d2 = q[t1] - q[t];
    const bool full = periodic || (t - 1 >= 0 && t + 2 <= n - 1);
    if (full) {
      const double d4 = q[wrap(t + 2)] - 3.0 * q[t1] + 3.0 * q[t] - q[wrap(t - 1)];
      face[t] = lam * (eps2 * d2 - eps4 * d4);
    } else {
      face[t] = lam * (eps2 * d2);
    }
  }
  std::vector<double> out(n, 0.0);
  for (int t = 0; t < n; ++t) {
    const double plus = (periodic || t < n - 1) ? face[t] : 0.0;
    const double minus = periodic ? face[wrap(t - 1)] : (t > 0 ? face[t - 1] : 0.0);
    out[t] = plus - minus;
  }
  return out;
}

// Nodes whose right-hand side is evaluated: physical end nodes are left to
// the boundary conditions, fringe-backed sides include the edge node.
inline Box rhs_box(const CurvilinearBlock& g) {
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = g.topo.fringe[a][kLow] ? 0 : 1;
    b.hi[a] = g.dims[a] - (g.topo.fringe[a][kHigh] ? 0 : 1);
  }
  return b;
}

inline Box owned_box(const CurvilinearBlock& g) { return Box{{0, 0, 0}, {g.dims[0], g.dims[1], g.dims[2]}}; }

struct RhsWorkspace {
  PrimitiveField prim;
  ViscousFluxField fvisc;
  ConservativeField flux;
  ConservativeField face;
  BlockArray<1> lambda;
  BlockArray<1> sensor;
  ConservativeField rhs;

  RhsWorkspace() = default;
  explicit RhsWorkspace(Extents e)
      : prim(e), fvisc(e), flux(e), face(e), lambda(e), sensor(e), rhs(e) {}
};

// Primitive variables over `box`; a non-positive density or pressure aborts
// with the node's global index.
inline void compute_primitives(const CurvilinearBlock& g, const ConservativeField& q, const FlowConfig& cfg,
                               const Box& box, PrimitiveField& prim, int stage = -1) {
  const double gm1 = cfg.gamma - 1.0;
  const double rgas = cfg.cp - cfg.cv;
  for_each_node(box, [&](int i, int j, int k) {
    const double* c = q.at(i, j, k);
    double* w = prim.at(i, j, k);
    const double rho = c[0];
    if (!(rho > 0.0)) throw InvalidState("non-positive density", g.global_index(i, j, k), stage);
    const double u = c[1] / rho, v = c[2] / rho, ww = c[3] / rho;
    const double p = gm1 * (c[4] - 0.5 * (c[1] * u + c[2] * v + c[3] * ww));
    if (!(p > 0.0)) throw InvalidState("non-positive pressure", g.global_index(i, j, k), stage);
    w[0] = rho;
    w[1] = u;
    w[2] = v;
    w[3] = ww;
    w[4] = p;
    w[5] = p / (rho * rgas);
  });
}

// Contravariant viscous fluxes at the nodes of `box`. Cartesian gradients
// come from the chain rule with the scaled metrics; singular centerline
// nodes (zero Jacobian) carry no viscous flux.
inline void compute_viscous_fluxes(const CurvilinearBlock& g, const PrimitiveField& prim, const FlowConfig& cfg,
                                   const Box& box, ViscousFluxField& fv) {
  std::array<std::ptrdiff_t, 3> s{};
  std::array<bool, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    s[a] = kNprim * prim.stride(a);
    lo[a] = g.topo.fringe[a][kLow];
    hi[a] = g.topo.fringe[a][kHigh];
  }
  const double cp_over_pr = cfg.cp / cfg.prandtl;
  for_each_node(box, [&](int i, int j, int k) {
    double* out = fv.at(i, j, k);
    const double jac = g.jacobian(i, j, k);
    if (jac == 0.0) {
      std::fill(out, out + kNvisc, 0.0);
      return;
    }
    const std::array<int, 3> t{i, j, k};
    const double* w = prim.at(i, j, k);
    const double* m = g.metrics.at(i, j, k);
    // dphi[a][v]: index derivative along a of u, v, w, T
    double dphi[3][4];
    for (int a = 0; a < 3; ++a)
      for (int v = 0; v < 4; ++v) {
        const int comp = v < 3 ? 1 + v : 5;
        dphi[a][v] = axis_difference(w + comp, s[a], t[a], g.dims[a], lo[a], hi[a]);
      }
    // grad[v][d] = ∂phi_v/∂x_d
    double grad[4][3];
    for (int v = 0; v < 4; ++v)
      for (int d = 0; d < 3; ++d)
        grad[v][d] = jac * (m[d] * dphi[0][v] + m[3 + d] * dphi[1][v] + m[6 + d] * dphi[2][v]);

    const double mu = sutherland_viscosity(w[5], cfg);
    const double kappa = mu * cp_over_pr;
    const double div = grad[0][0] + grad[1][1] + grad[2][2];
    const double third = 2.0 / 3.0 * div;
    double tau[3][3];
    tau[0][0] = mu * (2.0 * grad[0][0] - third);
    tau[1][1] = mu * (2.0 * grad[1][1] - third);
    tau[2][2] = mu * (2.0 * grad[2][2] - third);
    tau[0][1] = tau[1][0] = mu * (grad[0][1] + grad[1][0]);
    tau[0][2] = tau[2][0] = mu * (grad[0][2] + grad[2][0]);
    tau[1][2] = tau[2][1] = mu * (grad[1][2] + grad[2][1]);
    // Cartesian flux F_d components: momentum (tau_0d, tau_1d, tau_2d), energy
    double f[3][4];
    for (int d = 0; d < 3; ++d) {
      f[d][0] = tau[0][d];
      f[d][1] = tau[1][d];
      f[d][2] = tau[2][d];
      f[d][3] = tau[0][d] * w[1] + tau[1][d] * w[2] + tau[2][d] * w[3] + kappa * grad[3][d];
    }
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 4; ++c)
        out[4 * a + c] = m[3 * a] * f[0][c] + m[3 * a + 1] * f[1][c] + m[3 * a + 2] * f[2][c];
  });
}

// rhs = J * sum_a delta_a(E_a) - dissipation over the right-hand-side box.
inline void convective_and_dissipation(const CurvilinearBlock& g, const ConservativeField& q, const FlowConfig& cfg,
                                       RhsWorkspace& ws) {
  const Box rb = rhs_box(g);
  for_each_node(rb, [&](int i, int j, int k) { std::fill(ws.rhs.at(i, j, k), ws.rhs.at(i, j, k) + kNcons, 0.0); });
  const double gamma = cfg.gamma;

  for (int a = 0; a < 3; ++a) {
    const int n = g.dims[a];
    const bool phys_lo = !g.topo.fringe[a][kLow];
    const bool phys_hi = !g.topo.fringe[a][kHigh];
    // Node box for flux, spectral radius and sensor: rhs box widened by one along a.
    Box nb = rb;
    nb.lo[a] -= 1;
    nb.hi[a] += 1;
    for_each_node(nb, [&](int i, int j, int k) {
      const double* w = ws.prim.at(i, j, k);
      const double* c = q.at(i, j, k);
      const double* m = g.metrics.at(i, j, k) + 3 * a;
      const double uc = m[0] * w[1] + m[1] * w[2] + m[2] * w[3];
      double* e = ws.flux.at(i, j, k);
      e[0] = c[0] * uc;
      e[1] = c[1] * uc + m[0] * w[4];
      e[2] = c[2] * uc + m[1] * w[4];
      e[3] = c[3] * uc + m[2] * w[4];
      e[4] = (c[4] + w[4]) * uc;
      const double snorm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
      ws.lambda(i, j, k) = std::abs(uc) + std::sqrt(gamma * w[4] / w[0]) * snorm;
      const int t = a == kXi ? i : a == kEta ? j : k;
      if ((phys_lo && t == 0) || (phys_hi && t == n - 1)) {
        ws.sensor(i, j, k) = 0.0;
      } else {
        const std::ptrdiff_t ps = kNprim * ws.prim.stride(a);
        ws.sensor(i, j, k) = pressure_sensor(w[4 - ps], w[4], w[4 + ps]);
      }
    });

    // Faces t + 1/2 for t in [rb.lo - 1, rb.hi - 1].
    Box fb = rb;
    fb.lo[a] -= 1;
    const std::ptrdiff_t qs = kNcons * q.stride(a);
    const std::ptrdiff_t ls = ws.lambda.stride(a);
    for_each_node(fb, [&](int i, int j, int k) {
      const int t = a == kXi ? i : a == kEta ? j : k;
      const double nu0 = ws.sensor(i, j, k);
      const double nu1 = ws.sensor.at(i, j, k)[ls];
      const double eps2 = cfg.k2 * std::max(nu0, nu1);
      const double eps4 = std::max(0.0, cfg.k4 - eps2);
      const double lam = 0.5 * (ws.lambda(i, j, k) + ws.lambda.at(i, j, k)[ls]);
      const bool full = !((phys_lo && t - 1 < 0) || (phys_hi && t + 2 > n - 1));
      const double* c = q.at(i, j, k);
      double* d = ws.face.at(i, j, k);
      for (int v = 0; v < kNcons; ++v) d[v] = dissipation_face_flux(c + v, qs, lam, eps2, eps4, full);
    });

    const std::ptrdiff_t es = kNcons * ws.flux.stride(a);
    for_each_node(rb, [&](int i, int j, int k) {
      const double jac = g.jacobian(i, j, k);
      const double* e = ws.flux.at(i, j, k);
      const double* d = ws.face.at(i, j, k);
      double* r = ws.rhs.at(i, j, k);
      for (int v = 0; v < kNcons; ++v) {
        const double conv = (e[v + es] - e[v - es]) * 0.5;
        const double dis = d[v] - d[v - es];
        r[v] += jac * conv - jac * dis;
      }
    });
  }
}

// rhs -= J * sum_a delta_a(F_a) using viscous fluxes valid one node beyond
// the right-hand-side box along each axis.
inline void subtract_viscous_divergence(const CurvilinearBlock& g, const ViscousFluxField& fv, RhsWorkspace& ws) {
  const Box rb = rhs_box(g);
  std::array<std::ptrdiff_t, 3> s{};
  for (int a = 0; a < 3; ++a) s[a] = kNvisc * fv.stride(a);
  for_each_node(rb, [&](int i, int j, int k) {
    const double jac = g.jacobian(i, j, k);
    const double* f = fv.at(i, j, k);
    double* r = ws.rhs.at(i, j, k);
    for (int c = 0; c < 4; ++c) {
      double div = 0.0;
      for (int a = 0; a < 3; ++a) div += (f[4 * a + c + s[a]] - f[4 * a + c - s[a]]) * 0.5;
      r[1 + c] -= jac * div;
    }
  });
}

// Box one node beyond the owned nodes on fringe-backed sides.
inline Box viscous_box(const CurvilinearBlock& g) { return g.deriv_box(); }

// Full right-hand side for a block whose fringe data is already valid.
inline void assemble_rhs(const CurvilinearBlock& g, const ConservativeField& q, const FlowConfig& cfg,
                         RhsWorkspace& ws, int stage = -1) {
  compute_primitives(g, q, cfg, g.valid_box(), ws.prim, stage);
  compute_viscous_fluxes(g, ws.prim, cfg, viscous_box(g), ws.fvisc);
  convective_and_dissipation(g, q, cfg, ws);
  subtract_viscous_divergence(g, ws.fvisc, ws);
}

// q = q0 - (alpha dt) rhs on the right-hand-side box.
inline void stage_update(const CurvilinearBlock& g, const ConservativeField& q0, const ConservativeField& rhs,
                         double alpha_dt, ConservativeField& q) {
  for_each_node(rhs_box(g), [&](int i, int j, int k) {
    const double* a = q0.at(i, j, k);
    const double* r = rhs.at(i, j, k);
    double* o = q.at(i, j, k);
    for (int v = 0; v < kNcons; ++v) o[v] = a[v] - alpha_dt * r[v];
  });
}

// Fills every fringe of an all-periodic test block by wrapping (no
// superposed plane): index -1 maps to n-1.
template <int N>
void fill_periodic_fringe(BlockArray<N>& f) {
  const Extents e = f.extents();
  auto wrap = [](int t, int n) { return ((t % n) + n) % n; };
  for_each_node(f.allocated(), [&](int i, int j, int k) {
    if (i >= 0 && i < e.nxi && j >= 0 && j < e.neta && k >= 0 && k < e.nzeta) return;
    const double* src = f.at(wrap(i, e.nxi), wrap(j, e.neta), wrap(k, e.nzeta));
    std::copy(src, src + N, f.at(i, j, k));
  });
}

}  // namespace jetles
