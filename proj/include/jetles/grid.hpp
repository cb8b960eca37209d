#pragma once

// Structured curvilinear grid blocks: cylindrical jet-domain generation,
// Cartesian test boxes, and metric/Jacobian evaluation.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "jetles/block_array.hpp"
#include "jetles/error.hpp"

namespace jetles {

// Which sides of a block carry valid ghost data, plus the two geometric
// features of the jet domain.
struct BlockTopology {
  std::array<std::array<bool, 2>, 3> fringe{};  // [axis][side]
  bool axis_at_eta0 = false;     // global η = 0 row lies on the centerline
  bool superposed_zeta = false;  // global last ζ plane duplicates the first

  bool has_fringe(int axis, int side) const { return fringe[axis][side]; }
};

// Geometry of one structured block. Metrics are stored scaled by the inverse
// Jacobian: component 3*a + d of `metrics` holds (∂ξ_a/∂x_d) / J, which stays
// finite on the centerline where the Jacobian itself is singular.
struct CurvilinearBlock {
  Extents dims;         // interior extents of this block
  Extents global_dims;  // extents of the whole grid
  std::array<int, 3> global_offset{};
  BlockTopology topo;
  BlockArray<3> coords;
  BlockArray<9> metrics;
  BlockArray<1> jacobian;  // J = 1 / volume; 0 marks a singular axis node
  BlockArray<1> volume;
  bool has_metrics = false;

  std::size_t node_count() const { return dims.nodes(); }

  // Local index range holding valid data (interior plus usable fringe).
  int valid_lo(int axis) const { return topo.fringe[axis][kLow] ? -kFringe : 0; }
  int valid_hi(int axis) const { return dims[axis] + (topo.fringe[axis][kHigh] ? kFringe : 0); }
  // Local index range where a derivative along `axis` can be formed.
  int deriv_lo(int axis) const { return topo.fringe[axis][kLow] ? -1 : 0; }
  int deriv_hi(int axis) const { return dims[axis] + (topo.fringe[axis][kHigh] ? 1 : 0); }

  Box valid_box() const {
    return Box{{valid_lo(0), valid_lo(1), valid_lo(2)}, {valid_hi(0), valid_hi(1), valid_hi(2)}};
  }
  Box deriv_box() const {
    return Box{{deriv_lo(0), deriv_lo(1), deriv_lo(2)}, {deriv_hi(0), deriv_hi(1), deriv_hi(2)}};
  }

  bool singular(int i, int j, int k) const { return jacobian(i, j, k) == 0.0; }

  // Unscaled metric derivative ∂ξ_a/∂x_d.
  double metric(int i, int j, int k, int a, int d) const {
    return jacobian(i, j, k) * metrics(i, j, k, 3 * a + d);
  }

  std::array<int, 3> global_index(int i, int j, int k) const {
    return {i + global_offset[0], j + global_offset[1], k + global_offset[2]};
  }
};

// Second-order difference along one axis at local index t: centered where
// both neighbors exist, one-sided at a physical block end.
inline double axis_difference(const double* f, std::ptrdiff_t s, int t, int n, bool lo_fringe,
                              bool hi_fringe) {
  if (t == 0 && !lo_fringe) return (-3.0 * f[0] + 4.0 * f[s] - f[2 * s]) * 0.5;
  if (t == n - 1 && !hi_fringe) return (3.0 * f[0] - 4.0 * f[-s] + f[-2 * s]) * 0.5;
  return (f[s] - f[-s]) * 0.5;
}

struct MeshSpec {
  int id = 0;
  Extents dims;
};

// The scalability grid family: 360 azimuthal intervals plus the superposed plane.
inline const std::vector<MeshSpec>& scalability_meshes() {
  static const std::vector<MeshSpec> meshes = {
      {1, {32, 32, 361}},       {2, {64, 32, 361}},      {3, {64, 64, 361}},
      {4, {128, 64, 361}},      {5, {128, 128, 361}},    {6, {256, 128, 361}},
      {7, {256, 256, 361}},     {8, {512, 256, 361}},    {9, {512, 512, 361}},
      {10, {1024, 512, 361}},   {11, {1024, 1024, 361}}, {12, {2048, 1024, 361}},
      {13, {1700, 1700, 361}},
  };
  return meshes;
}

// Parses "NXIxNETAxNZETA".
inline Extents parse_mesh_spec(const std::string& text) {
  Extents e;
  char x1 = 0, x2 = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c%d%n", &e.nxi, &x1, &e.neta, &x2, &e.nzeta, &consumed) != 5 ||
      (x1 != 'x' && x1 != 'X') || (x2 != 'x' && x2 != 'X') ||
      consumed != static_cast<int>(text.size()))
    throw ConfigError("mesh spec must look like 32x32x37, got '" + text + "'");
  return e;
}

inline std::string format_mesh_spec(const Extents& e) {
  return std::to_string(e.nxi) + "x" + std::to_string(e.neta) + "x" + std::to_string(e.nzeta);
}

// Maps a (possibly out-of-range) global ζ index onto the stored planes of a
// periodic direction closed by a superposed plane.
inline int wrap_superposed(int gk, int nzeta) {
  const int period = nzeta - 1;
  while (gk < 0) gk += period;
  while (gk >= nzeta) gk -= period;
  return gk;
}

// Cylindrical block: ξ axial on [0, length], η radial on [r_inner, r_outer],
// ζ azimuthal on [0, 2π] with the last plane superposed on the first. The ζ
// fringe is filled by periodic wrap.
inline CurvilinearBlock make_cylindrical_block(int nxi, int neta, int nzeta, double length,
                                               double r_inner, double r_outer) {
  if (nxi < 4 || neta < 4 || nzeta < 4)
    throw ConfigError("grid counts must be at least 4 in every direction");
  if (!(length > 0.0) || !(r_outer > r_inner) || r_inner < 0.0)
    throw ConfigError("grid length and radial extent must be positive");

  CurvilinearBlock b;
  b.dims = {nxi, neta, nzeta};
  b.global_dims = b.dims;
  b.topo.fringe[kZeta] = {true, true};
  b.topo.superposed_zeta = true;
  b.topo.axis_at_eta0 = (r_inner == 0.0);
  b.coords = BlockArray<3>(b.dims);

  const double two_pi = 2.0 * std::numbers::pi;
  for (int k = 0; k < nzeta - 1; ++k) {
    const double theta = two_pi * static_cast<double>(k) / static_cast<double>(nzeta - 1);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int j = 0; j < neta; ++j) {
      const double r = r_inner + (r_outer - r_inner) * (static_cast<double>(j) / (neta - 1));
      for (int i = 0; i < nxi; ++i) {
        double* p = b.coords.at(i, j, k);
        p[0] = length * (static_cast<double>(i) / (nxi - 1));
        p[1] = r * c;
        p[2] = r * s;
      }
    }
  }
  const int period = nzeta - 1;
  for (int k = -kFringe; k < nzeta + kFringe; ++k) {
    if (k >= 0 && k < period) continue;
    const int src_k = (k % period + period) % period;
    for (int j = 0; j < neta; ++j)
      for (int i = 0; i < nxi; ++i) {
        const double* src = b.coords.at(i, j, src_k);
        std::copy(src, src + 3, b.coords.at(i, j, k));
      }
  }
  return b;
}

// Jet domain: full cylinder of the given length and height (outer radius).
inline CurvilinearBlock generate_jet_grid(int nxi, int neta, int nzeta, double length, double height) {
  if (nxi < 4 || neta < 4 || nzeta < 4)
    throw ConfigError("jet grid counts must be at least 4 (stencil width)");
  if (!(length > 0.0) || !(height > 0.0)) throw ConfigError("jet grid length and height must be positive");
  return make_cylindrical_block(nxi, neta, nzeta, length, 0.0, height);
}

using CoordinateMap = std::function<std::array<double, 3>(double, double, double)>;

// Box of the given extents whose node (i, j, k) sits at map(i, j, k). Axes
// flagged periodic get a fringe evaluated from the same map, so a periodic
// map must itself continue across the fringe.
inline CurvilinearBlock make_box_block(Extents dims, const CoordinateMap& map,
                                       std::array<bool, 3> periodic = {false, false, false}) {
  CurvilinearBlock b;
  b.dims = dims;
  b.global_dims = dims;
  for (int a = 0; a < 3; ++a) b.topo.fringe[a] = {periodic[a], periodic[a]};
  b.coords = BlockArray<3>(dims);
  for_each_node(b.valid_box(), [&](int i, int j, int k) {
    const auto x = map(i, j, k);
    double* p = b.coords.at(i, j, k);
    p[0] = x[0];
    p[1] = x[1];
    p[2] = x[2];
  });
  return b;
}

inline CurvilinearBlock make_uniform_box(Extents dims, double spacing,
                                         std::array<bool, 3> periodic = {false, false, false}) {
  return make_box_block(
      dims, [spacing](double i, double j, double k) { return std::array<double, 3>{spacing * i, spacing * j, spacing * k}; },
      periodic);
}

namespace detail {

// Derivative of a 3-component node array along `axis` over `box`.
inline void differentiate(const CurvilinearBlock& b, const BlockArray<3>& f, int axis, const Box& box,
                          BlockArray<3>& out) {
  const std::ptrdiff_t s = 3 * f.stride(axis);
  const int n = b.dims[axis];
  const bool lo = b.topo.fringe[axis][kLow];
  const bool hi = b.topo.fringe[axis][kHigh];
  for_each_node(box, [&](int i, int j, int k) {
    const int t = axis == kXi ? i : axis == kEta ? j : k;
    const double* p = f.at(i, j, k);
    double* o = out.at(i, j, k);
    for (int c = 0; c < 3; ++c) o[c] = axis_difference(p + c, s, t, n, lo, hi);
  });
}

}  // namespace detail

// Fills metrics, volume, and Jacobian. The scaled metrics use the symmetric
// conservative form (x_d1 derivative times x_d2, then differenced again), so
// the discrete metric identities hold to round-off with the same stencil the
// fluxes use. Nodes on a collapsed centerline get a zero Jacobian; any other
// non-positive volume is reported as a degenerate cell.
inline void compute_metrics(CurvilinearBlock& b) {
  for (int a = 0; a < 3; ++a) {
    const int lo = b.deriv_lo(a), hi = b.deriv_hi(a);
    const bool one_sided_lo = !b.topo.fringe[a][kLow];
    const bool one_sided_hi = !b.topo.fringe[a][kHigh];
    if (hi - lo < 3 && (one_sided_lo || one_sided_hi))
      throw ConfigError("block too thin for metric evaluation along axis " + std::to_string(a));
  }

  const Box valid = b.valid_box();
  std::array<BlockArray<3>, 3> d{BlockArray<3>(b.dims), BlockArray<3>(b.dims), BlockArray<3>(b.dims)};
  std::array<BlockArray<3>, 3> prod{BlockArray<3>(b.dims), BlockArray<3>(b.dims), BlockArray<3>(b.dims)};
  for (int axis = 0; axis < 3; ++axis) {
    Box box = valid;
    box.lo[axis] = b.deriv_lo(axis);
    box.hi[axis] = b.deriv_hi(axis);
    detail::differentiate(b, b.coords, axis, box, d[axis]);
    // prod[axis][dd] = ∂x_{dd+1}/∂axis * x_{dd+2}
    for_each_node(box, [&](int i, int j, int k) {
      const double* dx = d[axis].at(i, j, k);
      const double* x = b.coords.at(i, j, k);
      double* p = prod[axis].at(i, j, k);
      for (int dd = 0; dd < 3; ++dd) p[dd] = dx[(dd + 1) % 3] * x[(dd + 2) % 3];
    });
  }

  b.metrics = BlockArray<9>(b.dims);
  b.volume = BlockArray<1>(b.dims);
  b.jacobian = BlockArray<1>(b.dims);

  // S_a,d = δ_{a2}(prod[a1][d]) - δ_{a1}(prod[a2][d]), (a, a1, a2) cyclic.
  for (int a = 0; a < 3; ++a) {
    const int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
    Box box = b.deriv_box();
    box.lo[a] = b.valid_lo(a);
    box.hi[a] = b.valid_hi(a);
    const std::ptrdiff_t s1 = 3 * prod[a1].stride(a2);
    const std::ptrdiff_t s2 = 3 * prod[a2].stride(a1);
    for_each_node(box, [&](int i, int j, int k) {
      const std::array<int, 3> t{i, j, k};
      const double* p1 = prod[a1].at(i, j, k);
      const double* p2 = prod[a2].at(i, j, k);
      double* m = b.metrics.at(i, j, k);
      for (int dd = 0; dd < 3; ++dd) {
        const double first = axis_difference(p1 + dd, s1, t[a2], b.dims[a2], b.topo.fringe[a2][kLow],
                                             b.topo.fringe[a2][kHigh]);
        const double second = axis_difference(p2 + dd, s2, t[a1], b.dims[a1], b.topo.fringe[a1][kLow],
                                              b.topo.fringe[a1][kHigh]);
        m[3 * a + dd] = first - second;
      }
    });
  }

  for_each_node(b.deriv_box(), [&](int i, int j, int k) {
    const double* dx = d[kXi].at(i, j, k);
    const double* de = d[kEta].at(i, j, k);
    const double* dz = d[kZeta].at(i, j, k);
    const double v = dx[0] * (de[1] * dz[2] - dz[1] * de[2]) - de[0] * (dx[1] * dz[2] - dz[1] * dx[2]) +
                     dz[0] * (dx[1] * de[2] - de[1] * dx[2]);
    b.volume(i, j, k) = v;
    const int gj = j + b.global_offset[1];
    if (v > 0.0) {
      b.jacobian(i, j, k) = 1.0 / v;
    } else if (v == 0.0 && b.topo.axis_at_eta0 && gj == 0) {
      b.jacobian(i, j, k) = 0.0;
    } else {
      throw DegenerateCell(b.global_index(i, j, k), v);
    }
  });
  b.has_metrics = true;
}

}  // namespace jetles
