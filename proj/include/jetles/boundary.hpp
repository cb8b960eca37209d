#pragma once

// Boundary treatments of the jet domain: flat-hat supersonic inlet,
// Riemann-invariant far field (lateral and outflow), centerline averaging,
// and azimuthal periodicity bookkeeping.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "jetles/grid.hpp"
#include "jetles/numerics.hpp"
#include "jetles/physics.hpp"

namespace jetles {

enum class FaceKind { interior, inlet, farfield, centerline, periodic };

struct BoundarySet {
  PrimitiveState inlet_state;
  PrimitiveState freestream_state;
  double jet_radius = 0.5;
  std::array<std::array<FaceKind, 2>, 3> faces{};  // [axis][side]
};

inline PrimitiveState freestream_state(const FlowConfig& cfg) {
  return make_primitive(1.0, {0.0, 0.0, 0.0}, cfg.gas_constant(), cfg);
}

// Jet exit state: temperature TR, pressure PR times ambient, velocity from
// the jet Mach number at the jet temperature.
inline PrimitiveState jet_state(const FlowConfig& cfg) {
  const double r = cfg.gas_constant();
  const double t = cfg.temperature_ratio;
  const double p = cfg.pressure_ratio * r;
  const double rho = p / (r * t);
  const double u = cfg.mach_jet * std::sqrt(cfg.gamma * r * t);
  return PrimitiveState{rho, {u, 0.0, 0.0}, p, t};
}

// Face assignment of one block of the jet grid: global faces get their
// physical condition, partition cuts are interior.
inline BoundarySet make_jet_boundaries(const FlowConfig& cfg, const CurvilinearBlock& g) {
  BoundarySet b;
  b.inlet_state = jet_state(cfg);
  b.freestream_state = freestream_state(cfg);
  const bool first_xi = g.global_offset[0] == 0;
  const bool last_xi = g.global_offset[0] + g.dims.nxi == g.global_dims.nxi;
  const bool first_zeta = g.global_offset[2] == 0;
  const bool last_zeta = g.global_offset[2] + g.dims.nzeta == g.global_dims.nzeta;
  b.faces[kXi] = {first_xi ? FaceKind::inlet : FaceKind::interior, last_xi ? FaceKind::farfield : FaceKind::interior};
  b.faces[kEta] = {FaceKind::centerline, FaceKind::farfield};
  b.faces[kZeta] = {first_zeta ? FaceKind::periodic : FaceKind::interior,
                    last_zeta ? FaceKind::periodic : FaceKind::interior};
  return b;
}

inline double riemann_plus(double un, double c, double gamma) { return un + 2.0 * c / (gamma - 1.0); }
inline double riemann_minus(double un, double c, double gamma) { return un - 2.0 * c / (gamma - 1.0); }

// One-dimensional characteristic state along the outward unit normal n.
// Incoming invariants come from the free stream, outgoing ones from the
// interior; entropy and tangential velocity come from the upwind side.
// Written as corrections to the upwind state so that a matching state is an
// exact fixed point.
inline Conservative farfield_riemann(const PrimitiveState& in, const PrimitiveState& inf, const Vec3& n,
                                     const FlowConfig& cfg) {
  const double g = cfg.gamma;
  const double gm1 = g - 1.0;
  const double un_i = in.u[0] * n[0] + in.u[1] * n[1] + in.u[2] * n[2];
  const double c_i = std::sqrt(g * in.p / in.rho);

  if (un_i <= -c_i) return to_conservative(inf, cfg);
  if (un_i >= c_i) return to_conservative(in, cfg);

  const double un_f = inf.u[0] * n[0] + inf.u[1] * n[1] + inf.u[2] * n[2];
  const double c_f = std::sqrt(g * inf.p / inf.rho);
  const PrimitiveState& up = un_i <= 0.0 ? inf : in;
  double dr = 0.0, c_up = 0.0, c_b = 0.0;
  if (un_i <= 0.0) {
    dr = riemann_plus(un_i, c_i, g) - riemann_plus(un_f, c_f, g);
    if (dr == 0.0) return to_conservative(inf, cfg);
    c_up = c_f;
    c_b = c_f + 0.25 * gm1 * dr;
  } else {
    dr = riemann_minus(un_f, c_f, g) - riemann_minus(un_i, c_i, g);
    if (dr == 0.0) return to_conservative(in, cfg);
    c_up = c_i;
    c_b = c_i - 0.25 * gm1 * dr;
  }
  const double dun = 0.5 * dr;
  const double ratio = c_b / c_up;
  PrimitiveState b;
  b.rho = up.rho * std::pow(ratio, 2.0 / gm1);
  b.p = up.p * std::pow(ratio, 2.0 * g / gm1);
  for (int d = 0; d < 3; ++d) b.u[d] = up.u[d] + dun * n[d];
  b.t = b.p / (b.rho * cfg.gas_constant());
  return to_conservative(b, cfg);
}

namespace detail {

inline PrimitiveState node_primitive(const ConservativeField& q, int i, int j, int k, const FlowConfig& cfg) {
  const double* c = q.at(i, j, k);
  return to_primitive(Conservative{c[0], c[1], c[2], c[3], c[4]}, cfg);
}

// Outward unit normal from the metric row; a collapsed row on the centerline
// borrows the row of the next η node.
inline Vec3 unit_metric_row(const CurvilinearBlock& g, int i, int j, int k, int axis, double sign) {
  const double* m = g.metrics.at(i, j, k) + 3 * axis;
  double s = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  if (s == 0.0 && j + 1 < g.dims.neta) {
    m = g.metrics.at(i, j + 1, k) + 3 * axis;
    s = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  }
  return {sign * m[0] / s, sign * m[1] / s, sign * m[2] / s};
}

inline void store(ConservativeField& q, int i, int j, int k, const Conservative& v) {
  std::copy(v.begin(), v.end(), q.at(i, j, k));
}

// Local index of global plane `gi` along xi if it lies in the valid range.
inline bool local_xi(const CurvilinearBlock& g, int gi, int& li) {
  li = gi - g.global_offset[0];
  return li >= g.valid_lo(kXi) && li < g.valid_hi(kXi);
}

}  // namespace detail

// Lateral far field on the outermost η row, then the outflow plane. Both
// are also evaluated on fringe copies so every partition holding a boundary
// node computes it from the same inputs.
inline void apply_farfield_riemann(const CurvilinearBlock& g, ConservativeField& q, const BoundarySet& bset,
                                   const FlowConfig& cfg) {
  if (bset.faces[kEta][kHigh] == FaceKind::farfield) {
    const int j = g.dims.neta - 1;
    for (int k = g.deriv_lo(kZeta); k < g.deriv_hi(kZeta); ++k)
      for (int i = g.deriv_lo(kXi); i < g.deriv_hi(kXi); ++i) {
        const auto in = detail::node_primitive(q, i, j - 1, k, cfg);
        const auto n = detail::unit_metric_row(g, i, j, k, kEta, 1.0);
        detail::store(q, i, j, k, farfield_riemann(in, bset.freestream_state, n, cfg));
      }
  }
  int li = 0;
  if (detail::local_xi(g, g.global_dims.nxi - 1, li)) {
    for (int k = g.deriv_lo(kZeta); k < g.deriv_hi(kZeta); ++k)
      for (int j = 0; j < g.dims.neta; ++j) {
        const auto in = detail::node_primitive(q, li - 1, j, k, cfg);
        const auto n = detail::unit_metric_row(g, li, j, k, kXi, 1.0);
        detail::store(q, li, j, k, farfield_riemann(in, bset.freestream_state, n, cfg));
      }
  }
}

// Flat-hat jet on the entrance plane for r <= jet_radius, far-field rule
// elsewhere on that plane.
inline void apply_jet_inlet(const CurvilinearBlock& g, ConservativeField& q, const BoundarySet& bset,
                            const FlowConfig& cfg) {
  int li = 0;
  if (!detail::local_xi(g, 0, li)) return;
  const Conservative jet = to_conservative(bset.inlet_state, cfg);
  for (int k = g.deriv_lo(kZeta); k < g.deriv_hi(kZeta); ++k)
    for (int j = 0; j < g.dims.neta; ++j) {
      const double* x = g.coords.at(li, j, k);
      if (std::hypot(x[1], x[2]) <= bset.jet_radius) {
        detail::store(q, li, j, k, jet);
      } else {
        const auto in = detail::node_primitive(q, li + 1, j, k, cfg);
        const auto n = detail::unit_metric_row(g, li, j, k, kXi, -1.0);
        detail::store(q, li, j, k, farfield_riemann(in, bset.freestream_state, n, cfg));
      }
    }
}

// Local ξ stations whose centerline nodes are averaged: owned stations plus
// one fringe station per fringe side, excluding the inlet and outflow planes.
struct CenterlineSpan {
  int lo = 0;
  int hi = 0;
  int stations() const { return hi > lo ? hi - lo : 0; }
};

inline CenterlineSpan centerline_span(const CurvilinearBlock& g) {
  const int lo = g.deriv_lo(kXi), hi = g.deriv_hi(kXi);
  const int glo = 1 - g.global_offset[0];
  const int ghi = g.global_dims.nxi - 1 - g.global_offset[0];
  return {std::max(lo, glo), std::min(hi, ghi)};
}

// Number of unique azimuthal planes owned by a block (the superposed plane
// duplicates plane 0 and is excluded).
inline int unique_zeta_planes(const CurvilinearBlock& g) {
  const bool owns_last = g.global_offset[2] + g.dims.nzeta == g.global_dims.nzeta;
  return g.dims.nzeta - (g.topo.superposed_zeta && owns_last ? 1 : 0);
}

// Ring values adjacent to the centerline, laid out [station][plane][component].
inline std::vector<double> pack_centerline_ring(const CurvilinearBlock& g, const ConservativeField& q,
                                                const CenterlineSpan& span) {
  const int planes = unique_zeta_planes(g);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(span.stations()) * planes * kNcons);
  for (int i = span.lo; i < span.hi; ++i)
    for (int k = 0; k < planes; ++k) {
      const double* c = q.at(i, 1, k);
      out.insert(out.end(), c, c + kNcons);
    }
  return out;
}

// Strictly sequential mean over concatenated segments, in the given order.
// Each segment is [station][plane][component] with its own plane count.
inline std::vector<double> sequential_ring_mean(const std::vector<std::vector<double>>& segments, int stations) {
  std::vector<double> mean(static_cast<std::size_t>(stations) * kNcons, 0.0);
  std::size_t total_planes = 0;
  std::vector<int> planes(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    planes[s] = stations > 0 ? static_cast<int>(segments[s].size() / (static_cast<std::size_t>(stations) * kNcons)) : 0;
    total_planes += planes[s];
  }
  if (total_planes == 0) return mean;
  for (int st = 0; st < stations; ++st)
    for (int c = 0; c < kNcons; ++c) {
      double acc = 0.0;
      bool first = true;
      for (std::size_t s = 0; s < segments.size(); ++s) {
        const double* seg = segments[s].data() + static_cast<std::size_t>(st) * planes[s] * kNcons;
        for (int k = 0; k < planes[s]; ++k) {
          const double v = seg[k * kNcons + c];
          acc = first ? v : acc + v;
          first = false;
        }
      }
      mean[st * kNcons + c] = acc / static_cast<double>(total_planes);
    }
  return mean;
}

// Writes the averaged values onto every stored centerline node of the span.
inline void unpack_centerline(const CurvilinearBlock& g, ConservativeField& q, const CenterlineSpan& span,
                              const std::vector<double>& mean) {
  for (int i = span.lo; i < span.hi; ++i) {
    const double* m = mean.data() + static_cast<std::size_t>(i - span.lo) * kNcons;
    for (int k = g.valid_lo(kZeta); k < g.valid_hi(kZeta); ++k) std::copy(m, m + kNcons, q.at(i, 0, k));
  }
}

// Ring reduction hook: receives this block's packed ring and returns the
// global mean per station.
using CenterlineReducer = std::function<std::vector<double>(std::vector<double> ring, int stations)>;

inline CenterlineReducer local_centerline_reducer() {
  return [](std::vector<double> ring, int stations) {
    return sequential_ring_mean({std::move(ring)}, stations);
  };
}

inline void apply_centerline(const CurvilinearBlock& g, ConservativeField& q, const BoundarySet& bset,
                             const CenterlineReducer& reduce) {
  if (bset.faces[kEta][kLow] != FaceKind::centerline) return;
  const CenterlineSpan span = centerline_span(g);
  auto mean = reduce(pack_centerline_ring(g, q, span), span.stations());
  unpack_centerline(g, q, span, mean);
}

// Single-block azimuthal closure: superposed plane copied from plane 0, then
// the fringe wrapped from the unique planes. Partitioned runs get the same
// result from the exchange.
template <int N>
void apply_periodic(BlockArray<N>& f, int layers = kFringe) {
  const Extents e = f.extents();
  const int n = e.nzeta;
  auto copy_plane = [&](int from, int to) {
    for (int j = -kFringe; j < e.neta + kFringe; ++j)
      for (int i = -kFringe; i < e.nxi + kFringe; ++i) {
        const double* src = f.at(i, j, from);
        std::copy(src, src + N, f.at(i, j, to));
      }
  };
  for (int l = 0; l <= layers; ++l) copy_plane(l, n - 1 + l);
  for (int l = 1; l <= layers; ++l) copy_plane(n - 1 - l, -l);
}

// Full boundary sequence for one block, in the fixed order used by every
// partition: lateral far field, outflow, inlet, centerline.
inline void apply_boundaries(const CurvilinearBlock& g, ConservativeField& q, const BoundarySet& bset,
                             const FlowConfig& cfg, const CenterlineReducer& reduce) {
  apply_farfield_riemann(g, q, bset, cfg);
  apply_jet_inlet(g, q, bset, cfg);
  apply_centerline(g, q, bset, reduce);
}

}  // namespace jetles
