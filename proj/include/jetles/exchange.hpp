#pragma once

// Halo exchange between partition blocks: non-blocking post/wait with
// debug-mode freshness checks, the legacy four-step blocking schedule, and
// the rank-ordered centerline reduction.

#include <array>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "jetles/block_array.hpp"
#include "jetles/boundary.hpp"
#include "jetles/comm.hpp"
#include "jetles/grid.hpp"
#include "jetles/partition.hpp"

namespace jetles {

inline constexpr int kTagState = 10;
inline constexpr int kTagViscous = 20;
inline constexpr int kTagCenterlineGather = 100;
inline constexpr int kTagCenterlineScatter = 101;

inline int halo_tag(int base, int axis, int receiver_side) { return base + 2 * axis + receiver_side; }

// Process-wide switch for fringe freshness checks.
inline bool& exchange_debug() {
  static bool on = false;
  return on;
}

// Fails if a fringe along `axis` is still awaiting its receive.
template <int N>
void check_fringe_ready(const BlockArray<N>& f, int axis, const char* where) {
  if (!exchange_debug()) return;
  for (int side = 0; side < 2; ++side)
    if (f.fringe_pending(axis, side)) {
      const std::string msg = std::string("fringe read before wait in ") + where + " (axis " + std::to_string(axis) +
                              ", side " + std::to_string(side) + ")";
      std::cerr << "exchange: " << msg << '\n';
      throw ExchangeFault(msg);
    }
}

struct ExchangeContext {
  Endpoint ep;
  const PartitionMap* map = nullptr;
};

class HaloRequest {
 public:
  HaloRequest() = default;
  explicit HaloRequest(std::function<void()> finish) : finish_(std::move(finish)) {}

  void wait() {
    if (done_) return;
    finish_();
    done_ = true;
  }
  bool done() const { return done_; }

 private:
  std::function<void()> finish_;
  bool done_ = false;
};

inline void wait_halo(std::vector<HaloRequest>& requests) {
  for (auto& r : requests) r.wait();
}

namespace detail {

// Box spanning layers [l0, l1) along `axis` and `cross` on the other axes.
inline Box layer_box(int axis, int l0, int l1, const Box& cross) {
  Box b = cross;
  b.lo[axis] = l0;
  b.hi[axis] = l1;
  return b;
}

template <int N>
std::vector<double> pack(const BlockArray<N>& f, const Box& b) {
  std::vector<double> out;
  for_each_node(b, [&](int i, int j, int k) {
    const double* p = f.at(i, j, k);
    out.insert(out.end(), p, p + N);
  });
  return out;
}

template <int N>
void unpack(BlockArray<N>& f, const Box& b, const std::vector<double>& data) {
  std::size_t expect = 0;
  for_each_node(b, [&](int, int, int) { expect += N; });
  if (data.size() != expect)
    throw ExchangeFault("halo payload of " + std::to_string(data.size()) + " values, expected " +
                        std::to_string(expect));
  std::size_t n = 0;
  for_each_node(b, [&](int i, int j, int k) {
    std::copy(data.data() + n, data.data() + n + N, f.at(i, j, k));
    n += N;
  });
}

// Cross-section carried by an exchange along `axis`: owned extent on the
// other partitioned axis for ξ (ζ fringe not yet current), full valid extent
// on ξ for ζ so that corner values travel with the azimuthal message.
inline Box exchange_cross(const CurvilinearBlock& g, int axis) {
  Box b{{0, g.valid_lo(kEta), 0}, {g.dims.nxi, g.valid_hi(kEta), g.dims.nzeta}};
  if (axis == kZeta) {
    b.lo[kXi] = g.valid_lo(kXi);
    b.hi[kXi] = g.valid_hi(kXi);
  }
  return b;
}

// One directed transfer: layers [src0, src1) of the sender land at
// [dst0, dst0 + src1 - src0) of the receiver.
struct Transfer {
  int peer = kNoNeighbor;
  int src0 = 0, src1 = 0;  // when sending
  int dst0 = 0, dst1 = 0;  // when receiving
  int tag = 0;
};

struct AxisPlan {
  bool local = false;  // single azimuthal partition: wrap by copy
  Transfer send_low, send_high, recv_low, recv_high;
};

inline AxisPlan axis_plan(const CurvilinearBlock& g, const PartitionMap& map, int rank, int axis, int layers,
                          int tag_base) {
  AxisPlan p;
  const NeighborSet nb = map.neighbors(rank);
  const int n = g.dims[axis];
  if (axis == kXi) {
    p.send_low = {nb.west, 0, layers, 0, 0, halo_tag(tag_base, axis, kHigh)};
    p.recv_low = {nb.west, 0, 0, -layers, 0, halo_tag(tag_base, axis, kLow)};
    p.send_high = {nb.east, n - layers, n, 0, 0, halo_tag(tag_base, axis, kLow)};
    p.recv_high = {nb.east, 0, 0, n, n + layers, halo_tag(tag_base, axis, kHigh)};
    return p;
  }
  const int npz = map.npz();
  const int iz = map.iz_of(rank);
  if (npz == 1) {
    p.local = true;
    return p;
  }
  const bool first = iz == 0, last = iz == npz - 1;
  // The first slab also forwards plane 0 onto the superposed plane of the last.
  p.send_low = {nb.zeta_minus, 0, first ? layers + 1 : layers, 0, 0, halo_tag(tag_base, axis, kHigh)};
  p.recv_low = {nb.zeta_minus, 0, 0, -layers, 0, halo_tag(tag_base, axis, kLow)};
  p.send_high = {nb.zeta_plus, last ? n - 1 - layers : n - layers, last ? n - 1 : n, 0, 0,
                 halo_tag(tag_base, axis, kLow)};
  p.recv_high = {nb.zeta_plus, 0, 0, last ? n - 1 : n, n + layers, halo_tag(tag_base, axis, kHigh)};
  return p;
}

template <int N>
void local_wrap(BlockArray<N>& f, const Box& cross, int layers) {
  const int n = f.extents().nzeta;
  const auto head = pack(f, layer_box(kZeta, 0, layers + 1, cross));
  unpack(f, layer_box(kZeta, n - 1, n + layers, cross), head);
  const auto tail = pack(f, layer_box(kZeta, n - 1 - layers, n - 1, cross));
  unpack(f, layer_box(kZeta, -layers, 0, cross), tail);
}

}  // namespace detail

// Starts the exchange of `layers` fringe layers along one axis. Sends are
// issued immediately; receives complete in wait().
template <int N>
std::vector<HaloRequest> post_halo_exchange(const ExchangeContext& ctx, const CurvilinearBlock& g,
                                            BlockArray<N>& f, int axis, int layers, int tag_base) {
  const auto plan = detail::axis_plan(g, *ctx.map, ctx.ep.rank, axis, layers, tag_base);
  const Box cross = detail::exchange_cross(g, axis);
  std::vector<HaloRequest> reqs;
  if (plan.local) {
    detail::local_wrap(f, cross, layers);
    return reqs;
  }
  for (const auto* t : {&plan.send_low, &plan.send_high})
    if (t->peer != kNoNeighbor) ctx.ep.send(t->peer, t->tag, detail::pack(f, detail::layer_box(axis, t->src0, t->src1, cross)));
  const std::array<const detail::Transfer*, 2> recvs{&plan.recv_low, &plan.recv_high};
  for (int side = 0; side < 2; ++side) {
    const detail::Transfer t = *recvs[side];
    if (t.peer == kNoNeighbor) continue;
    f.set_fringe_pending(axis, side, true);
    BlockArray<N>* fp = &f;
    const Endpoint ep = ctx.ep;
    const Box box = detail::layer_box(axis, t.dst0, t.dst1, cross);
    reqs.emplace_back([fp, ep, t, box, axis, side] {
      detail::unpack(*fp, box, ep.recv(t.peer, t.tag));
      fp->set_fringe_pending(axis, side, false);
    });
  }
  return reqs;
}

// ξ exchange completed before the azimuthal one, so corners are current.
template <int N>
void exchange_halo(const ExchangeContext& ctx, const CurvilinearBlock& g, BlockArray<N>& f, int layers, int tag_base) {
  auto rx = post_halo_exchange(ctx, g, f, kXi, layers, tag_base);
  wait_halo(rx);
  auto rz = post_halo_exchange(ctx, g, f, kZeta, layers, tag_base);
  wait_halo(rz);
}

struct LegacyStep {
  bool send = false;
  bool recv = false;
};

// Four-step blocking schedule for position p of P along a line: even
// partitions push forward, then odd ones, then the same backwards. A
// partition receives in the step its sending neighbor is active.
inline std::array<LegacyStep, 4> legacy_schedule(int p, int count, bool periodic) {
  std::array<LegacyStep, 4> s{};
  auto fwd = [&](int q) { return periodic ? (q + 1) % count : q + 1; };
  auto bwd = [&](int q) { return periodic ? (q + count - 1) % count : q - 1; };
  const bool has_fwd = periodic ? count > 1 : p + 1 < count;
  const bool has_bwd = periodic ? count > 1 : p > 0;
  for (int parity = 0; parity < 2; ++parity) {
    s[parity].send = has_fwd && p % 2 == parity;
    s[parity].recv = has_bwd && bwd(p) % 2 == parity;
    s[2 + parity].send = has_bwd && p % 2 == parity;
    s[2 + parity].recv = has_fwd && fwd(p) % 2 == parity;
  }
  return s;
}

// The original blocking exchange along one axis: each message is received
// right after it is posted, in the four-step order above.
template <int N>
void blocking_exchange_legacy(const ExchangeContext& ctx, const CurvilinearBlock& g, BlockArray<N>& f, int axis,
                              int layers, int tag_base) {
  const auto plan = detail::axis_plan(g, *ctx.map, ctx.ep.rank, axis, layers, tag_base);
  const Box cross = detail::exchange_cross(g, axis);
  if (plan.local) {
    detail::local_wrap(f, cross, layers);
    return;
  }
  const PartitionMap& map = *ctx.map;
  const int p = axis == kXi ? map.jx_of(ctx.ep.rank) : map.iz_of(ctx.ep.rank);
  const int count = axis == kXi ? map.npx() : map.npz();
  const auto steps = legacy_schedule(p, count, axis == kZeta);
  auto send = [&](const detail::Transfer& t) {
    ctx.ep.send(t.peer, t.tag, detail::pack(f, detail::layer_box(axis, t.src0, t.src1, cross)));
  };
  auto recv = [&](const detail::Transfer& t) {
    detail::unpack(f, detail::layer_box(axis, t.dst0, t.dst1, cross), ctx.ep.recv(t.peer, t.tag));
  };
  for (int s = 0; s < 4; ++s) {
    const bool forward = s < 2;
    if (steps[s].send) send(forward ? plan.send_high : plan.send_low);
    if (steps[s].recv) recv(forward ? plan.recv_low : plan.recv_high);
  }
}

template <int N>
void exchange_halo_legacy(const ExchangeContext& ctx, const CurvilinearBlock& g, BlockArray<N>& f, int layers,
                          int tag_base) {
  blocking_exchange_legacy(ctx, g, f, kXi, layers, tag_base);
  blocking_exchange_legacy(ctx, g, f, kZeta, layers, tag_base);
}

// Blocking reduction over the azimuthal ring of this rank: the lowest rank
// gathers every segment in rank order, averages sequentially, and scatters.
inline std::vector<double> centerline_reduce(const ExchangeContext& ctx, std::vector<double> ring, int stations) {
  const std::vector<int> members = ctx.map->ring(ctx.ep.rank);
  if (members.size() == 1) return sequential_ring_mean({std::move(ring)}, stations);
  const int master = members.front();
  if (ctx.ep.rank != master) {
    ctx.ep.send(master, kTagCenterlineGather, std::move(ring));
    return ctx.ep.recv(master, kTagCenterlineScatter);
  }
  std::vector<std::vector<double>> segments;
  segments.push_back(std::move(ring));
  for (std::size_t m = 1; m < members.size(); ++m) segments.push_back(ctx.ep.recv(members[m], kTagCenterlineGather));
  auto mean = sequential_ring_mean(segments, stations);
  for (std::size_t m = 1; m < members.size(); ++m) ctx.ep.send(members[m], kTagCenterlineScatter, mean);
  return mean;
}

inline CenterlineReducer ring_reducer(const ExchangeContext& ctx) {
  return [ctx](std::vector<double> ring, int stations) { return centerline_reduce(ctx, std::move(ring), stations); };
}

}  // namespace jetles
