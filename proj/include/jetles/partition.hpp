#pragma once

// Two-dimensional axial/azimuthal decomposition of the jet grid: balanced
// extents, matrix rank mapping, neighbor table, ghost accounting, and the
// extraction of per-rank grid blocks.

#include <algorithm>
#include <string>
#include <vector>

#include "jetles/block_array.hpp"
#include "jetles/error.hpp"
#include "jetles/grid.hpp"

namespace jetles {

inline constexpr int kNoNeighbor = -1;

// Lowest-indexed parts take the remainder.
inline std::vector<int> balance_axis(int total, int parts) {
  if (parts < 1) throw PartitionError("partition count must be at least 1");
  if (total < parts)
    throw PartitionError("cannot split " + std::to_string(total) + " points into " + std::to_string(parts) +
                         " partitions");
  const int base = total / parts, extra = total % parts;
  std::vector<int> counts(parts, base);
  for (int p = 0; p < extra; ++p) ++counts[p];
  return counts;
}

struct PartitionRange {
  int xi_begin = 0, xi_end = 0;
  int zeta_begin = 0, zeta_end = 0;
  int nxi() const { return xi_end - xi_begin; }
  int nzeta() const { return zeta_end - zeta_begin; }
};

struct NeighborSet {
  int west = kNoNeighbor;
  int east = kNoNeighbor;
  int zeta_minus = kNoNeighbor;
  int zeta_plus = kNoNeighbor;
};

class PartitionMap {
 public:
  PartitionMap() = default;
  PartitionMap(int nxi, int nzeta, int npx, int npz)
      : nxi_(nxi), nzeta_(nzeta), npx_(npx), npz_(npz),
        xi_counts_(balance_axis(nxi, npx)), zeta_counts_(balance_axis(nzeta, npz)) {
    xi_starts_.assign(npx + 1, 0);
    zeta_starts_.assign(npz + 1, 0);
    for (int p = 0; p < npx; ++p) xi_starts_[p + 1] = xi_starts_[p] + xi_counts_[p];
    for (int p = 0; p < npz; ++p) zeta_starts_[p + 1] = zeta_starts_[p] + zeta_counts_[p];
  }

  int npx() const { return npx_; }
  int npz() const { return npz_; }
  int nxi() const { return nxi_; }
  int nzeta() const { return nzeta_; }
  int size() const { return npx_ * npz_; }
  const std::vector<int>& xi_counts() const { return xi_counts_; }
  const std::vector<int>& zeta_counts() const { return zeta_counts_; }

  // Matrix mapping: azimuthal index iz varies fastest.
  int rank(int iz, int jx) const { return jx * npz_ + iz; }
  int iz_of(int rank) const { return rank % npz_; }
  int jx_of(int rank) const { return rank / npz_; }

  PartitionRange range(int rank) const {
    check(rank);
    const int iz = iz_of(rank), jx = jx_of(rank);
    return {xi_starts_[jx], xi_starts_[jx + 1], zeta_starts_[iz], zeta_starts_[iz + 1]};
  }

  NeighborSet neighbors(int rank) const {
    check(rank);
    const int iz = iz_of(rank), jx = jx_of(rank);
    NeighborSet n;
    n.west = jx > 0 ? this->rank(iz, jx - 1) : kNoNeighbor;
    n.east = jx < npx_ - 1 ? this->rank(iz, jx + 1) : kNoNeighbor;
    n.zeta_minus = this->rank((iz + npz_ - 1) % npz_, jx);
    n.zeta_plus = this->rank((iz + 1) % npz_, jx);
    return n;
  }

  // Ranks sharing an axial slab, in ascending order.
  std::vector<int> ring(int rank) const {
    std::vector<int> r;
    const int jx = jx_of(rank);
    for (int iz = 0; iz < npz_; ++iz) r.push_back(this->rank(iz, jx));
    return r;
  }

 private:
  void check(int rank) const {
    if (rank < 0 || rank >= size()) throw PartitionError("rank " + std::to_string(rank) + " outside the map");
  }

  int nxi_ = 0, nzeta_ = 0, npx_ = 0, npz_ = 0;
  std::vector<int> xi_counts_, zeta_counts_, xi_starts_, zeta_starts_;
};

// Empty when feasible, otherwise the reason. Every axial slab needs the two
// fringe layers it sends; every azimuthal slab additionally carries the
// superposed plane it may forward, so needs three planes.
inline std::string infeasibility(int nxi, int nzeta, int npx, int npz) {
  if (npx < 1 || npz < 1) return "partition counts must be positive";
  if (npz > nzeta - 1) return "more azimuthal partitions than unique azimuthal points";
  if (nxi / npx < kFringe) return "axial partitions would hold fewer than " + std::to_string(kFringe) + " planes";
  if (nzeta / npz < kFringe + 1)
    return "azimuthal partitions would hold fewer than " + std::to_string(kFringe + 1) + " planes";
  return {};
}

inline bool feasible(int nxi, int nzeta, int npx, int npz) { return infeasibility(nxi, nzeta, npx, npz).empty(); }

inline PartitionMap build_map(int nxi, int nzeta, int npx, int npz) {
  const std::string why = infeasibility(nxi, nzeta, npx, npz);
  if (!why.empty())
    throw PartitionError("infeasible decomposition " + std::to_string(npx) + "x" + std::to_string(npz) + " of " +
                         std::to_string(nxi) + "x" + std::to_string(nzeta) + ": " + why);
  return PartitionMap(nxi, nzeta, npx, npz);
}

// Fringe nodes summed over partitions, as a percentage of the global node
// count. Each side with a neighbor holds two layers spanning the other two
// extents; azimuthal sides always have one, axial ends never do.
inline double ghost_ratio(const Extents& mesh, int npx, int npz) {
  const PartitionMap map = build_map(mesh.nxi, mesh.nzeta, npx, npz);
  double ghosts = 0.0;
  for (int r = 0; r < map.size(); ++r) {
    const PartitionRange pr = map.range(r);
    const NeighborSet nb = map.neighbors(r);
    const double xi_face = static_cast<double>(pr.nzeta()) * mesh.neta;
    const double zeta_face = static_cast<double>(pr.nxi()) * mesh.neta;
    if (nb.west != kNoNeighbor) ghosts += kFringe * xi_face;
    if (nb.east != kNoNeighbor) ghosts += kFringe * xi_face;
    ghosts += 2.0 * kFringe * zeta_face;
  }
  return 100.0 * ghosts / static_cast<double>(mesh.nodes());
}

struct CoreConfig {
  int cores = 0;
  int npz = 0;
  int npx() const { return cores / npz; }
};

// Core counts and azimuthal partition counts of the scalability campaign.
inline const std::vector<CoreConfig>& scalability_configs() {
  static const std::vector<CoreConfig> configs = [] {
    const std::vector<std::pair<int, std::vector<int>>> table = {
        {2, {1, 2}},          {4, {1, 2, 4}},        {8, {1, 2, 4, 8}},   {16, {1, 2, 4, 8, 16}},
        {32, {1, 2, 4, 8, 16, 32}}, {64, {2, 4, 8, 16, 32}}, {128, {2, 4, 8, 16, 32}},
        {256, {4, 8, 16, 32}},  {512, {4, 8, 16, 32}}, {1024, {8, 16, 32}}, {2048, {8, 16, 32}},
        {3072, {24, 48, 96}},
    };
    std::vector<CoreConfig> out;
    for (const auto& [cores, npzs] : table)
      for (int npz : npzs) out.push_back({cores, npz});
    return out;
  }();
  return configs;
}

// Topology and geometry of one rank's block, cut from the global grid with
// its fringe coordinates. Metrics are left for the caller.
inline CurvilinearBlock extract_partition(const CurvilinearBlock& global, const PartitionMap& map, int rank) {
  const PartitionRange pr = map.range(rank);
  const NeighborSet nb = map.neighbors(rank);
  CurvilinearBlock b;
  b.dims = {pr.nxi(), global.dims.neta, pr.nzeta()};
  b.global_dims = global.dims;
  b.global_offset = {pr.xi_begin, 0, pr.zeta_begin};
  b.topo.fringe[kXi] = {nb.west != kNoNeighbor || global.topo.fringe[kXi][kLow],
                        nb.east != kNoNeighbor || global.topo.fringe[kXi][kHigh]};
  b.topo.fringe[kEta] = global.topo.fringe[kEta];
  b.topo.fringe[kZeta] = {true, true};
  b.topo.axis_at_eta0 = global.topo.axis_at_eta0;
  b.topo.superposed_zeta = global.topo.superposed_zeta;
  b.coords = BlockArray<3>(b.dims);
  for_each_node(b.valid_box(), [&](int i, int j, int k) {
    const double* src = global.coords.at(i + pr.xi_begin, j, k + pr.zeta_begin);
    std::copy(src, src + 3, b.coords.at(i, j, k));
  });
  return b;
}

// Copies owned interior values of a rank block into a global array.
template <int N>
void insert_interior(const BlockArray<N>& local, const PartitionRange& pr, BlockArray<N>& global) {
  for_each_node(local.interior(), [&](int i, int j, int k) {
    const double* src = local.at(i, j, k);
    std::copy(src, src + N, global.at(i + pr.xi_begin, j, k + pr.zeta_begin));
  });
}

}  // namespace jetles
