#pragma once

// Flow diagnostics on an assembled global field.

#include <vector>

#include "jetles/grid.hpp"
#include "jetles/numerics.hpp"

namespace jetles {

struct PotentialCore {
  std::vector<int> stations;        // ξ stations meeting the velocity threshold
  std::vector<double> centerline_u; // axial velocity along the centerline
  int length = 0;                   // stations 0..length-1 all meet it
  bool contiguous_from_inlet = false;
  double end_x = 0.0;               // axial position of the last core station
};

// Centerline stations whose axial velocity is at least `fraction` of the
// jet velocity. The core counts as found when those stations are exactly a
// run starting at the inlet and reaching past it.
inline PotentialCore potential_core(const ConservativeField& q, const CurvilinearBlock& grid, double u_jet,
                                    double fraction = 0.95) {
  PotentialCore pc;
  const int n = q.extents().nxi;
  for (int i = 0; i < n; ++i) {
    const double* c = q.at(i, 0, 0);
    const double u = c[1] / c[0];
    pc.centerline_u.push_back(u);
    if (u >= fraction * u_jet) pc.stations.push_back(i);
  }
  while (pc.length < n && pc.centerline_u[pc.length] >= fraction * u_jet) ++pc.length;
  pc.contiguous_from_inlet = pc.length >= 2 && static_cast<int>(pc.stations.size()) == pc.length;
  if (pc.length > 0) pc.end_x = grid.coords(pc.length - 1, 0, 0, 0);
  return pc;
}

}  // namespace jetles
