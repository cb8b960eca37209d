#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "jetles/boundary.hpp"
#include "jetles/partition.hpp"

using namespace jetles;

namespace {

bool same_bits(const double* a, const double* b, int n = kNcons) { return std::memcmp(a, b, n * sizeof(double)) == 0; }

bool same_bits(const Conservative& a, const Conservative& b) { return same_bits(a.data(), b.data()); }

void fill_uniform(ConservativeField& q, const Conservative& c) {
  for_each_node(q.allocated(), [&](int i, int j, int k) { std::copy(c.begin(), c.end(), q.at(i, j, k)); });
}

// Independent two-invariant far-field solver.
Conservative riemann_oracle(const PrimitiveState& in, const PrimitiveState& inf, const Vec3& n, const FlowConfig& cfg) {
  const double g = cfg.gamma, gm1 = g - 1.0;
  auto dot = [&](const Vec3& u) { return u[0] * n[0] + u[1] * n[1] + u[2] * n[2]; };
  const double un_i = dot(in.u), un_f = dot(inf.u);
  const double c_i = std::sqrt(g * in.p / in.rho), c_f = std::sqrt(g * inf.p / inf.rho);
  const double r_out = un_i + 2.0 * c_i / gm1;
  const double r_in = un_f - 2.0 * c_f / gm1;
  const double un = 0.5 * (r_out + r_in);
  const double c = 0.25 * gm1 * (r_out - r_in);
  const PrimitiveState& up = un >= 0.0 ? in : inf;
  const double entropy = up.p / std::pow(up.rho, g);
  const double rho = std::pow(c * c / (g * entropy), 1.0 / gm1);
  const double p = rho * c * c / g;
  const double un_up = dot(up.u);
  Vec3 u{};
  for (int d = 0; d < 3; ++d) u[d] = up.u[d] - un_up * n[d] + un * n[d];
  return to_conservative(PrimitiveState{rho, u, p, p / (rho * cfg.gas_constant())}, cfg);
}

void expect_close(const Conservative& a, const Conservative& b, double tol) {
  for (int v = 0; v < kNcons; ++v) EXPECT_NEAR(a[v], b[v], tol * (std::abs(b[v]) + 1.0)) << "component " << v;
}

}  // namespace

TEST(JetStates, InletAndFreeStream) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  const PrimitiveState j = jet_state(cfg), f = freestream_state(cfg);
  EXPECT_DOUBLE_EQ(j.u[0] / sound_speed(j, cfg), 1.4);
  EXPECT_DOUBLE_EQ(j.p, f.p);
  EXPECT_DOUBLE_EQ(j.t, f.t);
  EXPECT_DOUBLE_EQ(j.rho, 1.0);
  EXPECT_DOUBLE_EQ(j.u[0], 1.0);
  EXPECT_EQ(j.u[1], 0.0);
  EXPECT_EQ(f.u[0], 0.0);
}

TEST(FarField, FreeStreamIsExactFixedPoint) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  PrimitiveState inf = make_primitive(1.0, {0.2, -0.1, 0.05}, cfg.gas_constant(), cfg);
  for (const Vec3& n : {Vec3{1, 0, 0}, Vec3{0, 0.6, 0.8}, Vec3{-1, 0, 0}})
    EXPECT_TRUE(same_bits(farfield_riemann(inf, inf, n, cfg), to_conservative(inf, cfg)));
  const PrimitiveState rest = freestream_state(cfg);
  EXPECT_TRUE(same_bits(farfield_riemann(rest, rest, {0, 1, 0}, cfg), to_conservative(rest, cfg)));
}

TEST(FarField, SupersonicRegimes) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  const PrimitiveState inf = freestream_state(cfg);
  const PrimitiveState fast = make_primitive(0.9, {2.0, 0.1, 0}, cfg.gas_constant() * 1.1, cfg);
  EXPECT_TRUE(same_bits(farfield_riemann(fast, inf, {1, 0, 0}, cfg), to_conservative(fast, cfg)));
  EXPECT_TRUE(same_bits(farfield_riemann(fast, inf, {-1, 0, 0}, cfg), to_conservative(inf, cfg)));
}

TEST(FarField, SubsonicMatchesIndependentSolver) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  const PrimitiveState inf = make_primitive(1.0, {0.1, 0.02, 0.0}, cfg.gas_constant(), cfg);
  PrimitiveState out = inf;
  out.p *= 1.01;
  out.t = out.p / (out.rho * cfg.gas_constant());
  const Vec3 n{0.8, 0.6, 0.0};
  expect_close(farfield_riemann(out, inf, n, cfg), riemann_oracle(out, inf, n, cfg), 1e-12);

  PrimitiveState in = make_primitive(1.05, {-0.2, 0.1, 0.03}, cfg.gas_constant() * 0.98, cfg);
  expect_close(farfield_riemann(in, inf, n, cfg), riemann_oracle(in, inf, n, cfg), 1e-12);
}

TEST(FarField, CharacteristicCountsByPerturbation) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  const PrimitiveState inf = make_primitive(1.0, {0.0, 0.1, 0.0}, cfg.gas_constant(), cfg);
  const Vec3 n{1, 0, 0};
  auto with = [&](PrimitiveState w, auto f) {
    f(w);
    w.t = w.p / (w.rho * cfg.gas_constant());
    return w;
  };
  // Subsonic outflow: tangential velocity is carried out from the interior,
  // the free stream only feeds the single incoming invariant.
  const PrimitiveState out = make_primitive(1.0, {0.3, 0.0, 0.0}, cfg.gas_constant(), cfg);
  const auto base = farfield_riemann(out, inf, n, cfg);
  const auto inf_tangent = with(inf, [](PrimitiveState& w) { w.u[2] = 0.3; });
  EXPECT_TRUE(same_bits(farfield_riemann(out, inf_tangent, n, cfg), base));
  const auto inf_pressure = with(inf, [](PrimitiveState& w) { w.p *= 1.1; });
  EXPECT_FALSE(same_bits(farfield_riemann(out, inf_pressure, n, cfg), base));

  // Subsonic inflow: entropy and tangential velocity come from outside.
  const PrimitiveState inflow = make_primitive(1.0, {-0.3, 0.0, 0.0}, cfg.gas_constant(), cfg);
  const auto base_in = farfield_riemann(inflow, inf, n, cfg);
  const auto in_tangent = with(inflow, [](PrimitiveState& w) { w.u[1] = 0.5; });
  EXPECT_TRUE(same_bits(farfield_riemann(in_tangent, inf, n, cfg), base_in));
  const auto in_pressure = with(inflow, [](PrimitiveState& w) { w.p *= 1.1; });
  EXPECT_FALSE(same_bits(farfield_riemann(in_pressure, inf, n, cfg), base_in));
}

TEST(JetInlet, FlatHatProfile) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  // Radial spacing 0.5: j = 1 sits exactly on the jet edge, j = 2 at twice the radius.
  auto g = generate_jet_grid(8, 11, 13, 30, 5);
  compute_metrics(g);
  const BoundarySet b = make_jet_boundaries(cfg, g);
  ConservativeField q(g.dims);
  const Conservative inf = to_conservative(b.freestream_state, cfg);
  fill_uniform(q, inf);
  apply_jet_inlet(g, q, b, cfg);
  const Conservative jet = to_conservative(jet_state(cfg), cfg);
  for (int k = g.deriv_lo(kZeta); k < g.deriv_hi(kZeta); ++k) {
    EXPECT_TRUE(same_bits(q.at(0, 0, k), jet.data()));
    EXPECT_TRUE(same_bits(q.at(0, 1, k), jet.data()));
    for (int j = 2; j < 11; ++j) EXPECT_TRUE(same_bits(q.at(0, j, k), inf.data())) << j;
  }
  const PrimitiveState w = to_primitive(Conservative{q(0, 0, 0, 0), q(0, 0, 0, 1), q(0, 0, 0, 2), q(0, 0, 0, 3),
                                                     q(0, 0, 0, 4)},
                                        cfg);
  EXPECT_NEAR(w.u[0] / sound_speed(w, cfg), 1.4, 1e-14);
}

TEST(FarField, GridApplicationKeepsFreeStream) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  auto g = generate_jet_grid(8, 7, 13, 30, 10);
  compute_metrics(g);
  const BoundarySet b = make_jet_boundaries(cfg, g);
  ConservativeField q(g.dims);
  const Conservative inf = to_conservative(b.freestream_state, cfg);
  fill_uniform(q, inf);
  apply_farfield_riemann(g, q, b, cfg);
  for_each_node(g.valid_box(), [&](int i, int j, int k) { EXPECT_TRUE(same_bits(q.at(i, j, k), inf.data())); });
}

TEST(Centerline, SequentialMeanOracle) {
  const std::vector<double> ring = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4};
  auto m = sequential_ring_mean({ring}, 1);
  for (double v : m) EXPECT_EQ(v, 2.5);

  // Values whose sum depends on association order.
  const double a[4] = {0.1, 0.7, 1e-17, 0.3};
  std::vector<double> whole, s1, s2;
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < kNcons; ++c) (k < 2 ? s1 : s2).push_back(a[k]), whole.push_back(a[k]);
  const double oracle = (((a[0] + a[1]) + a[2]) + a[3]) / 4.0;
  auto one = sequential_ring_mean({whole}, 1);
  auto two = sequential_ring_mean({s1, s2}, 1);
  for (int c = 0; c < kNcons; ++c) {
    EXPECT_EQ(one[c], oracle);
    EXPECT_EQ(std::memcmp(&one[c], &two[c], sizeof(double)), 0);
  }
}

TEST(Centerline, AxisymmetricRingGivesRingValue) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  auto g = generate_jet_grid(8, 6, 9, 30, 10);
  compute_metrics(g);
  const BoundarySet b = make_jet_boundaries(cfg, g);
  ConservativeField q(g.dims);
  fill_uniform(q, to_conservative(b.freestream_state, cfg));
  for (int k = -2; k < 11; ++k)
    for (int i = -2; i < 10; ++i)
      for (int c = 0; c < kNcons; ++c) q(i, 1, k, c) = 0.5 + 0.25 * c;
  apply_centerline(g, q, b, local_centerline_reducer());
  for (int k = g.valid_lo(kZeta); k < g.valid_hi(kZeta); ++k)
    for (int i = 1; i < 7; ++i)
      for (int c = 0; c < kNcons; ++c) EXPECT_EQ(q(i, 0, k, c), 0.5 + 0.25 * c);
  EXPECT_NE(q(0, 0, 0, 0), 0.5);
  EXPECT_NE(q(7, 0, 0, 0), 0.5);
}

TEST(Centerline, FourUniquePlanesAverageInOrder) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  auto g = generate_jet_grid(5, 5, 5, 30, 10);  // 4 unique planes + superposed
  compute_metrics(g);
  const BoundarySet b = make_jet_boundaries(cfg, g);
  ConservativeField q(g.dims);
  fill_uniform(q, to_conservative(b.freestream_state, cfg));
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < 5; ++i)
      for (int c = 0; c < kNcons; ++c) q(i, 1, k, c) = 1.0 + (k % 4);
  apply_centerline(g, q, b, local_centerline_reducer());
  for (int k = 0; k < 5; ++k)
    for (int c = 0; c < kNcons; ++c) EXPECT_EQ(q(2, 0, k, c), 2.5);
}

TEST(Periodic, SuperposedPlaneAndWrap) {
  BlockArray<5> f(Extents{4, 3, 7});
  for_each_node(f.interior(), [&](int i, int j, int k) {
    for (int c = 0; c < 5; ++c) f(i, j, k, c) = 100 * k + 10 * j + i + 0.1 * c;
  });
  apply_periodic(f);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) {
      EXPECT_TRUE(same_bits(f.at(i, j, 0), f.at(i, j, 6)));
      EXPECT_TRUE(same_bits(f.at(i, j, 7), f.at(i, j, 1)));
      EXPECT_TRUE(same_bits(f.at(i, j, 8), f.at(i, j, 2)));
      EXPECT_TRUE(same_bits(f.at(i, j, -1), f.at(i, j, 5)));
      EXPECT_TRUE(same_bits(f.at(i, j, -2), f.at(i, j, 4)));
    }
}

TEST(Boundaries, FaceAssignmentPerPartition) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  const auto global = generate_jet_grid(16, 6, 13, 30, 10);
  const PartitionMap map = build_map(16, 13, 2, 2);
  for (int r = 0; r < map.size(); ++r) {
    const auto block = extract_partition(global, map, r);
    const BoundarySet b = make_jet_boundaries(cfg, block);
    const bool first = map.jx_of(r) == 0, last = map.jx_of(r) == 1;
    EXPECT_EQ(b.faces[kXi][kLow], first ? FaceKind::inlet : FaceKind::interior);
    EXPECT_EQ(b.faces[kXi][kHigh], last ? FaceKind::farfield : FaceKind::interior);
    EXPECT_EQ(b.faces[kEta][kLow], FaceKind::centerline);
    EXPECT_EQ(b.faces[kEta][kHigh], FaceKind::farfield);
    EXPECT_EQ(b.faces[kZeta][kLow], map.iz_of(r) == 0 ? FaceKind::periodic : FaceKind::interior);
    EXPECT_EQ(b.faces[kZeta][kHigh], map.iz_of(r) == 1 ? FaceKind::periodic : FaceKind::interior);
  }
}

TEST(Boundaries, FullSetLeavesUniformFieldUnchanged) {
  const FlowConfig cfg = FlowConfig::jet_defaults();
  auto g = generate_jet_grid(8, 7, 13, 30, 10);
  compute_metrics(g);
  BoundarySet b = make_jet_boundaries(cfg, g);
  b.inlet_state = b.freestream_state;
  ConservativeField q(g.dims);
  const Conservative inf = to_conservative(b.freestream_state, cfg);
  fill_uniform(q, inf);
  apply_boundaries(g, q, b, cfg, local_centerline_reducer());
  for_each_node(g.valid_box(), [&](int i, int j, int k) {
    for (int c = 0; c < kNcons; ++c) EXPECT_NEAR(q(i, j, k, c), inf[c], 1e-15 * std::abs(inf[c]));
  });
}
