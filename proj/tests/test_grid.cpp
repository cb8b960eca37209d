#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "jetles/grid.hpp"

using namespace jetles;

TEST(JetGrid, NodeCountsOfTheMeshFamily) {
  EXPECT_EQ(generate_jet_grid(32, 32, 361, 30, 10).node_count(), 369664u);
  EXPECT_EQ(generate_jet_grid(64, 32, 361, 30, 10).node_count(), 739328u);
  EXPECT_EQ(generate_jet_grid(5, 7, 9, 3, 2).node_count(), 5u * 7u * 9u);

  const std::vector<double> approx = {370e3, 740e3, 1.5e6, 3.0e6, 6.0e6, 11.8e6, 23.7e6,
                                      47.3e6, 94.6e6, 190e6, 380e6, 760e6, 1.0e9};
  const auto& meshes = scalability_meshes();
  ASSERT_EQ(meshes.size(), 13u);
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    EXPECT_EQ(meshes[m].id, static_cast<int>(m) + 1);
    EXPECT_EQ(meshes[m].dims.nzeta, 361);
    const double n = static_cast<double>(meshes[m].dims.nodes());
    EXPECT_NEAR(n / approx[m], 1.0, 0.05) << "mesh " << m + 1;
  }
}

TEST(JetGrid, RejectsThinOrInvalidInput) {
  EXPECT_THROW(generate_jet_grid(3, 8, 8, 30, 10), ConfigError);
  EXPECT_THROW(generate_jet_grid(8, 3, 8, 30, 10), ConfigError);
  EXPECT_THROW(generate_jet_grid(8, 8, 3, 30, 10), ConfigError);
  EXPECT_THROW(generate_jet_grid(8, 8, 8, 0, 10), ConfigError);
  EXPECT_THROW(generate_jet_grid(8, 8, 8, 30, -1), ConfigError);
}

TEST(JetGrid, GeometryAndSuperposedPlane) {
  const auto g = generate_jet_grid(9, 6, 13, 30, 10);
  const int last = 12;
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 9; ++i) {
      EXPECT_EQ(std::memcmp(g.coords.at(i, j, 0), g.coords.at(i, j, last), 3 * sizeof(double)), 0);
      EXPECT_DOUBLE_EQ(g.coords(i, j, 3, 0), 30.0 * i / 8.0);
    }
  for (int k = 0; k < 13; ++k)
    for (int i = 0; i < 9; ++i) {
      EXPECT_EQ(g.coords(i, 0, k, 1), 0.0);
      EXPECT_EQ(g.coords(i, 0, k, 2), 0.0);
      EXPECT_NEAR(std::hypot(g.coords(i, 5, k, 1), g.coords(i, 5, k, 2)), 10.0, 1e-12);
    }
  // The ζ fringe continues periodically.
  EXPECT_EQ(std::memcmp(g.coords.at(2, 3, -1), g.coords.at(2, 3, 11), 3 * sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(g.coords.at(2, 3, 13), g.coords.at(2, 3, 1), 3 * sizeof(double)), 0);
  EXPECT_EQ(wrap_superposed(-1, 13), 11);
  EXPECT_EQ(wrap_superposed(13, 13), 1);
}

TEST(MeshSpec, ParseAndFormat) {
  EXPECT_EQ(parse_mesh_spec("32x32x37"), (Extents{32, 32, 37}));
  EXPECT_EQ(format_mesh_spec(Extents{64, 8, 9}), "64x8x9");
  EXPECT_THROW(parse_mesh_spec("32x32"), ConfigError);
  EXPECT_THROW(parse_mesh_spec("32x32x37junk"), ConfigError);
}

TEST(Metrics, UnitCartesianIsIdentity) {
  auto b = make_uniform_box(Extents{5, 6, 7}, 1.0);
  compute_metrics(b);
  for_each_node(b.deriv_box(), [&](int i, int j, int k) {
    EXPECT_EQ(b.jacobian(i, j, k), 1.0);
    for (int a = 0; a < 3; ++a)
      for (int d = 0; d < 3; ++d) EXPECT_EQ(b.metric(i, j, k, a, d), a == d ? 1.0 : 0.0);
  });
}

TEST(Metrics, ScaledBoxJacobian) {
  const double h = 0.25;
  auto b = make_uniform_box(Extents{5, 5, 5}, h, {true, false, true});
  compute_metrics(b);
  for_each_node(b.deriv_box(), [&](int i, int j, int k) {
    EXPECT_NEAR(b.jacobian(i, j, k), 1.0 / (h * h * h), 1e-12);
    EXPECT_NEAR(b.metric(i, j, k, 1, 1), 1.0 / h, 1e-12);
  });
}

// Discrete metric identities: Σ_a δ_a S_a,d vanishes with the same central
// stencil (one-sided at physical ends) used for the fluxes.
TEST(Metrics, FreeStreamIdentitiesOnCurvedGrid) {
  auto b = make_box_block(Extents{9, 8, 10}, [](double i, double j, double k) {
    const double x = 0.3 * i + 0.05 * std::sin(0.7 * j + 0.3 * k);
    const double y = 0.25 * j + 0.04 * std::cos(0.5 * i) * std::sin(0.4 * k);
    const double z = 0.2 * k + 0.03 * std::sin(0.6 * i + 0.9 * j);
    return std::array<double, 3>{x, y, z};
  });
  compute_metrics(b);
  double worst = 0.0;
  for_each_node(b.deriv_box(), [&](int i, int j, int k) {
    const std::array<int, 3> t{i, j, k};
    for (int d = 0; d < 3; ++d) {
      double sum = 0.0;
      for (int a = 0; a < 3; ++a) {
        const std::ptrdiff_t s = 9 * b.metrics.stride(a);
        sum += axis_difference(b.metrics.at(i, j, k) + 3 * a + d, s, t[a], b.dims[a], false, false);
      }
      worst = std::max(worst, std::abs(sum));
    }
  });
  EXPECT_LE(worst, 1e-12);
}

TEST(Metrics, JetGridIdentitiesAndCenterline) {
  auto g = generate_jet_grid(8, 7, 13, 30, 10);
  compute_metrics(g);
  for (int k = 0; k < 13; ++k)
    for (int i = 0; i < 8; ++i) {
      EXPECT_TRUE(g.singular(i, 0, k));
      EXPECT_EQ(g.volume(i, 0, k), 0.0);
      for (int d = 0; d < 3; ++d) EXPECT_EQ(g.metrics(i, 0, k, 3 * kEta + d), 0.0);
      EXPECT_GT(g.jacobian(i, 1, k), 0.0);
    }
  double worst = 0.0;
  for (int k = 0; k < 13; ++k)
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 8; ++i) {
        const std::array<int, 3> t{i, j, k};
        for (int d = 0; d < 3; ++d) {
          double sum = 0.0;
          for (int a = 0; a < 3; ++a) {
            const std::ptrdiff_t s = 9 * g.metrics.stride(a);
            sum += axis_difference(g.metrics.at(i, j, k) + 3 * a + d, s, t[a], g.dims[a], g.topo.fringe[a][kLow],
                                   g.topo.fringe[a][kHigh]);
          }
          worst = std::max(worst, std::abs(sum));
        }
      }
  EXPECT_LE(worst, 1e-12);
}

namespace {

// Max relative error of the Jacobian on an annulus against 1/(r Δξ Δr Δθ).
double annulus_jacobian_error(int n) {
  const double length = 2.0, r0 = 1.0, r1 = 2.0;
  auto g = make_cylindrical_block(n, n, 2 * n + 1, length, r0, r1);
  compute_metrics(g);
  const double dx = length / (n - 1), dr = (r1 - r0) / (n - 1), dth = 2.0 * std::numbers::pi / (2 * n);
  double worst = 0.0;
  for_each_node(g.deriv_box(), [&](int i, int j, int k) {
    if (k < 0 || k >= g.dims.nzeta) return;
    const double r = r0 + dr * j;
    const double exact = 1.0 / (r * dx * dr * dth);
    worst = std::max(worst, std::abs(g.jacobian(i, j, k) - exact) / exact);
  });
  return worst;
}

}  // namespace

TEST(Metrics, AnnulusJacobianConvergesAtSecondOrder) {
  const double e1 = annulus_jacobian_error(8), e2 = annulus_jacobian_error(16), e3 = annulus_jacobian_error(32);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
  EXPECT_LT(e3, 2e-3);
}

TEST(Metrics, DegenerateCellReportsIndex) {
  auto b = make_box_block(Extents{5, 5, 5}, [](double i, double j, double k) {
    const double flip = (i == 2 && j == 2 && k == 2) ? -3.0 : 1.0;
    return std::array<double, 3>{i * flip, j, k};
  });
  try {
    compute_metrics(b);
    FAIL() << "expected a degenerate cell";
  } catch (const DegenerateCell& e) {
    EXPECT_EQ(e.index[1], 2);
    EXPECT_EQ(e.index[2], 2);
  }
}

TEST(Metrics, TooThinBlockRejected) {
  auto b = make_uniform_box(Extents{2, 5, 5}, 1.0);
  EXPECT_THROW(compute_metrics(b), ConfigError);
}
