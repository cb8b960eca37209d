#include <gtest/gtest.h>

#include "jetles/block_array.hpp"
#include "jetles/flow_config.hpp"

using namespace jetles;

TEST(BlockArray, FringeIsTwoLayersOnEverySide) {
  BlockArray<5> q(Extents{6, 5, 4});
  EXPECT_EQ(kFringe, 2);
  EXPECT_EQ(q.extended(kXi), 10);
  EXPECT_EQ(q.extended(kEta), 9);
  EXPECT_EQ(q.extended(kZeta), 8);
  EXPECT_EQ(q.raw().size(), 10u * 9u * 8u * 5u);
}

TEST(BlockArray, StorageIsXiFastestWithContiguousComponents) {
  BlockArray<3> f(Extents{4, 4, 4});
  EXPECT_EQ(f.at(1, 0, 0) - f.at(0, 0, 0), 3);
  EXPECT_EQ(f.at(0, 1, 0) - f.at(0, 0, 0), 3 * 8);
  EXPECT_EQ(f.at(0, 0, 1) - f.at(0, 0, 0), 3 * 64);
  EXPECT_EQ(f.stride(kEta), 8);
  f(-2, -2, -2, 2) = 7.0;
  EXPECT_EQ(f.raw()[2], 7.0);
  f(5, 5, 5, 0) = 9.0;
  EXPECT_EQ(f.raw()[f.raw().size() - 3], 9.0);
}

TEST(BlockArray, BoxesAndIteration) {
  BlockArray<1> f(Extents{3, 2, 2});
  int count = 0;
  for_each_node(f.interior(), [&](int, int, int) { ++count; });
  EXPECT_EQ(count, 12);
  count = 0;
  for_each_node(f.allocated(), [&](int, int, int) { ++count; });
  EXPECT_EQ(count, 7 * 6 * 6);
  EXPECT_TRUE(f.interior().contains(0, 0, 0));
  EXPECT_FALSE(f.interior().contains(3, 0, 0));
  EXPECT_TRUE((Box{{0, 0, 0}, {0, 1, 1}}).empty());
}

TEST(BlockArray, PendingFlagsPerSide) {
  BlockArray<1> f(Extents{4, 4, 4});
  EXPECT_FALSE(f.fringe_pending(kZeta, kHigh));
  f.set_fringe_pending(kZeta, kHigh, true);
  EXPECT_TRUE(f.fringe_pending(kZeta, kHigh));
  EXPECT_FALSE(f.fringe_pending(kZeta, kLow));
}

TEST(FlowConfig, JetDefaultsSatisfyInvariants) {
  const FlowConfig c = FlowConfig::jet_defaults();
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.gamma, 1.4);
  EXPECT_DOUBLE_EQ(c.prandtl, 0.72);
  EXPECT_DOUBLE_EQ(c.mach_jet, 1.4);
  EXPECT_NEAR(c.cp / c.cv, c.gamma, 1e-12);
  EXPECT_NEAR(c.gas_constant(), 1.0 / (1.4 * 1.4 * 1.4), 1e-15);
}

TEST(FlowConfig, InvariantViolationsRejected) {
  auto bad = [](auto mutate) {
    FlowConfig c = FlowConfig::jet_defaults();
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](FlowConfig& c) { c.gamma = 0.9; });
  bad([](FlowConfig& c) { c.cp = c.cv; });
  bad([](FlowConfig& c) { c.cp *= 1.01; });
  bad([](FlowConfig& c) { c.prandtl = 0.0; });
  bad([](FlowConfig& c) { c.dt = 0.0; });
  bad([](FlowConfig& c) { c.k2 = -1.0; });
  bad([](FlowConfig& c) { c.k4 = 0.0; });
}
