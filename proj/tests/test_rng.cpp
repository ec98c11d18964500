#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "graphon_rds/rng.hpp"

using namespace graphon_rds;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  using C = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  EXPECT_EQ(philox4x32(C{0, 0, 0, 0}, K{0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngKey, ChildrenAreDistinctAndStable) {
  const RngKey root{42, 0};
  EXPECT_EQ(root.child("a"), root.child("a"));
  EXPECT_NE(root.child("a"), root.child("b"));
  EXPECT_NE(root.child(1), root.child(2));
  EXPECT_NE(root.child(1).child(2), root.child(2).child(1));
  EXPECT_EQ(root.child(7).seed, 42u);
  std::set<std::uint64_t> streams;
  for (std::uint64_t i = 0; i < 10000; ++i) streams.insert(root.child(i).stream);
  EXPECT_EQ(streams.size(), 10000u);
}

TEST(CounterStream, MatchesRandomAccess) {
  const RngKey key{3, 9};
  CounterStream s(key);
  for (std::uint64_t i = 0; i < 101; ++i) EXPECT_EQ(s(), counter_bits(key, i));
  CounterStream t(key, 57);
  EXPECT_EQ(t(), counter_bits(key, 57));
  EXPECT_EQ(t(), counter_bits(key, 58));
}

TEST(CounterStream, UniformMoments) {
  CounterStream s(RngKey{1, 1});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  // mean 1/2 with sd 1/sqrt(12 n); second moment 1/3.
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 0.005);
}

TEST(CounterStream, ExponentialMean) {
  CounterStream s(RngKey{5, 0});
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += s.exponential(4.0);
  EXPECT_NEAR(sum / n, 0.25, 5.0 * 0.25 / std::sqrt(n));
}

TEST(CounterStream, BelowIsInRangeAndBalanced) {
  CounterStream s(RngKey{8, 0});
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = s.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(ToUnit, Endpoints) {
  EXPECT_EQ(to_unit(0), 0.0);
  EXPECT_LT(to_unit(~std::uint64_t{0}), 1.0);
}
