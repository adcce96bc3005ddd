#include <gtest/gtest.h>

#include <set>

#include "qden/rng.hpp"

using qden::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, DerivedSeedsSeparateTagsAndIndices) {
  std::set<std::uint64_t> seen;
  for (const char* tag : {"a", "b", "ranged-same-ff-duplication-cne"}) {
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(qden::derive_seed(7, tag, i));
  }
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_NE(qden::derive_seed(1, "x", 0), qden::derive_seed(2, "x", 0));
  EXPECT_EQ(qden::derive_seed(1, "x", 5), qden::derive_seed(1, "x", 5));
}

TEST(Rng, BoundedDrawsStayInRangeAndCoverIt) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const int v = rng.below(7);
    ASSERT_GE(v, 0);
    ASSERT_LT(v, 7);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, UniformIsHalfOpen) {
  Rng rng(9);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, BernoulliEdges) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_FALSE(rng.bernoulli(0.0));
    ASSERT_TRUE(rng.bernoulli(1.0));
  }
}
