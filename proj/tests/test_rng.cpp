#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "batopt/rng.hpp"

using batopt::RngStream;

TEST(RngStream, SameKeySameSequence)
{
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(RngStream, StreamsAndSubstreamsDiffer)
{
    RngStream base(42, 1);
    std::set<std::uint64_t> firsts{RngStream(42, 1)(), RngStream(42, 2)(), RngStream(43, 1)(),
                                   base.substream(0)(), base.substream(1)(), base.substream(0).substream(1)()};
    EXPECT_EQ(firsts.size(), 6u);
}

TEST(RngStream, SubstreamIgnoresParentPosition)
{
    RngStream a(5, 2);
    RngStream b(5, 2);
    for (int i = 0; i < 10; ++i) b();
    EXPECT_EQ(a.substream(3)(), b.substream(3)());
}

TEST(RngStream, UniformMomentsAndRange)
{
    RngStream rng(0, 1);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
    EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(RngStream, ExponentialMean)
{
    RngStream rng(1, 1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.exponential(4.0);
    EXPECT_NEAR(sum / n, 0.25, 0.005);
}

TEST(RngStream, IndexCoversRange)
{
    RngStream rng(3, 1);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 5000; ++i) ++counts[rng.index(5)];
    for (int c : counts) EXPECT_GT(c, 800);
}
