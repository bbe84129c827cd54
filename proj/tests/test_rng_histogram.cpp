#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "stochcap/histogram.hpp"
#include "stochcap/rng.hpp"

using namespace stochcap;

TEST(CounterRng, SameKeySameStream) {
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
    EXPECT_EQ(a.counter(), 100u);
}

TEST(CounterRng, UniformInHalfOpenUnitInterval) {
    CounterRng r(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LE(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(CounterRng, SubstreamsAreOrderIndependent) {
    const CounterRng root(derive_key({5, 9}));
    CounterRng s3 = root.substream(3);
    const auto first = s3();
    CounterRng other = root.substream(1);
    for (int i = 0; i < 10; ++i) other();
    EXPECT_EQ(root.substream(3)(), first);
    EXPECT_NE(root.substream(4)(), first);
}

TEST(DeriveKey, DependsOnOrderAndValues) {
    std::set<std::uint64_t> keys;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) keys.insert(derive_key({a, b}));
    EXPECT_EQ(keys.size(), 400u);
    EXPECT_NE(derive_key({1, 2}), derive_key({2, 1}));
    EXPECT_NE(derive_key({1}), derive_key({1, 0}));
}

TEST(IntensityProfile, Validation) {
    EXPECT_THROW(IntensityProfile({}, {}), DomainError);
    EXPECT_THROW(IntensityProfile({1, 2}, {1}), DomainError);
    EXPECT_THROW(IntensityProfile({2, 1}, {1, 1}), DomainError);
    EXPECT_THROW(IntensityProfile({1, 1}, {1, 1}), DomainError);
    EXPECT_THROW(IntensityProfile({0, 1}, {1, 1}), DomainError);
    EXPECT_THROW(IntensityProfile({1, 2}, {-1, 3}), DomainError);
    EXPECT_THROW(IntensityProfile({1, 2}, {0, 0}), DomainError);
    const IntensityProfile p({1, 2, 3}, {0.5, 0, 2});
    EXPECT_DOUBLE_EQ(p.total_records(), 2.5);
    EXPECT_EQ(p.size(), 3u);
}

TEST(CensoredHistogram, Validation) {
    EXPECT_THROW(CensoredHistogram({1, 2}, {1, 1}, {0}), DomainError);
    EXPECT_THROW(CensoredHistogram({1, 2}, {1, 1}, {-1, 0}), DomainError);
    EXPECT_THROW(CensoredHistogram({1, 2}, {1, 1}, {2, 0}), DomainError);
    // fractional records allow up to ceil(r) breakdowns
    EXPECT_NO_THROW(CensoredHistogram({1, 2}, {1.5, 1}, {2, 0}));
}

TEST(CensoredHistogram, CensoredWeightNeverNegative) {
    const CensoredHistogram h({1, 2, 3}, {1.5, 4, 2}, {2, 1, 0});
    EXPECT_DOUBLE_EQ(h.censored_weight(0), 0.0);
    EXPECT_DOUBLE_EQ(h.censored_weight(1), 3.0);
    EXPECT_DOUBLE_EQ(h.censored_weight(2), 2.0);
    EXPECT_EQ(h.total_breakdowns(), 3);
    EXPECT_DOUBLE_EQ(h.total_records(), 7.5);
    EXPECT_EQ(h.profile(), IntensityProfile({1, 2, 3}, {1.5, 4, 2}));
}
