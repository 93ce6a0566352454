#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "boxjoin/geometry.hpp"

using namespace boxjoin;

namespace {

DyadicBox box(const char* text) { return DyadicBox::parse(text); }

// Every point of the n-dimensional cube of width d.
std::vector<Point> cube_points(std::size_t n, int d) {
    std::vector<Point> out;
    Point p(n, 0);
    const std::uint64_t side = std::uint64_t{1} << d;
    while (true) {
        out.push_back(p);
        std::size_t i = n;
        while (i > 0 && ++p[i - 1] == side) p[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

}  // namespace

TEST(Prefix, ParseAndPrint) {
    EXPECT_EQ(Prefix::parse("01"), (Prefix{1, 2}));
    EXPECT_EQ(Prefix::parse("*"), Prefix::star());
    EXPECT_EQ(Prefix::parse("110").to_string(), "110");
    EXPECT_EQ(Prefix::star().to_string(), "*");
    EXPECT_THROW(Prefix::parse("012"), Error);
    EXPECT_THROW(Prefix::parse(""), Error);
}

TEST(Prefix, Navigation) {
    const Prefix p = Prefix::parse("101");
    EXPECT_EQ(p.parent(), Prefix::parse("10"));
    EXPECT_EQ(p.flipped(), Prefix::parse("100"));
    EXPECT_EQ(p.child(1), Prefix::parse("1011"));
    EXPECT_EQ(p.truncated(1), Prefix::parse("1"));
    EXPECT_TRUE(Prefix::parse("10").is_prefix_of(p));
    EXPECT_FALSE(Prefix::parse("11").is_prefix_of(p));
    EXPECT_EQ(p.lo(4), 10u);
    EXPECT_EQ(p.hi(4), 11u);
}

TEST(DyadicContains, Points) {
    EXPECT_TRUE(dyadic_contains(box("01 1"), {2, 4}, 3));
    EXPECT_FALSE(dyadic_contains(box("01 1"), {4, 4}, 3));
    for (const auto& p : cube_points(2, 3)) EXPECT_TRUE(dyadic_contains(box("* *"), p, 3));
    EXPECT_THROW(dyadic_contains(box("01 1"), {2}, 3), Error);
}

TEST(DyadicContains, MatchesSuperboxMembership) {
    const int d = 2;
    std::vector<DyadicBox> all;
    for (const auto& p : cube_points(2, d))
        for (const auto& b : dyadic_superboxes(DyadicBox::unit(p, d))) all.push_back(b);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (const auto& p : cube_points(2, d)) {
        const auto sup = dyadic_superboxes(DyadicBox::unit(p, d));
        for (const auto& b : all) {
            const bool listed = std::find(sup.begin(), sup.end(), b) != sup.end();
            EXPECT_EQ(dyadic_contains(b, p, d), listed) << b.to_string();
        }
    }
}

TEST(Superboxes, Enumeration) {
    const auto s = dyadic_superboxes(box("01 1"));
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s.front(), box("01 1"));
    EXPECT_EQ(s.back(), box("* *"));
    const std::set<DyadicBox> got(s.begin(), s.end());
    const std::set<DyadicBox> want{box("01 1"), box("0 1"), box("* 1"), box("01 *"), box("0 *"), box("* *")};
    EXPECT_EQ(got, want);
    EXPECT_EQ(dyadic_superboxes(box("* *")), std::vector<DyadicBox>{box("* *")});
    EXPECT_EQ(dyadic_superboxes(DyadicBox::unit({3, 5}, 3)).size(), 16u);
    EXPECT_EQ(superbox_count(DyadicBox::unit({3, 5, 1}, 3)), 64u);
}

TEST(DecomposeInterval, Examples) {
    std::vector<Prefix> want{Prefix::parse("001"), Prefix::parse("01"), Prefix::parse("10"), Prefix::parse("110")};
    EXPECT_EQ(decompose_interval(1, 6, 3), want);
    EXPECT_EQ(decompose_interval(0, 7, 3), std::vector<Prefix>{Prefix::star()});
    EXPECT_EQ(decompose_general(GeneralBox({{1, 6}, {0, 7}}), 3).size(), 4u);
}

TEST(DecomposeInterval, ExactOverAllIntervals) {
    const int d = 4;
    for (std::uint64_t lo = 0; lo < 16; ++lo)
        for (std::uint64_t hi = lo; hi < 16; ++hi) {
            const auto parts = decompose_interval(lo, hi, d);
            EXPECT_LE(parts.size(), static_cast<std::size_t>(2 * d));
            std::vector<int> hits(16, 0);
            for (const auto& p : parts)
                for (std::uint64_t v = p.lo(d); v <= p.hi(d); ++v) ++hits[v];
            for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(hits[v], (v >= lo && v <= hi) ? 1 : 0);
        }
}

TEST(GeometricResolution, Examples) {
    EXPECT_EQ(geometric_resolution(box("01 1"), box("00 10"), 0), box("0 10"));
    EXPECT_FALSE(geometric_resolution(box("01 01"), box("00 10"), 0).has_value());
    EXPECT_EQ(geometric_resolution(box("1 *"), box("0 *"), 0), box("* *"));
    // Not siblings on the chosen attribute.
    EXPECT_FALSE(geometric_resolution(box("1 *"), box("1 *"), 0).has_value());
}

TEST(GeometricResolution, ResolventInsideUnion) {
    const int d = 2;
    std::mt19937_64 rng(7);
    auto random_box = [&] {
        DyadicBox b;
        for (int i = 0; i < 2; ++i) {
            const int len = static_cast<int>(rng() % (d + 1));
            b.prefixes.push_back({len == 0 ? 0 : rng() % (std::uint64_t{1} << len), len});
        }
        return b;
    };
    for (int it = 0; it < 500; ++it) {
        const DyadicBox b1 = random_box(), b2 = random_box();
        for (std::size_t a = 0; a < 2; ++a) {
            const auto r = geometric_resolution(b1, b2, a);
            if (!r) continue;
            for (const auto& p : cube_points(2, d)) {
                if (dyadic_contains(*r, p, d)) {
                    EXPECT_TRUE(dyadic_contains(b1, p, d) || dyadic_contains(b2, p, d));
                }
            }
        }
    }
}

TEST(GeneralBox, FromDyadic) {
    const auto g = GeneralBox::from_dyadic(box("01 *"), 3);
    EXPECT_EQ(g, GeneralBox({{2, 3}, {0, 7}}));
    EXPECT_TRUE(g.contains(Point{3, 5}));
    EXPECT_FALSE(g.contains(Point{4, 5}));
    EXPECT_TRUE(g.contains(GeneralBox({{2, 2}, {1, 4}})));
    EXPECT_DOUBLE_EQ(g.volume(), 16.0);
}

TEST(DyadicBoxIndex, SuperboxQueries) {
    DyadicBoxIndex x(2);
    x.insert(box("1 *"));
    x.insert(box("* 1"));
    EXPECT_EQ(x.query_superboxes(box("1 0")), std::vector<DyadicBox>{box("1 *")});
    EXPECT_TRUE(x.covers(box("1 0")));
    EXPECT_FALSE(x.covers(box("0 0")));
    DyadicBoxIndex empty(2);
    EXPECT_TRUE(empty.query_superboxes(box("01 1")).empty());
    EXPECT_THROW(x.insert(box("1")), Error);
}

TEST(DyadicBoxIndex, MatchesLinearScan) {
    const int d = 2;
    std::mt19937_64 rng(11);
    auto random_box = [&] {
        DyadicBox b;
        for (int i = 0; i < 2; ++i) {
            const int len = static_cast<int>(rng() % (d + 1));
            b.prefixes.push_back({len == 0 ? 0 : rng() % (std::uint64_t{1} << len), len});
        }
        return b;
    };
    DyadicBoxIndex x(2);
    std::set<DyadicBox> mirror;
    for (int op = 0; op < 100; ++op) {
        const DyadicBox b = random_box();
        if (rng() % 2) {
            EXPECT_EQ(x.insert(b), mirror.insert(b).second);
        } else {
            EXPECT_EQ(x.erase(b), mirror.erase(b) == 1);
        }
        const DyadicBox q = random_box();
        std::vector<DyadicBox> want;
        for (const auto& m : mirror)
            if (dyadic_contains(m, q)) want.push_back(m);
        auto got = x.query_superboxes(q);
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, want);
    }
    EXPECT_EQ(x.sorted(), std::vector<DyadicBox>(mirror.begin(), mirror.end()));
}

TEST(DyadicBoxIndex, CountsProbes) {
    DyadicBoxIndex x(2);
    x.insert(box("1 *"));
    x.reset_probes();
    x.query_superboxes(DyadicBox::unit({1, 2}, 2));
    EXPECT_EQ(x.probes(), 9u);
}
