#include <gtest/gtest.h>

#include <random>

#include "boxjoin/engine.hpp"
#include "boxjoin/instances.hpp"
#include "boxjoin/oracle.hpp"

using namespace boxjoin;

namespace {

DyadicBox box(const char* text) { return DyadicBox::parse(text); }

std::vector<Point> uncovered(const KnowledgeBase& k) {
    std::vector<Point> out;
    const std::uint64_t side = std::uint64_t{1} << k.bit_width();
    Point p(k.arity(), 0);
    while (true) {
        if (!k.covers(DyadicBox::unit(p, k.bit_width()))) out.push_back(p);
        std::size_t i = p.size();
        while (i > 0 && ++p[i - 1] == side) p[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

Query random_query(std::mt19937_64& rng, int d) {
    const std::vector<std::vector<std::string>> schemas{{"A", "B"}, {"B", "C"}, {"A", "C"}, {"C"}};
    std::vector<Relation> rels;
    const std::size_t m = 1 + rng() % 3;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& s = schemas[rng() % schemas.size()];
        std::vector<Point> t;
        const std::size_t count = rng() % 12;
        for (std::size_t j = 0; j < count; ++j) {
            Point p;
            for (std::size_t a = 0; a < s.size(); ++a) p.push_back(rng() % (std::uint64_t{1} << d));
            t.push_back(p);
        }
        rels.emplace_back("R" + std::to_string(i), s, d, t);
    }
    return Query(rels);
}

}  // namespace

TEST(FindWitness, Examples) {
    KnowledgeBase full(2, 1);
    full.insert(box("* *"));
    EXPECT_FALSE(find_witness(full).has_value());
    KnowledgeBase empty(2, 1);
    EXPECT_EQ(find_witness(empty), (Point{0, 0}));
    KnowledgeBase half(2, 1);
    half.insert(box("0 *"));
    EXPECT_EQ(find_witness(half), (Point{1, 0}));
}

TEST(FindWitness, LeastUncoveredPoint) {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 50; ++it) {
        KnowledgeBase k(2, 2);
        for (int i = 0; i < 5; ++i) {
            DyadicBox b;
            for (int a = 0; a < 2; ++a) {
                const int len = static_cast<int>(rng() % 3);
                b.prefixes.push_back({len == 0 ? 0 : rng() % (1u << len), len});
            }
            k.insert(b);
        }
        const auto free = uncovered(k);
        const auto w = find_witness(k);
        if (free.empty()) {
            EXPECT_FALSE(w.has_value());
        } else {
            EXPECT_EQ(w, free.front());
        }
    }
}

TEST(ResolveStep, SiblingsMerge) {
    KnowledgeBase k(2, 1);
    k.insert(box("0 *"));
    k.insert(box("1 *"));
    EXPECT_EQ(resolve_step(k, {true, 4}), 1u);
    EXPECT_TRUE(k.contains(box("* *")));
    KnowledgeBase lone(2, 2);
    lone.insert(box("01 *"));
    lone.insert(box("* 11"));
    EXPECT_EQ(resolve_step(lone, {true, 4}), 0u);
    EXPECT_EQ(resolve_step(k, {false, 4}), 0u);
}

TEST(ResolveStep, CoveredRegionUnchanged) {
    std::mt19937_64 rng(47);
    for (int it = 0; it < 60; ++it) {
        KnowledgeBase k(2, 2);
        for (int i = 0; i < 6; ++i) {
            DyadicBox b;
            for (int a = 0; a < 2; ++a) {
                const int len = static_cast<int>(rng() % 3);
                b.prefixes.push_back({len == 0 ? 0 : rng() % (1u << len), len});
            }
            k.insert(b);
        }
        const auto before = uncovered(k);
        const auto witness = find_witness(k);
        resolve_step(k, {true, 16});
        EXPECT_EQ(uncovered(k), before);
        EXPECT_EQ(find_witness(k), witness);
    }
}

TEST(TetrisJoin, SingleUnaryRelation) {
    const Query q({Relation("R", {"A"}, 1, {{0}})});
    BoxCover b;
    b.parts.push_back({"R", {box("1")}});
    const auto res = tetris_join(b, q);
    EXPECT_EQ(res.output, std::vector<Point>{{0}});
    ASSERT_EQ(res.certificate.size(), 1u);
    EXPECT_EQ(res.certificate[0].box, box("1"));
    EXPECT_EQ(res.witnesses.size(), 1u);
}

TEST(TetrisJoin, IntersectionExample) {
    const Query q({Relation("R", {"A"}, 2, {{0}, {1}}), Relation("S", {"A"}, 2, {{1}})});
    EXPECT_EQ(tetris_join(build_query_cover(q), q).output, std::vector<Point>{{1}});
}

TEST(TetrisJoin, RejectsBadCover) {
    const Query q({Relation("R", {"A"}, 1, {{0}})});
    BoxCover b;
    b.parts.push_back({"R", {box("0")}});
    EXPECT_THROW(tetris_join(b, q), Error);
    b.parts[0].relation = "X";
    EXPECT_THROW(tetris_join(b, q), Error);
}

TEST(TetrisJoin, CheckerboardIsEmpty) {
    const auto cb = gen_checkerboard(3);
    const Query q = apply_ordering(cb.query, cb.sigma);
    const auto res = tetris_join(build_query_cover(q), q);
    EXPECT_TRUE(res.output.empty());
    EXPECT_TRUE(brute_join(q).empty());
    EXPECT_TRUE(tetris_reordered(cb.query).output.empty());
    EXPECT_LE(res.certificate.size(), 6u);
}

TEST(TetrisJoin, MatchesBruteJoinWithAndWithoutResolution) {
    std::mt19937_64 rng(53);
    for (int it = 0; it < 80; ++it) {
        const int d = 1 + static_cast<int>(rng() % 2);
        const Query q = random_query(rng, d);
        const auto want = brute_join(q);
        const auto cover = build_query_cover(q);
        const auto plain = tetris_join(cover, q);
        EXPECT_EQ(plain.output, want);
        EXPECT_EQ(tetris_join(cover, q, {true, 8}).output, want);
        EXPECT_EQ(tetris_reordered(q).output, want);
        for (std::size_t i = 0; i < plain.witnesses.size(); ++i)
            for (std::size_t j = i + 1; j < plain.witnesses.size(); ++j)
                EXPECT_TRUE(independent(q, cover, plain.witnesses[i], plain.witnesses[j]));
    }
}

TEST(TetrisJoin, SingleRelationReturnsItself) {
    const Relation r("R", {"A", "B"}, 2, {{0, 3}, {2, 1}, {3, 3}});
    const Query q({r});
    EXPECT_EQ(tetris_reordered(q).output, r.tuples());
}

TEST(TetrisJoin, LiftedOutputSize) {
    std::mt19937_64 rng(59);
    for (int it = 0; it < 10; ++it) {
        const Query q = random_query(rng, 2);
        const Query lifted = lift_query(q, 1);
        const auto base = brute_join(q);
        const auto out = tetris_reordered(lifted).output;
        EXPECT_EQ(out.size(), base.size() << q.attribute_count());
        auto want = lift_points(base, 2, 1);
        std::sort(want.begin(), want.end());
        EXPECT_EQ(out, want);
    }
}
