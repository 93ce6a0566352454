#include <gtest/gtest.h>

#include <random>

#include "boxjoin/coverkit.hpp"
#include "boxjoin/instances.hpp"
#include "boxjoin/oracle.hpp"

using namespace boxjoin;

namespace {

DyadicBox box(const char* text) { return DyadicBox::parse(text); }

std::vector<DyadicBox> boxes(std::initializer_list<const char*> texts) {
    std::vector<DyadicBox> out;
    for (const char* t : texts) out.push_back(box(t));
    std::sort(out.begin(), out.end());
    return out;
}

Relation random_relation(std::mt19937_64& rng, int d, std::size_t n, std::size_t count) {
    std::vector<std::string> schema;
    for (std::size_t a = 0; a < n; ++a) schema.push_back(std::string(1, static_cast<char>('A' + a)));
    std::vector<Point> t;
    for (std::size_t i = 0; i < count; ++i) {
        Point p;
        for (std::size_t a = 0; a < n; ++a) p.push_back(rng() % (std::uint64_t{1} << d));
        t.push_back(p);
    }
    return Relation("R", schema, d, t);
}

}  // namespace

TEST(Gamb, SingleTuple) {
    const Relation r("R", {"A", "B"}, 1, {{0, 0}});
    EXPECT_EQ(gamb(r), boxes({"1 *", "* 1", "1 0", "0 1"}));
    EXPECT_EQ(maximality_filter(gamb(r), r), boxes({"1 *", "* 1"}));
}

TEST(Gamb, EmptyRelation) {
    const Relation r("R", {"A", "B"}, 2);
    EXPECT_TRUE(gamb(r).empty());
    EXPECT_EQ(gamb_cover(r), boxes({"* *"}));
}

TEST(Gamb, MatchesExhaustiveEnumeration) {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 80; ++it) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 1 + rng() % 3;
        const Relation r = random_relation(rng, d, n, rng() % 12);
        const auto g = gamb(r);
        OccupancyIndex occ(r);
        for (const auto& b : g) EXPECT_FALSE(occ.occupied(b));
        EXPECT_EQ(maximality_filter(gamb_cover(r), r), enumerate_maximal_dyadic_gap_boxes(r));
    }
}

TEST(MaximalityFilter, IdempotentAndRejectsTupleBoxes) {
    const Relation r("R", {"A", "B"}, 2, {{0, 1}, {3, 2}});
    const auto once = maximality_filter(gamb(r), r);
    EXPECT_EQ(maximality_filter(once, r), once);
    EXPECT_THROW(maximality_filter({box("0 *")}, r), Error);
}

TEST(QueryCover, CheckerboardUnderGroupingOrder) {
    const auto cb = gen_checkerboard(3);
    EXPECT_EQ(build_query_cover(cb.query).size(), 96u);
    const auto cover = build_query_cover(apply_ordering(cb.query, cb.sigma));
    ASSERT_EQ(cover.parts.size(), 3u);
    for (const auto& p : cover.parts) EXPECT_EQ(p.boxes.size(), 2u);
}

TEST(QueryCover, CoversEveryNonTuple) {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 40; ++it) {
        const Relation r = random_relation(rng, 2, 2, rng() % 10);
        const auto b = gamb_cover(r);
        for (std::uint64_t x = 0; x < 4; ++x)
            for (std::uint64_t y = 0; y < 4; ++y) {
                bool covered = false;
                for (const auto& g : b) covered = covered || dyadic_contains(g, {x, y}, 2);
                EXPECT_EQ(covered, !r.contains({x, y}));
            }
    }
}

TEST(BoxCoverText, RoundTrip) {
    BoxCover c;
    c.parts.push_back({"R", boxes({"0 *", "11 1"})});
    c.parts.push_back({"S", boxes({"*"})});
    const auto parsed = parse_box_cover("# comment\n" + c.to_text());
    ASSERT_EQ(parsed.parts.size(), 2u);
    EXPECT_EQ(parsed.parts[0].boxes, c.parts[0].boxes);
    EXPECT_EQ(parsed.parts[1].relation, "S");
    EXPECT_THROW(parse_box_cover("box R 0 *\nbox R 1\n"), ParseError);
    EXPECT_THROW(parse_box_cover("cube R 0\n"), ParseError);
}

TEST(Mdbci, InsertExample) {
    Relation r("R", {"A", "B"}, 1, {{0, 0}});
    Mdbci x(r);
    r.insert({1, 1});
    x.insert(r, {1, 1});
    EXPECT_EQ(maximality_filter(x.boxes(), r), boxes({"0 1", "1 0"}));
    EXPECT_THROW(x.insert(r, {1, 1}), Error);
}

TEST(Mdbci, InsertFillingTheCube) {
    Relation r("R", {"A", "B"}, 1, {{0, 0}, {0, 1}, {1, 0}});
    Mdbci x(r);
    r.insert({1, 1});
    x.insert(r, {1, 1});
    EXPECT_FALSE(x.index().covers(DyadicBox::unit({1, 1}, 1)));
    EXPECT_TRUE(maximality_filter(x.boxes(), r).empty());
}

TEST(Mdbci, DeleteLastTuple) {
    Relation r("R", {"A", "B"}, 1, {{0, 0}});
    Mdbci x(r);
    r.erase({0, 0});
    x.erase(r, {0, 0});
    EXPECT_TRUE(x.index().contains(box("* *")));
    EXPECT_EQ(maximality_filter(x.boxes(), r), boxes({"* *"}));
}

TEST(Mdbci, DeleteThenReinsert) {
    Relation r("R", {"A", "B"}, 2, {{0, 1}, {2, 2}, {3, 0}});
    Mdbci x(r);
    const auto before = maximality_filter(x.boxes(), r);
    r.erase({2, 2});
    x.erase(r, {2, 2});
    r.insert({2, 2});
    x.insert(r, {2, 2});
    EXPECT_EQ(maximality_filter(x.boxes(), r), before);
}

TEST(Mdbci, RandomInterleavingKeepsInvariant) {
    std::mt19937_64 rng(29);
    for (int inst = 0; inst < 10; ++inst) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 1 + rng() % 3;
        Relation r = random_relation(rng, d, n, rng() % 8);
        Mdbci x(r);
        for (int op = 0; op < 50; ++op) {
            const Point t = random_relation(rng, d, n, 1).tuples()[0];
            if (r.contains(t)) {
                r.erase(t);
                x.erase(r, t);
            } else {
                r.insert(t);
                x.insert(r, t);
            }
            // maximality_filter throws if some indexed box holds a tuple.
            ASSERT_EQ(maximality_filter(x.boxes(), r), enumerate_maximal_dyadic_gap_boxes(r));
            std::uint64_t ceiling = 3 * n;
            for (std::size_t a = 0; a < n; ++a) ceiling *= static_cast<std::uint64_t>(d + 1);
            EXPECT_LE(x.last_probes(), ceiling);
        }
    }
}
