#include <gtest/gtest.h>

#include <random>
#include <set>

#include "boxjoin/oracle.hpp"
#include "boxjoin/relational.hpp"

using namespace boxjoin;

TEST(Relation, ParseHeaderAndTuples) {
    const Relation r = parse_relation("R 3 A B\n1 0\n");
    EXPECT_EQ(r.name(), "R");
    EXPECT_EQ(r.bit_width(), 3);
    EXPECT_EQ(r.schema(), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(r.tuples(), (std::vector<Point>{{1, 0}}));
}

TEST(Relation, ParseErrors) {
    try {
        parse_relation("R 3 A B\n1 0\n8 1\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("out of domain"), std::string::npos);
    }
    EXPECT_THROW(parse_relation("R 3 A B\n1\n"), ParseError);
    EXPECT_THROW(parse_relation("R 3 A A\n"), Error);
    EXPECT_THROW(parse_relation("R x A\n"), ParseError);
    EXPECT_THROW(parse_relation(""), ParseError);
    EXPECT_THROW(parse_relation("R 2 A\n1\n1\n"), ParseError);
}

TEST(Relation, RoundTripIsCanonical) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 100; ++it) {
        const int d = 1 + static_cast<int>(rng() % 3);
        std::string text = "R " + std::to_string(d) + " A B\n";
        const int count = static_cast<int>(rng() % 10);
        std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
        for (int i = 0; i < count; ++i) {
            const std::uint64_t a = rng() % (1u << d), b = rng() % (1u << d);
            if (seen.insert({a, b}).second) text += std::to_string(a) + " " + std::to_string(b) + "\n";
        }
        const Relation r = parse_relation(text);
        EXPECT_EQ(r.size(), seen.size());
        EXPECT_EQ(parse_relation(serialize_relation(r)), r);
        EXPECT_EQ(serialize_relation(parse_relation(serialize_relation(r))), serialize_relation(r));
    }
}

TEST(Query, AttributeUniverse) {
    const Query q({Relation("R", {"A", "B"}, 2), Relation("S", {"B", "C"}, 2)});
    EXPECT_EQ(q.attributes(), (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_EQ(q.positions(1), (std::vector<std::size_t>{1, 2}));
    EXPECT_THROW(Query({Relation("R", {"A"}, 2), Relation("S", {"A"}, 3)}), Error);
}

TEST(DomainOrdering, ApplyExample) {
    const Relation r("R", {"A", "B"}, 2, {{0, 0}, {1, 3}, {2, 0}, {3, 3}});
    const std::vector<std::uint64_t> m{0, 2, 3, 1};
    const DomainOrdering sigma(2, {{"A", m}, {"B", m}});
    const Relation out = apply_ordering(r, sigma);
    EXPECT_EQ(out.tuples(), (std::vector<Point>{{0, 0}, {1, 1}, {2, 1}, {3, 0}}));
}

TEST(DomainOrdering, ListingAndInverse) {
    const auto sigma = DomainOrdering::from_listings(2, {{"A", {0, 3, 1, 2}}});
    const auto inv = invert_ordering(sigma);
    EXPECT_EQ(inv.map("A"), (std::vector<std::uint64_t>{0, 3, 1, 2}));
    EXPECT_EQ(sigma.listing("A"), (std::vector<std::uint64_t>{0, 3, 1, 2}));
    const auto id = DomainOrdering::identity({"A"}, 2);
    EXPECT_EQ(invert_ordering(id), id);
    EXPECT_THROW(DomainOrdering(2, {{"A", {0, 0, 1, 2}}}), Error);
}

TEST(DomainOrdering, InverseIsInvolutionAndUndoesApply) {
    std::mt19937_64 rng(5);
    const Relation r("R", {"A", "B"}, 3, {{0, 1}, {5, 7}, {3, 3}, {6, 0}});
    const Query q({r});
    for (int it = 0; it < 50; ++it) {
        std::map<std::string, std::vector<std::uint64_t>> maps;
        for (const char* a : {"A", "B"}) {
            std::vector<std::uint64_t> p{0, 1, 2, 3, 4, 5, 6, 7};
            for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng() % i]);
            maps[a] = p;
        }
        const DomainOrdering sigma(3, maps);
        EXPECT_EQ(invert_ordering(invert_ordering(sigma)), sigma);
        EXPECT_EQ(apply_ordering(apply_ordering(q, sigma), invert_ordering(sigma)), q);
    }
    EXPECT_EQ(apply_ordering(q, DomainOrdering::identity(q.attributes(), 3)), q);
}

TEST(DomainOrdering, ParseAndSerialize) {
    const auto sigma = parse_ordering("order A: 3 2 1 0\norder B: 0 2 1 3\n", 2);
    EXPECT_EQ(sigma.apply("A", 3), 0u);
    EXPECT_EQ(parse_ordering(serialize_ordering(sigma), 2), sigma);
    EXPECT_THROW(parse_ordering("order A: 0 0 1 2\n", 2), Error);
}

TEST(Hyperplane, Examples) {
    const Relation r("R", {"A", "B"}, 3, {{0, 5}});
    EXPECT_EQ(hyperplane(r, "A", 0).tuples, (std::vector<Point>{{5}}));
    EXPECT_TRUE(hyperplane(r, "A", 1).tuples.empty());
    const Relation u("U", {"A"}, 2, {{3}});
    EXPECT_EQ(hyperplane(u, "A", 3).tuples, (std::vector<Point>{{1}}));
    EXPECT_EQ(hyperplane(u, "A", 2).tuples, (std::vector<Point>{{0}}));
}

TEST(Hyperplane, PairedColumns) {
    // Columns 0,1 hold B in {2,3}; columns 2,3 hold B = 1.
    const Relation r("R", {"A", "B"}, 2, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 1}, {3, 1}});
    EXPECT_EQ(hyperplane(r, "A", 0), hyperplane(r, "A", 1));
    EXPECT_EQ(hyperplane(r, "A", 2), hyperplane(r, "A", 3));
    EXPECT_NE(hyperplane(r, "A", 1), hyperplane(r, "A", 2));
}

TEST(SemijoinReduce, Examples) {
    const Query q({Relation("R", {"A"}, 2, {{0}, {1}}), Relation("S", {"A"}, 2, {{1}, {2}})});
    const Query reduced = semijoin_reduce(q, OracleLimits{});
    EXPECT_EQ(reduced.relations()[0].tuples(), (std::vector<Point>{{1}}));
    EXPECT_EQ(reduced.relations()[1].tuples(), (std::vector<Point>{{1}}));
    EXPECT_EQ(semijoin_reduce(reduced, OracleLimits{}), reduced);
}

TEST(SemijoinReduce, TrianglesKeepOnlyUsefulTuples) {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 30; ++it) {
        std::vector<Relation> rels;
        const std::vector<std::vector<std::string>> schemas{{"A", "B"}, {"B", "C"}, {"A", "C"}};
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<Point> t;
            for (int k = 0; k < 8; ++k) t.push_back({rng() % 4, rng() % 4});
            rels.emplace_back("R" + std::to_string(i), schemas[i], 2, t);
        }
        const Query q(rels);
        const auto out = brute_join(q);
        const Query reduced = semijoin_reduce(q, out);
        for (std::size_t ri = 0; ri < 3; ++ri)
            for (const auto& t : reduced.relations()[ri].tuples()) {
                bool used = false;
                for (const auto& o : out) used = used || project(q, ri, o) == t;
                EXPECT_TRUE(used);
            }
        EXPECT_EQ(brute_join(reduced), out);
    }
}

TEST(Tuple, FormatAndParse) {
    EXPECT_EQ(format_tuple({1, 0, 7}), "1 0 7");
    EXPECT_EQ(parse_tuple("1 0 7", 3, 3, 1), (Point{1, 0, 7}));
    EXPECT_THROW(parse_tuple("1 0 8", 3, 3, 1), ParseError);
}
