#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "boxjoin/instances.hpp"
#include "boxjoin/oracle.hpp"
#include "boxjoin/ordering.hpp"

using namespace boxjoin;

namespace {

// Hyperplane-equality partition computed directly from the definition.
std::set<std::set<std::uint64_t>> classes_by_definition(const Query& q, const std::string& attr) {
    std::map<std::vector<Hyperplane>, std::set<std::uint64_t>> groups;
    const std::uint64_t side = std::uint64_t{1} << q.bit_width();
    for (std::uint64_t v = 0; v < side; ++v) {
        std::vector<Hyperplane> key;
        for (const auto& r : q.relations())
            if (r.attribute_index(attr)) key.push_back(hyperplane(r, attr, v));
        groups[key].insert(v);
    }
    std::set<std::set<std::uint64_t>> out;
    for (auto& [k, v] : groups) out.insert(v);
    return out;
}

std::set<std::set<std::uint64_t>> as_sets(const EquivalenceClasses& ec) {
    std::set<std::set<std::uint64_t>> out;
    for (const auto& c : ec.classes) out.insert({c.begin(), c.end()});
    if (!ec.absent.empty()) out.insert({ec.absent.begin(), ec.absent.end()});
    return out;
}

const Relation kPaired("R", {"A", "B"}, 2, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 1}, {3, 1}});

}  // namespace

TEST(EquivalenceClasses, Checkerboard) {
    const Query q = gen_checkerboard(2).query;
    const auto ec = equivalence_classes(q, "A");
    EXPECT_EQ(as_sets(ec), (std::set<std::set<std::uint64_t>>{{0, 2}, {1, 3}}));
    const auto listing = order_attr(q, "A");
    ASSERT_EQ(listing.size(), 4u);
    EXPECT_EQ(listing[0] % 2, listing[1] % 2);
    EXPECT_EQ(listing[2] % 2, listing[3] % 2);
}

TEST(EquivalenceClasses, PairedColumns) {
    const Query q({kPaired});
    EXPECT_EQ(equivalence_classes(q, "A").full_count(), 2u);
    // B = 0 holds no tuple and forms its own class.
    const auto b = equivalence_classes(q, "B");
    EXPECT_EQ(b.full_count(), 3u);
    EXPECT_EQ(b.absent, std::vector<std::uint64_t>{0});
}

TEST(EquivalenceClasses, SingleAndDistinct) {
    const Query same({Relation("R", {"A", "B"}, 2, {{0, 1}, {1, 1}, {2, 1}, {3, 1}})});
    EXPECT_EQ(order_attr(same, "A"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
    EXPECT_EQ(equivalence_classes(same, "A").full_count(), 1u);
    const Query distinct({Relation("R", {"A", "B"}, 2, {{0, 0}, {1, 1}, {2, 2}, {3, 3}})});
    EXPECT_EQ(equivalence_classes(distinct, "A").count(), 4u);
    const Query empty({Relation("R", {"A", "B"}, 2)});
    EXPECT_EQ(order_attr(empty, "A"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
}

TEST(EquivalenceClasses, MatchDefinitionAndRunConsecutively) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 60; ++it) {
        const int d = 1 + static_cast<int>(rng() % 3);
        std::vector<Point> r, s;
        for (int i = 0; i < 10; ++i) r.push_back({rng() % (1u << d), rng() % (1u << d)});
        for (int i = 0; i < 6; ++i) s.push_back({rng() % (1u << d)});
        const Query q({Relation("R", {"A", "B"}, d, r), Relation("S", {"A"}, d, s)});
        for (const std::string a : {"A", "B"}) {
            const auto order = order_attribute(q, a);
            EXPECT_EQ(as_sets(order.classes), classes_by_definition(q, a));
            // Every class occupies one consecutive run of the listing.
            const auto labels = order.classes.labels(d);
            std::set<std::size_t> closed;
            for (std::size_t i = 0; i < order.listing.size(); ++i) {
                const std::size_t l = labels[order.listing[i]];
                if (i > 0 && labels[order.listing[i - 1]] != l) closed.insert(labels[order.listing[i - 1]]);
                EXPECT_FALSE(closed.count(l));
            }
        }
    }
}

TEST(EquivalenceClasses, UnchangedByLifting) {
    const Query q = gen_checkerboard(2).query;
    const Query lifted = lift_query(q, 1);
    for (const auto& a : q.attributes())
        EXPECT_EQ(equivalence_classes(lifted, a).full_count(), equivalence_classes(q, a).full_count());
}

TEST(Adora, ValidPermutationOnTightFamily) {
    const auto tight = gen_adora_tight(3);
    const Query q({tight.relation});
    const auto sigma = adora(q);
    for (const auto& a : q.attributes()) {
        auto m = sigma.map(a);
        std::sort(m.begin(), m.end());
        for (std::uint64_t v = 0; v < m.size(); ++v) EXPECT_EQ(m[v], v);
    }
}

TEST(ClassSwitches, Examples) {
    const auto cb = gen_checkerboard(3);
    const auto id = DomainOrdering::identity(cb.query.attributes(), 3);
    for (const auto& a : cb.query.attributes()) {
        EXPECT_EQ(count_class_switches(cb.query, id, a), 7u);
        EXPECT_EQ(count_class_switches(cb.query, adora(cb.query), a), 1u);
    }
    const Query same({Relation("R", {"A", "B"}, 2, {{0, 1}, {1, 1}, {2, 1}, {3, 1}})});
    EXPECT_EQ(count_class_switches(same, DomainOrdering::identity({"A", "B"}, 2), "A"), 0u);
}

TEST(ClassCount, AtMostTwiceMinCoverPlusOne) {
    std::mt19937_64 rng(37);
    for (int it = 0; it < 20; ++it) {
        std::vector<Point> t;
        for (int i = 0; i < 6; ++i) t.push_back({rng() % 4, rng() % 4});
        const Query q({Relation("R", {"A", "B"}, 2, t)});
        std::map<std::string, std::vector<std::uint64_t>> maps;
        for (const char* a : {"A", "B"}) {
            std::vector<std::uint64_t> p{0, 1, 2, 3};
            for (std::size_t i = 4; i > 1; --i) std::swap(p[i - 1], p[rng() % i]);
            maps[a] = p;
        }
        const std::size_t k = min_query_cover(apply_ordering(q, DomainOrdering(2, maps)));
        for (const char* a : {"A", "B"}) EXPECT_LE(equivalence_classes(q, a).full_count(), 2 * k + 1);
    }
}

TEST(GridCover, CheckerboardIsSixDyadicBoxes) {
    const auto cb = gen_checkerboard(3);
    const auto g = grid_cover(cb.query, adora(cb.query));
    EXPECT_EQ(g.general_count(), 6u);
    EXPECT_EQ(g.dyadic_count(), 6u);
}

TEST(GridCover, PairedColumnsHaveFourGapCells) {
    const Query q({kPaired});
    const auto g = grid_cover(q, DomainOrdering::identity(q.attributes(), 2));
    EXPECT_EQ(g.general_count(), 4u);
}

TEST(GridCover, FullRelationHasNoBoxes) {
    std::vector<Point> all;
    for (std::uint64_t a = 0; a < 4; ++a)
        for (std::uint64_t b = 0; b < 4; ++b) all.push_back({a, b});
    const Query q({Relation("R", {"A", "B"}, 2, all)});
    EXPECT_EQ(grid_cover(q, adora(q)).general_count(), 0u);
}

TEST(GridCover, CoversExactlyTheComplement) {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 30; ++it) {
        std::vector<Point> r, s;
        for (int i = 0; i < 7; ++i) r.push_back({rng() % 4, rng() % 4});
        for (int i = 0; i < 7; ++i) s.push_back({rng() % 4, rng() % 4});
        const Query q({Relation("R", {"A", "B"}, 2, r), Relation("S", {"B", "C"}, 2, s)});
        const auto sigma = adora(q);
        const Query reordered = apply_ordering(q, sigma);
        const auto g = grid_cover(q, sigma);
        ASSERT_EQ(g.parts.size(), 2u);
        for (std::size_t ri = 0; ri < 2; ++ri) {
            const Relation& rel = reordered.relations()[ri];
            for (std::uint64_t x = 0; x < 4; ++x)
                for (std::uint64_t y = 0; y < 4; ++y) {
                    int general = 0, dyadic = 0;
                    for (const auto& b : g.parts[ri].gap_boxes) general += b.contains(Point{x, y});
                    for (const auto& b : g.parts[ri].dyadic) dyadic += dyadic_contains(b, {x, y}, 2);
                    EXPECT_EQ(general > 0, !rel.contains({x, y}));
                    EXPECT_EQ(dyadic > 0, !rel.contains({x, y}));
                }
        }
    }
}

TEST(GridCover, RejectsOrderingThatSplitsAClass) {
    const Query q = gen_checkerboard(2).query;
    EXPECT_THROW(grid_cover(q, DomainOrdering::identity(q.attributes(), 2)), Error);
}
