#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boxjoin/coverkit.hpp"
#include "boxjoin/geometry.hpp"
#include "boxjoin/instances.hpp"
#include "boxjoin/relational.hpp"

namespace boxjoin {

// Raised when an exhaustive search would exceed its limits. The message
// names the limit.
class LimitError : public Error {
public:
    using Error::Error;
};

struct OracleLimits {
    int max_d = 4;
    std::size_t max_attributes = 6;
    std::uint64_t max_points = std::uint64_t{1} << 16;  // cube points
    std::size_t max_tuples = 4096;
    std::uint64_t max_permutations = 2'000'000;
    double time_budget_s = 600.0;

    void check_relation(const Relation& r) const;
    void check_query(const Query& q) const;
};

// Wall-clock guard for long searches.
class Deadline {
public:
    explicit Deadline(double seconds);
    void check() const;

private:
    std::chrono::steady_clock::time_point end_;
    double seconds_;
};

// Nested-loop natural join; sorted output over the query's attributes.
std::vector<Point> brute_join(const Query& q, const OracleLimits& limits = {});

// Every dyadic gap box of r that is not contained in a larger dyadic gap box.
std::vector<DyadicBox> enumerate_maximal_dyadic_gap_boxes(const Relation& r, const OracleLimits& limits = {});

// Every interval-product gap box of r not strictly inside another gap box.
std::vector<GeneralBox> enumerate_maximal_general_gap_boxes(const Relation& r, const OracleLimits& limits = {});

// Minimum set cover: indices of the chosen sets, or nothing when some
// element of [0, universe) lies in no set.
std::optional<std::vector<std::size_t>> exact_set_cover(std::size_t universe,
                                                        const std::vector<std::vector<std::size_t>>& sets,
                                                        const Deadline& deadline);

struct MinCover {
    std::size_t size = 0;
    std::vector<GeneralBox> boxes;
};
// Minimum general box cover of the complement of r.
MinCover min_box_cover(const Relation& r, const OracleLimits& limits = {});
// Sum of min_box_cover over the relations of q.
std::size_t min_query_cover(const Query& q, const OracleLimits& limits = {});

struct OrderingSearch {
    std::size_t k = 0;
    DomainOrdering sigma;
    std::uint64_t orderings_tried = 0;
};
// Minimum summed cover over every per-attribute permutation (2^d <= 4).
// fast_symmetry pins sigma_A(0) = 0, which is not exact in general.
OrderingSearch min_cover_over_orderings(const Query& q, const OracleLimits& limits = {},
                                        bool fast_symmetry = false);

// Per-relation general gap boxes.
struct GeneralBoxCover {
    struct Part {
        std::string relation;
        std::vector<GeneralBox> boxes;
    };
    std::vector<Part> parts;
    std::size_t size() const;
    static GeneralBoxCover from_dyadic(const BoxCover& b, int d);
};

struct MinCertificate {
    std::size_t size = 0;
    // (part index, box index) of each chosen box.
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
};
// Fewest boxes of b whose extensions cover every non-output point of the cube.
MinCertificate min_certificate(const Query& q, const GeneralBoxCover& b, const OracleLimits& limits = {});
MinCertificate min_certificate(const Query& q, const BoxCover& b, const OracleLimits& limits = {});
// Minimum certificate over all covers: every maximal general gap box is a
// candidate.
std::size_t query_certificate_size(const Query& q, const OracleLimits& limits = {});

// No extended box of b contains both points.
bool independent(const Query& q, const BoxCover& b, const Point& o1, const Point& o2);

// Sum over rows of the maximal runs of ones.
std::size_t consecutive_blocks(const BoolMatrix& m);
struct ColumnOrder {
    std::size_t k = 0;
    std::vector<std::size_t> order;  // original column at each position
};
// Exhaustive over column permutations; at most 8 columns.
ColumnOrder min_cb_over_columns(const BoolMatrix& m);

// Fewest all-ones rectangles covering the ones of m after the best row and
// column permutation. Exact search over all-ones submatrices whose row sets
// and column sets admit consecutive orders.
std::size_t min_matrix_cover_over_orders(const BoolMatrix& m, const OracleLimits& limits = {});
// Same value by trying every row and column permutation; tiny matrices only.
std::size_t min_matrix_cover_brute(const BoolMatrix& m, const OracleLimits& limits = {});

// True when some order of [0, n) makes every set consecutive (sets as
// bitmasks over at most 64 elements).
bool has_consecutive_order(const std::vector<std::uint64_t>& sets, std::size_t n);

// semijoin_reduce against brute_join.
Query semijoin_reduce(const Query& q, const OracleLimits& limits);

}  // namespace boxjoin
