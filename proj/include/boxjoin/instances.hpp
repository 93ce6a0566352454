#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boxjoin/relational.hpp"

namespace boxjoin {

// Dense 0/1 matrix. Text form: one row per line, cells as '0'/'1' with
// optional spaces.
class BoolMatrix {
public:
    BoolMatrix() = default;
    BoolMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}
    explicit BoolMatrix(const std::vector<std::vector<int>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c] != 0; }
    void set(std::size_t r, std::size_t c, bool v) { cells_[r * cols_ + c] = v ? 1 : 0; }
    std::size_t row_ones(std::size_t r) const;
    std::size_t ones() const;

    BoolMatrix permuted(const std::vector<std::size_t>& row_order, const std::vector<std::size_t>& col_order) const;

    static BoolMatrix parse(std::string_view text);
    std::string to_text() const;

    bool operator==(const BoolMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

// Triangle R(A,B), S(B,C), T(A,C) holding the odd-sum pairs, plus the
// ordering that sends even values to the lower half of the domain.
struct Checkerboard {
    Query query;
    DomainOrdering sigma;
};
Checkerboard gen_checkerboard(int d);

// Prepends p free bits to every value: each tuple t becomes the 2^{arity p}
// tuples <p_A t.A, ...>.
Query lift_query(const Query& q, int p);
// The same map on points over n attributes of width d.
std::vector<Point> lift_points(const std::vector<Point>& points, int d, int p);

// R_d(A,B) = {<0a,0b>} u {<1a,1b>} with a != b, and the ordering that
// interleaves the two halves (old 0a lands on 2a, old 1a on 2a+1).
struct AdoraTight {
    Relation relation;
    DomainOrdering sigma;
};
AdoraTight gen_adora_tight(int d);

// The two anti-diagonal stripes over an N x N grid; N must be a power of two.
Relation gen_many_maximal(std::uint64_t n);

// Relation over (col, row) whose tuples are the 0-cells of m, padded with
// 0-cells up to a 2^d x 2^d grid.
Relation matrix_to_relation(const BoolMatrix& m, const std::string& name = "M");

struct Reduction {
    BoolMatrix matrix;
    Relation relation;
};
// Each row r_i of m (at most two ones) becomes four rows p_{i,1}, r_{i,1},
// r_{i,2}, p_{i,2} over m.cols() + 2 n columns.
Reduction reduce_2cbmp(const BoolMatrix& m);

// Random query: relation i has arities[i] attributes drawn from a pool of
// `attributes` names and holds each cube point with probability
// densities[i] (a single density applies to all).
Query gen_random(std::uint64_t seed, int d, const std::vector<std::size_t>& arities,
                 const std::vector<double>& densities, std::size_t attributes = 0);

// Random query with a fixed number of distinct tuples per relation, for
// domains too large to enumerate.
Query gen_random_sized(std::uint64_t seed, int d, const std::vector<std::size_t>& arities,
                       std::size_t tuples_per_relation, std::size_t attributes = 0);

}  // namespace boxjoin
