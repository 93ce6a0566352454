#include "boxjoin/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace boxjoin {

BoolMatrix::BoolMatrix(const std::vector<std::vector<int>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
    cells_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error("matrix rows have different lengths");
        for (int v : r) cells_.push_back(v ? 1 : 0);
    }
}

std::size_t BoolMatrix::row_ones(std::size_t r) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < cols_; ++c) n += get(r, c);
    return n;
}

std::size_t BoolMatrix::ones() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

BoolMatrix BoolMatrix::permuted(const std::vector<std::size_t>& row_order,
                                const std::vector<std::size_t>& col_order) const {
    BoolMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out.set(r, c, get(row_order[r], col_order[c]));
    return out;
}

BoolMatrix BoolMatrix::parse(std::string_view text) {
    std::vector<std::vector<int>> rows;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::vector<int> row;
        for (char ch : line) {
            if (ch == '0' || ch == '1') row.push_back(ch - '0');
            else if (ch != ' ' && ch != '\t' && ch != '\r') throw ParseError(line_no, "bad matrix cell '" + std::string(1, ch) + "'");
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(line_no, "row has " + std::to_string(row.size()) + " cells, expected " +
                                          std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    return BoolMatrix(rows);
}

std::string BoolMatrix::to_text() const {
    std::string s;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
        s += '\n';
    }
    return s;
}

namespace {

// Rotate right by one bit: even values land in [0, 2^{d-1}).
DomainOrdering parity_grouping(const std::vector<std::string>& attributes, int d) {
    const std::uint64_t size = std::uint64_t{1} << d;
    std::vector<std::uint64_t> m(size);
    for (std::uint64_t v = 0; v < size; ++v) m[v] = (v >> 1) | ((v & 1u) << (d - 1));
    std::map<std::string, std::vector<std::uint64_t>> maps;
    for (const auto& a : attributes) maps[a] = m;
    return DomainOrdering(d, std::move(maps));
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

bool bernoulli(std::mt19937_64& rng, double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

std::vector<std::vector<std::string>> random_schemas(std::mt19937_64& rng, const std::vector<std::size_t>& arities,
                                                     std::size_t attributes) {
    std::size_t pool = attributes;
    if (pool == 0) pool = arities.empty() ? 1 : *std::max_element(arities.begin(), arities.end()) + 1;
    if (pool > 26) throw Error("at most 26 attributes");
    std::vector<std::vector<std::string>> out;
    for (auto k : arities) {
        if (k == 0 || k > pool) throw Error("relation arity must be between 1 and the attribute count");
        std::vector<std::size_t> ids(pool);
        for (std::size_t i = 0; i < pool; ++i) ids[i] = i;
        // Partial Fisher-Yates, then keep pool order.
        for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + bounded(rng, pool - i)]);
        ids.resize(k);
        std::sort(ids.begin(), ids.end());
        std::vector<std::string> schema;
        for (auto id : ids) schema.push_back(std::string(1, static_cast<char>('A' + id)));
        out.push_back(std::move(schema));
    }
    return out;
}

}  // namespace

Checkerboard gen_checkerboard(int d) {
    check_bit_width(d);
    if (d > 20) throw Error("checkerboard needs d <= 20");
    const std::uint64_t size = std::uint64_t{1} << d;
    std::vector<Point> odd;
    for (std::uint64_t x = 0; x < size; ++x)
        for (std::uint64_t y = 0; y < size; ++y)
            if ((x + y) % 2 == 1) odd.push_back({x, y});
    Query q({Relation("R", {"A", "B"}, d, odd), Relation("S", {"B", "C"}, d, odd),
             Relation("T", {"A", "C"}, d, odd)});
    return {q, parity_grouping(q.attributes(), d)};
}

Query lift_query(const Query& q, int p) {
    if (p < 1) throw Error("lift needs p >= 1");
    const int d = q.bit_width();
    if (d + p > kMaxBitWidth) throw Error("lifted width " + std::to_string(d + p) + " exceeds " + std::to_string(kMaxBitWidth));
    std::vector<Relation> lifted;
    for (const auto& r : q.relations()) {
        lifted.emplace_back(r.name(), r.schema(), d + p, lift_points(r.tuples(), d, p));
    }
    return Query(std::move(lifted));
}

std::vector<Point> lift_points(const std::vector<Point>& points, int d, int p) {
    std::vector<Point> out;
    const std::uint64_t prefixes = std::uint64_t{1} << p;
    for (const auto& t : points) {
        std::vector<std::uint64_t> pre(t.size(), 0);
        while (true) {
            Point u(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) u[i] = (pre[i] << d) | t[i];
            out.push_back(std::move(u));
            std::size_t i = 0;
            for (; i < pre.size(); ++i) {
                if (++pre[i] < prefixes) break;
                pre[i] = 0;
            }
            if (i == pre.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

AdoraTight gen_adora_tight(int d) {
    if (d < 2) throw Error("R_d needs d >= 2");
    if (d > 12) throw Error("R_d needs d <= 12");
    const std::uint64_t half = std::uint64_t{1} << (d - 1);
    std::vector<Point> tuples;
    for (std::uint64_t top = 0; top < 2; ++top)
        for (std::uint64_t a = 0; a < half; ++a)
            for (std::uint64_t b = 0; b < half; ++b)
                if (a != b) tuples.push_back({top * half + a, top * half + b});
    Relation r("R", {"A", "B"}, d, tuples);
    // Rotate left by one bit: 0a -> a0 and 1a -> a1, so the new even
    // positions hold the old lower half.
    const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
    std::vector<std::uint64_t> m(mask + 1);
    for (std::uint64_t v = 0; v <= mask; ++v) m[v] = ((v << 1) & mask) | (v >> (d - 1));
    return {r, DomainOrdering(d, {{"A", m}, {"B", m}})};
}

Relation gen_many_maximal(std::uint64_t n) {
    if (n < 2 || (n & (n - 1)) != 0) throw Error("N must be a power of two >= 2, got " + std::to_string(n));
    int d = 0;
    while ((std::uint64_t{1} << d) < n) ++d;
    std::vector<Point> tuples;
    for (std::uint64_t i = 0; i < n / 2; ++i) {
        tuples.push_back({i, n / 2 - i - 1});
        tuples.push_back({n / 2 + i, n - i - 1});
    }
    return Relation("R", {"A", "B"}, d, tuples);
}

Relation matrix_to_relation(const BoolMatrix& m, const std::string& name) {
    int d = 1;
    while ((std::size_t{1} << d) < std::max(m.rows(), m.cols())) ++d;
    const std::size_t size = std::size_t{1} << d;
    std::vector<Point> tuples;
    for (std::size_t c = 0; c < size; ++c)
        for (std::size_t r = 0; r < size; ++r)
            if (r >= m.rows() || c >= m.cols() || !m.get(r, c)) tuples.push_back({c, r});
    return Relation(name, {"col", "row"}, d, tuples);
}

Reduction reduce_2cbmp(const BoolMatrix& m) {
    const std::size_t n = m.rows(), cols = m.cols();
    for (std::size_t r = 0; r < n; ++r)
        if (m.row_ones(r) > 2)
            throw Error("row " + std::to_string(r + 1) + " has " + std::to_string(m.row_ones(r)) + " ones; at most 2 allowed");
    BoolMatrix out(4 * n, cols + 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pad1 = cols + 2 * i, pad2 = pad1 + 1;
        out.set(4 * i, pad1, true);
        out.set(4 * i + 1, pad1, true);
        out.set(4 * i + 2, pad2, true);
        out.set(4 * i + 3, pad2, true);
        for (std::size_t c = 0; c < cols; ++c) {
            if (!m.get(i, c)) continue;
            out.set(4 * i + 1, c, true);
            out.set(4 * i + 2, c, true);
        }
    }
    return {out, matrix_to_relation(out, "M")};
}

Query gen_random(std::uint64_t seed, int d, const std::vector<std::size_t>& arities,
                 const std::vector<double>& densities, std::size_t attributes) {
    check_bit_width(d);
    if (densities.size() != 1 && densities.size() != arities.size())
        throw Error("give one density or one per relation");
    std::mt19937_64 rng(seed);
    const auto schemas = random_schemas(rng, arities, attributes);
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < arities.size(); ++i) {
        const double p = densities.size() == 1 ? densities[0] : densities[i];
        const std::size_t k = arities[i];
        if (static_cast<double>(k) * d > 24) throw Error("relation cube too large to enumerate");
        const std::uint64_t size = std::uint64_t{1} << d;
        std::vector<Point> tuples;
        Point t(k, 0);
        while (true) {
            if (bernoulli(rng, p)) tuples.push_back(t);
            std::size_t j = k;
            while (j-- > 0) {
                if (++t[j] < size) break;
                t[j] = 0;
            }
            if (j == static_cast<std::size_t>(-1)) break;
        }
        rels.emplace_back("R" + std::to_string(i + 1), schemas[i], d, std::move(tuples));
    }
    return Query(std::move(rels));
}

Query gen_random_sized(std::uint64_t seed, int d, const std::vector<std::size_t>& arities,
                       std::size_t tuples_per_relation, std::size_t attributes) {
    check_bit_width(d);
    std::mt19937_64 rng(seed);
    const auto schemas = random_schemas(rng, arities, attributes);
    const std::uint64_t size = std::uint64_t{1} << d;
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < arities.size(); ++i) {
        const std::size_t k = arities[i];
        const double cube = std::pow(static_cast<double>(size), static_cast<double>(k));
        if (static_cast<double>(tuples_per_relation) > cube / 2)
            throw Error("requested tuples exceed half the relation cube");
        std::vector<Point> tuples;
        tuples.reserve(tuples_per_relation + tuples_per_relation / 8);
        while (true) {
            while (tuples.size() < tuples_per_relation + tuples_per_relation / 8 + 16) {
                Point t(k);
                for (auto& v : t) v = bounded(rng, size);
                tuples.push_back(std::move(t));
            }
            std::sort(tuples.begin(), tuples.end());
            tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
            if (tuples.size() >= tuples_per_relation) break;
        }
        // Drop a seeded sample of the surplus so the count is exact.
        for (std::size_t j = tuples.size(); j > 1; --j) std::swap(tuples[j - 1], tuples[bounded(rng, j)]);
        tuples.resize(tuples_per_relation);
        rels.emplace_back("R" + std::to_string(i + 1), schemas[i], d, std::move(tuples));
    }
    return Query(std::move(rels));
}

}  // namespace boxjoin
