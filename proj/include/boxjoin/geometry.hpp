#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace boxjoin {

// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxBitWidth = 62;

// Throws unless 1 <= d <= kMaxBitWidth.
void check_bit_width(int d);

// One coordinate per attribute; each value lies in [0, 2^d).
using Point = std::vector<std::uint64_t>;

// A bit prefix of length 0..d. The bits are kept right-aligned, so the
// prefix "01" is {bits = 1, len = 2} and "*" is {0, 0}.
struct Prefix {
    std::uint64_t bits = 0;
    int len = 0;

    static Prefix star() { return {}; }
    static Prefix of_value(std::uint64_t value, int d) { return {value, d}; }
    // Parses "010" or "*".
    static Prefix parse(std::string_view text);

    bool is_star() const { return len == 0; }
    Prefix parent() const { return {bits >> 1, len - 1}; }
    Prefix child(unsigned bit) const { return {(bits << 1) | (bit & 1u), len + 1}; }
    Prefix flipped() const { return {bits ^ 1u, len}; }
    Prefix truncated(int new_len) const { return {bits >> (len - new_len), new_len}; }
    unsigned last_bit() const { return static_cast<unsigned>(bits & 1u); }

    // True when this prefix is a (non-strict) prefix of `other`.
    bool is_prefix_of(const Prefix& other) const {
        return len <= other.len && other.truncated(len).bits == bits;
    }
    bool matches(std::uint64_t value, int d) const {
        return len == 0 || (value >> (d - len)) == bits;
    }
    std::uint64_t lo(int d) const { return bits << (d - len); }
    std::uint64_t hi(int d) const { return lo(d) | ((std::uint64_t{1} << (d - len)) - 1); }

    std::string to_string() const;

    // Canonical order: shorter prefixes first, then by bit value.
    auto operator<=>(const Prefix& o) const {
        if (auto c = len <=> o.len; c != 0) return c;
        return bits <=> o.bits;
    }
    bool operator==(const Prefix&) const = default;
};

// A dyadic box: one prefix per attribute of its schema.
struct DyadicBox {
    std::vector<Prefix> prefixes;

    DyadicBox() = default;
    explicit DyadicBox(std::vector<Prefix> p) : prefixes(std::move(p)) {}

    static DyadicBox all_star(std::size_t arity) { return DyadicBox(std::vector<Prefix>(arity)); }
    static DyadicBox unit(const Point& p, int d);
    // Parses whitespace-separated prefixes, e.g. "01 *".
    static DyadicBox parse(std::string_view text);

    std::size_t arity() const { return prefixes.size(); }
    const Prefix& operator[](std::size_t i) const { return prefixes[i]; }
    Prefix& operator[](std::size_t i) { return prefixes[i]; }

    bool is_unit(int d) const;
    // Number of points, as a double so that large d does not overflow.
    double volume(int d) const;
    // Lexicographically least and greatest points.
    Point min_point(int d) const;
    Point max_point(int d) const;

    std::string to_string() const;

    auto operator<=>(const DyadicBox&) const = default;
    bool operator==(const DyadicBox&) const = default;
};

struct DyadicBoxHash {
    std::size_t operator()(const DyadicBox& b) const noexcept;
};

// A closed, non-empty integer interval per attribute.
struct Interval {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    auto operator<=>(const Interval&) const = default;
    bool operator==(const Interval&) const = default;
};

struct GeneralBox {
    std::vector<Interval> sides;

    GeneralBox() = default;
    explicit GeneralBox(std::vector<Interval> s) : sides(std::move(s)) {}

    static GeneralBox from_dyadic(const DyadicBox& b, int d);

    std::size_t arity() const { return sides.size(); }
    bool contains(const Point& p) const;
    bool contains(const GeneralBox& other) const;
    double volume() const;
    std::string to_string() const;

    auto operator<=>(const GeneralBox&) const = default;
    bool operator==(const GeneralBox&) const = default;
};

// Point containment under prefix semantics. Throws on arity mismatch.
bool dyadic_contains(const DyadicBox& b, const Point& p, int d);
// Box containment: true when `inner` is a subset of `outer`.
bool dyadic_contains(const DyadicBox& outer, const DyadicBox& inner);

// Every dyadic box containing b (all per-attribute truncations), b itself
// first and the all-star box last.
std::vector<DyadicBox> dyadic_superboxes(const DyadicBox& b);

// Number of superboxes, prod(len + 1); computed without enumerating.
std::size_t superbox_count(const DyadicBox& b);

// Calls f(box) for every superbox of b; stops early when f returns true and
// reports whether it did.
template <typename F>
bool for_each_superbox(const DyadicBox& b, F&& f) {
    DyadicBox cur = b;
    const std::size_t n = b.arity();
    // Odometer over the truncation length of every attribute.
    while (true) {
        if (f(static_cast<const DyadicBox&>(cur))) return true;
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (cur[i].len > 0) {
                cur[i] = cur[i].parent();
                break;
            }
            cur[i] = b[i];
        }
        if (i == n) return false;
    }
}

// Canonical dyadic decomposition of [lo, hi]: greedy largest aligned block
// from the left. At most 2d prefixes.
std::vector<Prefix> decompose_interval(std::uint64_t lo, std::uint64_t hi, int d);

// Disjoint dyadic boxes whose union is g.
std::vector<DyadicBox> decompose_general(const GeneralBox& g, int d);

// Sibling resolution along attribute `attr`: union on attr, intersection on
// all others. Absent when b1.attr and b2.attr are not siblings or when some
// other attribute has incomparable prefixes.
std::optional<DyadicBox> geometric_resolution(const DyadicBox& b1, const DyadicBox& b2,
                                              std::size_t attr);

// A set of dyadic boxes over a fixed arity with exact-membership lookups.
// Superbox queries probe each truncation of the query box. Every lookup,
// insertion and erasure bumps the probe counter.
class DyadicBoxIndex {
public:
    explicit DyadicBoxIndex(std::size_t arity = 0) : arity_(arity) {}

    std::size_t arity() const { return arity_; }
    std::size_t size() const { return boxes_.size(); }
    bool empty() const { return boxes_.empty(); }

    bool insert(const DyadicBox& b);
    bool erase(const DyadicBox& b);
    bool contains(const DyadicBox& b) const;

    // Stored boxes b' with b ⊆ b'.
    std::vector<DyadicBox> query_superboxes(const DyadicBox& b) const;
    // True when some stored box contains b.
    bool covers(const DyadicBox& b) const;

    // Stored boxes in canonical order.
    std::vector<DyadicBox> sorted() const;

    std::uint64_t probes() const { return probes_; }
    void reset_probes() { probes_ = 0; }

private:
    void check(const DyadicBox& b) const;

    std::size_t arity_;
    std::unordered_set<DyadicBox, DyadicBoxHash> boxes_;
    mutable std::uint64_t probes_ = 0;
};

// One line of the box dump format: "box <relation> <prefix>...".
std::string format_box_line(std::string_view relation, const DyadicBox& b);

}  // namespace boxjoin
