#include "boxjoin/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace boxjoin {

namespace {

std::uint64_t cube_points(int d, std::size_t n) {
    const int bits = d * static_cast<int>(n);
    if (bits >= 63) return ~std::uint64_t{0};
    return std::uint64_t{1} << bits;
}

// Mixed-radix enumeration of the points of a box given by per-attribute
// intervals.
template <typename F>
void for_each_point(const std::vector<Interval>& sides, F&& f) {
    Point p(sides.size());
    for (std::size_t i = 0; i < sides.size(); ++i) p[i] = sides[i].lo;
    while (true) {
        f(static_cast<const Point&>(p));
        std::size_t i = sides.size();
        while (i-- > 0) {
            if (p[i] < sides[i].hi) {
                ++p[i];
                break;
            }
            p[i] = sides[i].lo;
        }
        if (i == static_cast<std::size_t>(-1)) return;
    }
}

std::uint64_t point_code(const Point& p, int d) {
    std::uint64_t code = 0;
    for (auto v : p) code = (code << d) | v;
    return code;
}

std::vector<Interval> full_sides(std::size_t n, int d) {
    return std::vector<Interval>(n, Interval{0, (std::uint64_t{1} << d) - 1});
}

using Bits = std::vector<std::uint64_t>;

inline bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1u; }
inline void set_bit(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

bool subset_of(const Bits& a, const Bits& b) {
    for (std::size_t w = 0; w < a.size(); ++w)
        if (a[w] & ~b[w]) return false;
    return true;
}

std::size_t popcount_and(const Bits& a, const Bits& b) {
    std::size_t n = 0;
    for (std::size_t w = 0; w < a.size(); ++w) n += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    return n;
}

bool any(const Bits& a) {
    for (auto w : a)
        if (w) return true;
    return false;
}

class SetCoverSolver {
public:
    SetCoverSolver(std::size_t universe, std::vector<Bits> sets, std::vector<std::size_t> ids, const Deadline& deadline)
        : universe_(universe), words_((universe + 63) / 64), sets_(std::move(sets)), ids_(std::move(ids)),
          deadline_(deadline) {
        containing_.resize(universe_);
        for (std::size_t s = 0; s < sets_.size(); ++s)
            for (std::size_t e = 0; e < universe_; ++e)
                if (test(sets_[s], e)) containing_[e].push_back(s);
        neighbourhood_.assign(universe_, Bits(words_, 0));
        for (std::size_t e = 0; e < universe_; ++e)
            for (auto s : containing_[e])
                for (std::size_t w = 0; w < words_; ++w) neighbourhood_[e][w] |= sets_[s][w];
        by_degree_.resize(universe_);
        std::iota(by_degree_.begin(), by_degree_.end(), std::size_t{0});
        std::stable_sort(by_degree_.begin(), by_degree_.end(), [&](std::size_t a, std::size_t b) {
            return containing_[a].size() < containing_[b].size();
        });
    }

    std::vector<std::size_t> solve() {
        Bits uncovered(words_, 0);
        for (std::size_t e = 0; e < universe_; ++e) set_bit(uncovered, e);
        best_ = greedy(uncovered);
        dfs(uncovered);
        std::vector<std::size_t> out;
        for (auto s : best_) out.push_back(ids_[s]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<std::size_t> greedy(Bits uncovered) const {
        std::vector<std::size_t> chosen;
        while (any(uncovered)) {
            std::size_t pick = 0, gain = 0;
            for (std::size_t s = 0; s < sets_.size(); ++s) {
                const auto g = popcount_and(sets_[s], uncovered);
                if (g > gain) gain = g, pick = s;
            }
            chosen.push_back(pick);
            for (std::size_t w = 0; w < words_; ++w) uncovered[w] &= ~sets_[pick][w];
        }
        return chosen;
    }

    // Elements no two of which share a set: each needs its own set.
    std::size_t lower_bound(const Bits& uncovered) const {
        Bits blocked(words_, 0);
        std::size_t lb = 0;
        for (auto e : by_degree_) {
            if (!test(uncovered, e) || test(blocked, e)) continue;
            ++lb;
            for (std::size_t w = 0; w < words_; ++w) blocked[w] |= neighbourhood_[e][w];
        }
        return lb;
    }

    void dfs(const Bits& uncovered) {
        if ((++nodes_ & 1023) == 0) deadline_.check();
        if (!any(uncovered)) {
            if (chosen_.size() < best_.size()) best_ = chosen_;
            return;
        }
        if (chosen_.size() + lower_bound(uncovered) >= best_.size()) return;
        std::size_t pivot = universe_;
        for (auto e : by_degree_) {
            if (test(uncovered, e)) {
                pivot = e;
                break;
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> options;
        for (auto s : containing_[pivot]) options.emplace_back(popcount_and(sets_[s], uncovered), s);
        std::stable_sort(options.begin(), options.end(), [](auto& a, auto& b) { return a.first > b.first; });
        Bits next(words_);
        for (const auto& [gain, s] : options) {
            for (std::size_t w = 0; w < words_; ++w) next[w] = uncovered[w] & ~sets_[s][w];
            chosen_.push_back(s);
            dfs(next);
            chosen_.pop_back();
        }
    }

    std::size_t universe_;
    std::size_t words_;
    std::vector<Bits> sets_;
    std::vector<std::size_t> ids_;
    const Deadline& deadline_;
    std::vector<std::vector<std::size_t>> containing_;
    std::vector<Bits> neighbourhood_;
    std::vector<std::size_t> by_degree_;
    std::vector<std::size_t> best_;
    std::vector<std::size_t> chosen_;
    std::uint64_t nodes_ = 0;
};

// Dense counts of tuples, queried by inclusion-exclusion over prefix sums.
class PrefixCounts {
public:
    PrefixCounts(const Relation& r) : n_(r.arity()), side_((std::uint64_t{1} << r.bit_width()) + 1) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n_; ++i) total *= side_;
        sums_.assign(total, 0);
        for (const auto& t : r.tuples()) {
            std::size_t idx = 0;
            for (std::size_t i = 0; i < n_; ++i) idx = idx * side_ + (t[i] + 1);
            ++sums_[idx];
        }
        std::size_t stride = 1;
        for (std::size_t dim = n_; dim-- > 0;) {
            for (std::size_t idx = 0; idx < total; ++idx)
                if ((idx / stride) % side_ != 0) sums_[idx] += sums_[idx - stride];
            stride *= side_;
        }
    }

    std::uint32_t count(const std::vector<Interval>& sides) const {
        std::int64_t total = 0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n_); ++mask) {
            std::size_t idx = 0;
            bool zero = false;
            for (std::size_t i = 0; i < n_; ++i) {
                const bool low = (mask >> i) & 1u;
                const std::uint64_t coord = low ? sides[i].lo : sides[i].hi + 1;
                if (coord == 0) zero = true;
                idx = idx * side_ + coord;
            }
            if (zero) continue;
            const std::int64_t v = sums_[idx];
            total += (std::popcount(mask) % 2 == 0) ? v : -v;
        }
        return static_cast<std::uint32_t>(total);
    }

private:
    std::size_t n_;
    std::size_t side_;
    std::vector<std::uint32_t> sums_;
};

std::optional<std::size_t> relation_index(const Query& q, const std::string& name) {
    for (std::size_t i = 0; i < q.relations().size(); ++i)
        if (q.relations()[i].name() == name) return i;
    return std::nullopt;
}

}  // namespace

void OracleLimits::check_relation(const Relation& r) const {
    if (r.bit_width() > max_d)
        throw LimitError("bit width " + std::to_string(r.bit_width()) + " exceeds limit-d " + std::to_string(max_d));
    if (r.arity() > max_attributes)
        throw LimitError("arity " + std::to_string(r.arity()) + " exceeds limit-attributes " + std::to_string(max_attributes));
    if (cube_points(r.bit_width(), r.arity()) > max_points)
        throw LimitError("cube of " + r.name() + " exceeds limit-points " + std::to_string(max_points));
    if (r.size() > max_tuples)
        throw LimitError(std::to_string(r.size()) + " tuples exceed limit-tuples " + std::to_string(max_tuples));
}

void OracleLimits::check_query(const Query& q) const {
    for (const auto& r : q.relations()) check_relation(r);
    if (q.attribute_count() > max_attributes)
        throw LimitError(std::to_string(q.attribute_count()) + " attributes exceed limit-attributes " +
                         std::to_string(max_attributes));
    if (cube_points(q.bit_width(), q.attribute_count()) > max_points)
        throw LimitError("output cube exceeds limit-points " + std::to_string(max_points));
    if (q.total_tuples() > max_tuples)
        throw LimitError(std::to_string(q.total_tuples()) + " tuples exceed limit-tuples " + std::to_string(max_tuples));
}

Deadline::Deadline(double seconds)
    : end_(std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds))),
      seconds_(seconds) {}

void Deadline::check() const {
    if (std::chrono::steady_clock::now() > end_)
        throw LimitError("search exceeded the time budget of " + std::to_string(seconds_) + " s");
}

std::vector<Point> brute_join(const Query& q, const OracleLimits& limits) {
    limits.check_query(q);
    const std::size_t n = q.attribute_count();
    std::vector<std::uint64_t> value(n, 0);
    std::vector<int> bound(n, 0);  // binding depth count
    std::vector<Point> out;

    auto rec = [&](auto&& self, std::size_t ri) -> void {
        if (ri == q.relations().size()) {
            out.push_back(value);
            return;
        }
        const auto& pos = q.positions(ri);
        for (const auto& t : q.relations()[ri].tuples()) {
            bool ok = true;
            for (std::size_t i = 0; i < pos.size() && ok; ++i)
                if (bound[pos[i]] && value[pos[i]] != t[i]) ok = false;
            if (!ok) continue;
            for (std::size_t i = 0; i < pos.size(); ++i) {
                if (bound[pos[i]]++ == 0) value[pos[i]] = t[i];
            }
            self(self, ri + 1);
            for (std::size_t i = 0; i < pos.size(); ++i) --bound[pos[i]];
        }
    };
    if (!q.relations().empty()) rec(rec, 0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<DyadicBox> enumerate_maximal_dyadic_gap_boxes(const Relation& r, const OracleLimits& limits) {
    limits.check_relation(r);
    const int d = r.bit_width();
    std::vector<Prefix> all;
    for (int len = 0; len <= d; ++len)
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) all.push_back({bits, len});

    auto is_gap = [&](const DyadicBox& b) {
        for (const auto& t : r.tuples())
            if (dyadic_contains(b, t, d)) return false;
        return true;
    };

    std::vector<DyadicBox> out;
    std::vector<std::size_t> idx(r.arity(), 0);
    while (true) {
        DyadicBox b;
        for (auto i : idx) b.prefixes.push_back(all[i]);
        if (is_gap(b)) {
            bool maximal = true;
            for (std::size_t a = 0; a < b.arity() && maximal; ++a) {
                if (b[a].is_star()) continue;
                DyadicBox up = b;
                up[a] = b[a].parent();
                if (is_gap(up)) maximal = false;
            }
            if (maximal) out.push_back(b);
        }
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < all.size()) break;
            idx[i] = 0;
        }
        if (i == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<GeneralBox> enumerate_maximal_general_gap_boxes(const Relation& r, const OracleLimits& limits) {
    limits.check_relation(r);
    const std::uint64_t size = std::uint64_t{1} << r.bit_width();
    std::vector<Interval> intervals;
    for (std::uint64_t lo = 0; lo < size; ++lo)
        for (std::uint64_t hi = lo; hi < size; ++hi) intervals.push_back({lo, hi});
    double products = 1;
    for (std::size_t i = 0; i < r.arity(); ++i) products *= static_cast<double>(intervals.size());
    if (products > 5e7) throw LimitError("too many interval products for limit-points");

    const PrefixCounts counts(r);
    std::vector<GeneralBox> out;
    std::vector<std::size_t> idx(r.arity(), 0);
    std::vector<Interval> sides(r.arity());
    while (true) {
        for (std::size_t i = 0; i < idx.size(); ++i) sides[i] = intervals[idx[i]];
        if (counts.count(sides) == 0) {
            bool maximal = true;
            for (std::size_t a = 0; a < sides.size() && maximal; ++a) {
                const Interval keep = sides[a];
                if (keep.lo > 0) {
                    sides[a].lo = keep.lo - 1;
                    if (counts.count(sides) == 0) maximal = false;
                    sides[a] = keep;
                }
                if (maximal && keep.hi + 1 < size) {
                    sides[a].hi = keep.hi + 1;
                    if (counts.count(sides) == 0) maximal = false;
                    sides[a] = keep;
                }
            }
            if (maximal) out.emplace_back(sides);
        }
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < intervals.size()) break;
            idx[i] = 0;
        }
        if (i == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::vector<std::size_t>> exact_set_cover(std::size_t universe,
                                                        const std::vector<std::vector<std::size_t>>& sets,
                                                        const Deadline& deadline) {
    if (universe == 0) return std::vector<std::size_t>{};
    const std::size_t words = (universe + 63) / 64;
    std::vector<Bits> bits;
    for (const auto& s : sets) {
        Bits b(words, 0);
        for (auto e : s) {
            if (e >= universe) throw Error("set element out of range");
            set_bit(b, e);
        }
        bits.push_back(std::move(b));
    }
    Bits reach(words, 0);
    for (const auto& b : bits)
        for (std::size_t w = 0; w < words; ++w) reach[w] |= b[w];
    for (std::size_t e = 0; e < universe; ++e)
        if (!test(reach, e)) return std::nullopt;

    // Drop empty sets and sets inside another (ties keep the first).
    std::vector<std::size_t> order(bits.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> sizes(bits.size());
    for (std::size_t s = 0; s < bits.size(); ++s) sizes[s] = popcount_and(bits[s], bits[s]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
    std::vector<Bits> kept;
    std::vector<std::size_t> ids;
    for (auto s : order) {
        if (sizes[s] == 0) continue;
        bool dominated = false;
        for (const auto& k : kept) {
            if (subset_of(bits[s], k)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        kept.push_back(bits[s]);
        ids.push_back(s);
    }
    SetCoverSolver solver(universe, std::move(kept), std::move(ids), deadline);
    return solver.solve();
}

MinCover min_box_cover(const Relation& r, const OracleLimits& limits) {
    limits.check_relation(r);
    const Deadline deadline(limits.time_budget_s);
    const int d = r.bit_width();
    const auto candidates = enumerate_maximal_general_gap_boxes(r, limits);

    std::unordered_map<std::uint64_t, std::size_t> element;
    std::unordered_set<std::uint64_t> tuples;
    for (const auto& t : r.tuples()) tuples.insert(point_code(t, d));
    for_each_point(full_sides(r.arity(), d), [&](const Point& p) {
        const auto code = point_code(p, d);
        if (!tuples.count(code)) element.emplace(code, element.size());
    });
    std::vector<std::vector<std::size_t>> sets;
    for (const auto& b : candidates) {
        std::vector<std::size_t> s;
        for_each_point(b.sides, [&](const Point& p) { s.push_back(element.at(point_code(p, d))); });
        sets.push_back(std::move(s));
    }
    const auto chosen = exact_set_cover(element.size(), sets, deadline);
    if (!chosen) throw Error("maximal gap boxes do not cover the complement");
    MinCover out;
    out.size = chosen->size();
    for (auto i : *chosen) out.boxes.push_back(candidates[i]);
    return out;
}

std::size_t min_query_cover(const Query& q, const OracleLimits& limits) {
    std::size_t k = 0;
    for (const auto& r : q.relations()) k += min_box_cover(r, limits).size;
    return k;
}

OrderingSearch min_cover_over_orderings(const Query& q, const OracleLimits& limits, bool fast_symmetry) {
    limits.check_query(q);
    const int d = q.bit_width();
    if (d > 2) throw LimitError("ordering search needs 2^d <= 4 (limit-d for orderings is 2), got d = " + std::to_string(d));
    const Deadline deadline(limits.time_budget_s);
    const std::uint64_t size = std::uint64_t{1} << d;

    std::vector<std::vector<std::uint64_t>> perms;
    std::vector<std::uint64_t> p(size);
    std::iota(p.begin(), p.end(), std::uint64_t{0});
    do {
        if (!fast_symmetry || p[0] == 0) perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));

    const std::size_t n = q.attribute_count();
    double combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= static_cast<double>(perms.size());
    if (combos > static_cast<double>(limits.max_permutations))
        throw LimitError(std::to_string(static_cast<std::uint64_t>(combos)) + " orderings exceed limit-permutations " +
                         std::to_string(limits.max_permutations));

    std::vector<std::unordered_map<std::uint64_t, std::size_t>> memo(q.relations().size());
    auto relation_cover = [&](std::size_t ri, const std::vector<std::size_t>& choice) {
        const auto& pos = q.positions(ri);
        std::uint64_t key = 0;
        for (auto a : pos) key = key * perms.size() + choice[a];
        auto it = memo[ri].find(key);
        if (it != memo[ri].end()) return it->second;
        const Relation& r = q.relations()[ri];
        std::vector<Point> moved;
        for (const auto& t : r.tuples()) {
            Point u(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) u[i] = perms[choice[pos[i]]][t[i]];
            moved.push_back(std::move(u));
        }
        const auto k = min_box_cover(Relation(r.name(), r.schema(), d, moved), limits).size;
        memo[ri].emplace(key, k);
        return k;
    };

    OrderingSearch best;
    best.k = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> choice(n, 0), best_choice(n, 0);
    while (true) {
        deadline.check();
        ++best.orderings_tried;
        std::size_t total = 0;
        for (std::size_t ri = 0; ri < q.relations().size() && total < best.k; ++ri) total += relation_cover(ri, choice);
        if (total < best.k) {
            best.k = total;
            best_choice = choice;
        }
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++choice[i] < perms.size()) break;
            choice[i] = 0;
        }
        if (i == n) break;
    }
    std::map<std::string, std::vector<std::uint64_t>> maps;
    for (std::size_t a = 0; a < n; ++a) maps[q.attributes()[a]] = perms[best_choice[a]];
    best.sigma = DomainOrdering(d, std::move(maps));
    return best;
}

std::size_t GeneralBoxCover::size() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.boxes.size();
    return n;
}

GeneralBoxCover GeneralBoxCover::from_dyadic(const BoxCover& b, int d) {
    GeneralBoxCover out;
    for (const auto& p : b.parts) {
        Part part{p.relation, {}};
        for (const auto& box : p.boxes) part.boxes.push_back(GeneralBox::from_dyadic(box, d));
        out.parts.push_back(std::move(part));
    }
    return out;
}

MinCertificate min_certificate(const Query& q, const GeneralBoxCover& b, const OracleLimits& limits) {
    limits.check_query(q);
    const Deadline deadline(limits.time_budget_s);
    const int d = q.bit_width();
    const std::size_t n = q.attribute_count();

    std::unordered_set<std::uint64_t> output;
    for (const auto& p : brute_join(q, limits)) output.insert(point_code(p, d));
    std::unordered_map<std::uint64_t, std::size_t> element;
    for_each_point(full_sides(n, d), [&](const Point& p) {
        const auto code = point_code(p, d);
        if (!output.count(code)) element.emplace(code, element.size());
    });

    std::vector<std::vector<std::size_t>> sets;
    std::vector<std::pair<std::size_t, std::size_t>> source;
    std::set<std::vector<Interval>> seen;
    for (std::size_t pi = 0; pi < b.parts.size(); ++pi) {
        const auto ri = relation_index(q, b.parts[pi].relation);
        if (!ri) throw Error("cover names unknown relation " + b.parts[pi].relation);
        const auto& pos = q.positions(*ri);
        for (std::size_t bi = 0; bi < b.parts[pi].boxes.size(); ++bi) {
            const auto& box = b.parts[pi].boxes[bi];
            if (box.arity() != pos.size()) throw Error("box " + box.to_string() + " does not fit " + b.parts[pi].relation);
            auto sides = full_sides(n, d);
            for (std::size_t i = 0; i < pos.size(); ++i) sides[pos[i]] = box.sides[i];
            if (!seen.insert(sides).second) continue;
            std::vector<std::size_t> s;
            bool covers_output = false;
            for_each_point(sides, [&](const Point& p) {
                auto it = element.find(point_code(p, d));
                if (it == element.end()) covers_output = true;
                else s.push_back(it->second);
            });
            if (covers_output) throw Error("box " + box.to_string() + " of " + b.parts[pi].relation + " is not a gap box");
            sets.push_back(std::move(s));
            source.emplace_back(pi, bi);
        }
    }
    const auto chosen = exact_set_cover(element.size(), sets, deadline);
    if (!chosen) throw Error("the cover does not cover every non-output point");
    MinCertificate out;
    out.size = chosen->size();
    for (auto i : *chosen) out.chosen.push_back(source[i]);
    return out;
}

MinCertificate min_certificate(const Query& q, const BoxCover& b, const OracleLimits& limits) {
    return min_certificate(q, GeneralBoxCover::from_dyadic(b, q.bit_width()), limits);
}

std::size_t query_certificate_size(const Query& q, const OracleLimits& limits) {
    GeneralBoxCover all;
    for (const auto& r : q.relations()) all.parts.push_back({r.name(), enumerate_maximal_general_gap_boxes(r, limits)});
    return min_certificate(q, all, limits).size;
}

bool independent(const Query& q, const BoxCover& b, const Point& o1, const Point& o2) {
    const int d = q.bit_width();
    for (const auto& part : b.parts) {
        const auto ri = relation_index(q, part.relation);
        if (!ri) throw Error("cover names unknown relation " + part.relation);
        const auto p1 = project(q, *ri, o1), p2 = project(q, *ri, o2);
        for (const auto& box : part.boxes)
            if (dyadic_contains(box, p1, d) && dyadic_contains(box, p2, d)) return false;
    }
    return true;
}

std::size_t consecutive_blocks(const BoolMatrix& m) {
    std::size_t blocks = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c) && (c == 0 || !m.get(r, c - 1))) ++blocks;
    return blocks;
}

ColumnOrder min_cb_over_columns(const BoolMatrix& m) {
    if (m.cols() > 8) throw LimitError("column search allows at most 8 columns, got " + std::to_string(m.cols()));
    std::vector<std::size_t> order(m.cols()), rows(m.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    ColumnOrder best{consecutive_blocks(m), order};
    do {
        const auto k = consecutive_blocks(m.permuted(rows, order));
        if (k < best.k) best = {k, order};
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

bool has_consecutive_order(const std::vector<std::uint64_t>& sets, std::size_t n) {
    if (n > 64) throw LimitError("consecutive-order test handles at most 64 elements");
    std::vector<std::uint64_t> family;
    for (auto s : sets)
        if (std::popcount(s) > 1) family.push_back(s);
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
    if (family.size() > 64) throw LimitError("consecutive-order test handles at most 64 sets");
    if (family.size() <= 1) return true;

    // Elements with equal membership go together; elements in no set are free.
    std::vector<std::uint64_t> sig;
    for (std::size_t e = 0; e < n; ++e) {
        std::uint64_t s = 0;
        for (std::size_t j = 0; j < family.size(); ++j)
            if ((family[j] >> e) & 1u) s |= std::uint64_t{1} << j;
        if (s) sig.push_back(s);
    }
    std::sort(sig.begin(), sig.end());
    sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
    const std::size_t k = sig.size();

    // Members of each set, counted in classes.
    std::vector<std::size_t> total(family.size(), 0);
    for (auto s : sig)
        for (std::size_t j = 0; j < family.size(); ++j) total[j] += (s >> j) & 1u;

    std::unordered_set<std::uint64_t> failed;
    auto rec = [&](auto&& self, std::uint64_t placed, std::uint64_t open, std::vector<std::size_t>& count) -> bool {
        if (std::popcount(placed) == static_cast<int>(k)) return true;
        if (failed.count(placed)) return false;
        for (std::size_t x = 0; x < k; ++x) {
            if ((placed >> x) & 1u) continue;
            if ((open & ~sig[x]) != 0) continue;  // would break an unfinished set
            std::uint64_t next_open = open;
            for (std::size_t j = 0; j < family.size(); ++j) {
                if (!((sig[x] >> j) & 1u)) continue;
                ++count[j];
                if (count[j] == total[j]) next_open &= ~(std::uint64_t{1} << j);
                else next_open |= std::uint64_t{1} << j;
            }
            const bool ok = self(self, placed | (std::uint64_t{1} << x), next_open, count);
            for (std::size_t j = 0; j < family.size(); ++j)
                if ((sig[x] >> j) & 1u) --count[j];
            if (ok) return true;
        }
        failed.insert(placed);
        return false;
    };
    std::vector<std::size_t> count(family.size(), 0);
    return rec(rec, 0, 0, count);
}

namespace {

// Rows and columns of the ones of m with zero lines dropped and duplicate
// lines merged; neither changes the reordered cover size.
struct ReducedMatrix {
    std::vector<std::uint64_t> row_masks;  // columns per row
    std::size_t cols = 0;
};

ReducedMatrix reduce_matrix(const BoolMatrix& m) {
    std::vector<std::vector<bool>> rows;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::vector<bool> row(m.cols());
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] = m.get(r, c);
        if (std::find(row.begin(), row.end(), true) == row.end()) continue;
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(std::move(row));
    }
    std::vector<std::vector<bool>> cols;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::vector<bool> col(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
        if (std::find(col.begin(), col.end(), true) == col.end()) continue;
        if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(std::move(col));
    }
    if (rows.size() > 64 || cols.size() > 64) throw LimitError("matrix search handles at most 64 distinct rows and columns");
    ReducedMatrix out;
    out.cols = cols.size();
    out.row_masks.assign(rows.size(), 0);
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (cols[c][r]) out.row_masks[r] |= std::uint64_t{1} << c;
    return out;
}

class MatrixCoverSearch {
public:
    MatrixCoverSearch(const ReducedMatrix& m, const Deadline& deadline) : m_(m), deadline_(deadline) {
        for (std::size_t r = 0; r < m.row_masks.size(); ++r)
            for (std::size_t c = 0; c < m.cols; ++c)
                if ((m.row_masks[r] >> c) & 1u) cells_.push_back({r, c});
        col_rows_.assign(m.cols, 0);
        for (std::size_t r = 0; r < m.row_masks.size(); ++r)
            for (std::size_t c = 0; c < m.cols; ++c)
                if ((m.row_masks[r] >> c) & 1u) col_rows_[c] |= std::uint64_t{1} << r;
        enumerate(0, 0, ~std::uint64_t{0});
        containing_.resize(cells_.size());
        for (std::size_t k = 0; k < rects_.size(); ++k)
            for (std::size_t i = 0; i < cells_.size(); ++i)
                if (inside(rects_[k], cells_[i])) containing_[i].push_back(k);
        for (auto& list : containing_)
            std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return area(rects_[a]) > area(rects_[b]);
            });
    }

    std::size_t solve() {
        if (cells_.empty()) return 0;
        std::vector<char> covered(cells_.size(), 0);
        for (std::size_t limit = lower_bound(covered);; ++limit) {
            limit_ = limit;
            if (dfs(covered, 0)) return limit;
        }
    }

private:
    struct Cell {
        std::size_t r, c;
    };
    struct Rect {
        std::uint64_t rows, cols;
    };

    static bool inside(const Rect& x, const Cell& c) { return ((x.rows >> c.r) & 1u) && ((x.cols >> c.c) & 1u); }
    static int area(const Rect& x) { return std::popcount(x.rows) * std::popcount(x.cols); }

    // Every all-ones submatrix: column sets in increasing order, then every
    // non-empty subset of their common rows.
    void enumerate(std::size_t from, std::uint64_t cols, std::uint64_t common) {
        for (std::size_t c = from; c < m_.cols; ++c) {
            const std::uint64_t rows = common & col_rows_[c];
            if (!rows) continue;
            const std::uint64_t next_cols = cols | (std::uint64_t{1} << c);
            for (std::uint64_t sub = rows; sub; sub = (sub - 1) & rows) {
                rects_.push_back({sub, next_cols});
                if (rects_.size() > 2'000'000) throw LimitError("too many all-ones submatrices for the matrix search");
            }
            enumerate(c + 1, next_cols, rows);
        }
    }

    // Cells no two of which fit in one all-ones submatrix.
    std::size_t lower_bound(const std::vector<char>& covered) const {
        std::vector<std::size_t> picked;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (covered[i]) continue;
            bool free = true;
            for (auto j : picked) {
                const auto &a = cells_[i], &b = cells_[j];
                if (((m_.row_masks[a.r] >> b.c) & 1u) && ((m_.row_masks[b.r] >> a.c) & 1u)) {
                    free = false;
                    break;
                }
            }
            if (free) picked.push_back(i);
        }
        return picked.size();
    }

    bool feasible(std::vector<std::uint64_t>& family, std::uint64_t add, std::size_t n) {
        family.push_back(add);
        std::vector<std::uint64_t> key = family;
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        auto it = c1p_cache_.find(key);
        bool ok;
        if (it != c1p_cache_.end()) ok = it->second;
        else ok = c1p_cache_.emplace(key, has_consecutive_order(key, n)).first->second;
        family.pop_back();
        return ok;
    }

    bool dfs(std::vector<char>& covered, std::size_t used) {
        if ((++nodes_ & 255) == 0) deadline_.check();
        std::size_t pivot = cells_.size();
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (!covered[i] && (pivot == cells_.size() || containing_[i].size() < containing_[pivot].size())) pivot = i;
        if (pivot == cells_.size()) return true;
        if (used + lower_bound(covered) > limit_) return false;
        for (auto k : containing_[pivot]) {
            const Rect& x = rects_[k];
            if (!feasible(row_family_, x.rows, m_.row_masks.size())) continue;
            if (!feasible(col_family_, x.cols, m_.cols)) continue;
            std::vector<std::size_t> newly;
            for (std::size_t i = 0; i < cells_.size(); ++i)
                if (!covered[i] && inside(x, cells_[i])) newly.push_back(i);
            for (auto i : newly) covered[i] = 1;
            row_family_.push_back(x.rows);
            col_family_.push_back(x.cols);
            const bool ok = dfs(covered, used + 1);
            row_family_.pop_back();
            col_family_.pop_back();
            for (auto i : newly) covered[i] = 0;
            if (ok) return true;
        }
        return false;
    }

    struct VecHash {
        std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
            std::size_t h = v.size();
            for (auto x : v) h = h * 0x9E3779B97F4A7C15ull ^ (x + (h >> 7));
            return h;
        }
    };

    const ReducedMatrix& m_;
    const Deadline& deadline_;
    std::vector<Cell> cells_;
    std::vector<std::uint64_t> col_rows_;
    std::vector<Rect> rects_;
    std::vector<std::vector<std::size_t>> containing_;
    std::vector<std::uint64_t> row_family_, col_family_;
    std::unordered_map<std::vector<std::uint64_t>, bool, VecHash> c1p_cache_;
    std::size_t limit_ = 0;
    std::uint64_t nodes_ = 0;
};

}  // namespace

std::size_t min_matrix_cover_over_orders(const BoolMatrix& m, const OracleLimits& limits) {
    const Deadline deadline(limits.time_budget_s);
    const ReducedMatrix reduced = reduce_matrix(m);
    MatrixCoverSearch search(reduced, deadline);
    return search.solve();
}

std::size_t min_matrix_cover_brute(const BoolMatrix& m, const OracleLimits& limits) {
    double combos = 1;
    for (std::size_t i = 2; i <= m.rows(); ++i) combos *= static_cast<double>(i);
    for (std::size_t i = 2; i <= m.cols(); ++i) combos *= static_cast<double>(i);
    if (combos > static_cast<double>(limits.max_permutations))
        throw LimitError("row and column orders exceed limit-permutations " + std::to_string(limits.max_permutations));
    std::vector<std::size_t> rows(m.rows()), cols(m.cols());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::size_t best = std::numeric_limits<std::size_t>::max();
    do {
        std::iota(cols.begin(), cols.end(), std::size_t{0});
        do {
            const auto rel = matrix_to_relation(m.permuted(rows, cols));
            best = std::min(best, min_box_cover(rel, limits).size);
        } while (std::next_permutation(cols.begin(), cols.end()));
    } while (std::next_permutation(rows.begin(), rows.end()));
    return best;
}

Query semijoin_reduce(const Query& q, const OracleLimits& limits) {
    return semijoin_reduce(q, brute_join(q, limits));
}

}  // namespace boxjoin
