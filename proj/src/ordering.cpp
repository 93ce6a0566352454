#include "boxjoin/ordering.hpp"

#include <algorithm>
#include <numeric>

namespace boxjoin {

namespace {

// One relation of S re-laid out with A in column 0 and the remaining
// attributes in universe order, rows sorted lexicographically.
struct SortedRelation {
    std::size_t width = 0;
    bool unary = false;
    std::vector<std::uint64_t> rows;  // row-major, width columns

    const std::uint64_t* row(std::size_t i) const { return rows.data() + i * width; }
    std::size_t row_count() const { return width ? rows.size() / width : 0; }
};

SortedRelation sort_by_phi(const Query& q, std::size_t rel, std::size_t attr_pos) {
    const auto& r = q.relations()[rel];
    const auto& pos = q.positions(rel);
    std::vector<std::size_t> cols(pos.size());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::sort(cols.begin(), cols.end(), [&](std::size_t x, std::size_t y) {
        const bool xa = pos[x] == attr_pos, ya = pos[y] == attr_pos;
        if (xa != ya) return xa;
        return pos[x] < pos[y];
    });

    SortedRelation out;
    out.width = cols.size();
    out.unary = cols.size() == 1;
    const std::size_t n = r.size();
    std::vector<std::uint64_t> flat(n * out.width);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < out.width; ++c) flat[i * out.width + c] = r.tuples()[i][cols[c]];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t w = out.width;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto* a = flat.data() + x * w;
        const auto* b = flat.data() + y * w;
        return std::lexicographical_compare(a, a + w, b, b + w);
    });
    out.rows.resize(flat.size());
    for (std::size_t i = 0; i < n; ++i)
        std::copy_n(flat.data() + order[i] * w, w, out.rows.data() + i * w);
    return out;
}

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Lexicographic comparison of two hyperplanes of the same relation.
int compare_hyperplanes(const SortedRelation& r, Range x, Range y) {
    if (r.unary) {
        const auto cx = x.end - x.begin, cy = y.end - y.begin;
        return cx < cy ? -1 : (cx > cy ? 1 : 0);
    }
    const std::size_t w = r.width;
    std::size_t i = x.begin, j = y.begin;
    for (; i < x.end && j < y.end; ++i, ++j) {
        const auto* a = r.row(i) + 1;
        const auto* b = r.row(j) + 1;
        for (std::size_t c = 0; c + 1 < w; ++c) {
            if (a[c] != b[c]) return a[c] < b[c] ? -1 : 1;
        }
    }
    if (i == x.end && j == y.end) return 0;
    return i == x.end ? -1 : 1;
}

void check_dense(int d) {
    if (d > 30) throw Error("dense domain orderings need d <= 30");
}

}  // namespace

std::vector<std::size_t> EquivalenceClasses::labels(int d) const {
    check_dense(d);
    std::vector<std::size_t> out(std::size_t{1} << d, classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (auto v : classes[c]) out[v] = c;
    return out;
}

AttributeOrder order_attribute(const Query& q, std::string_view attr) {
    const std::size_t attr_pos = q.require_attribute(attr);
    const int d = q.bit_width();
    check_dense(d);

    // S: relations mentioning A, in query order; each sorted by phi.
    std::vector<SortedRelation> sorted;
    for (std::size_t i = 0; i < q.relations().size(); ++i) {
        const auto& pos = q.positions(i);
        if (std::find(pos.begin(), pos.end(), attr_pos) != pos.end())
            sorted.push_back(sort_by_phi(q, i, attr_pos));
    }

    // D, the A-values that occur in S.
    std::vector<std::uint64_t> values;
    for (const auto& r : sorted)
        for (std::size_t i = 0; i < r.row_count(); ++i) values.push_back(r.row(i)[0]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    // T[a]: the hyperplane of a in each relation of S, as a row range.
    const std::size_t s = sorted.size();
    std::vector<Range> table(values.size() * s);
    for (std::size_t k = 0; k < s; ++k) {
        const auto& r = sorted[k];
        std::size_t i = 0, v = 0;
        while (i < r.row_count()) {
            const auto a = r.row(i)[0];
            std::size_t j = i;
            while (j < r.row_count() && r.row(j)[0] == a) ++j;
            while (values[v] != a) ++v;
            table[v * s + k] = {i, j};
            i = j;
        }
    }

    auto compare = [&](std::size_t x, std::size_t y) {
        for (std::size_t k = 0; k < s; ++k) {
            if (int c = compare_hyperplanes(sorted[k], table[x * s + k], table[y * s + k]); c != 0) return c;
        }
        return 0;
    };

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return compare(x, y) < 0; });

    AttributeOrder out;
    out.classes.attribute = std::string(attr);
    out.listing.reserve(std::size_t{1} << d);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto v = values[order[i]];
        out.listing.push_back(v);
        if (i == 0 || compare(order[i - 1], order[i]) != 0) out.classes.classes.emplace_back();
        out.classes.classes.back().push_back(v);
    }
    // Values outside D go last, ascending.
    const std::uint64_t size = std::uint64_t{1} << d;
    std::size_t next = 0;
    for (std::uint64_t v = 0; v < size; ++v) {
        if (next < values.size() && values[next] == v) {
            ++next;
            continue;
        }
        out.listing.push_back(v);
        out.classes.absent.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> order_attr(const Query& q, std::string_view attr) {
    return order_attribute(q, attr).listing;
}

EquivalenceClasses equivalence_classes(const Query& q, std::string_view attr) {
    return order_attribute(q, attr).classes;
}

DomainOrdering adora(const Query& q) {
    std::map<std::string, std::vector<std::uint64_t>> listings;
    for (const auto& a : q.attributes()) listings[a] = order_attr(q, a);
    return DomainOrdering::from_listings(q.bit_width(), listings);
}

std::size_t count_class_switches(const Query& q, const DomainOrdering& sigma, std::string_view attr) {
    const auto labels = equivalence_classes(q, attr).labels(q.bit_width());
    const auto listing = sigma.listing(attr);
    std::size_t switches = 0;
    for (std::size_t i = 1; i < listing.size(); ++i)
        if (labels[listing[i - 1]] != labels[listing[i]]) ++switches;
    return switches;
}

std::size_t GridCover::general_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.gap_boxes.size();
    return n;
}

std::size_t GridCover::dyadic_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.dyadic.size();
    return n;
}

std::string GridCover::to_text() const {
    std::string s;
    for (const auto& p : parts)
        for (const auto& b : p.dyadic) s += format_box_line(p.relation, b) + '\n';
    return s;
}

GridCover grid_cover(const Query& q, const DomainOrdering& sigma) {
    std::vector<EquivalenceClasses> classes;
    for (const auto& a : q.attributes()) classes.push_back(equivalence_classes(q, a));
    return grid_cover(q, sigma, classes);
}

GridCover grid_cover(const Query& q, const DomainOrdering& sigma, const std::vector<EquivalenceClasses>& classes) {
    const int d = q.bit_width();

    // Runs per universe attribute, as sorted intervals of new values.
    std::vector<std::vector<Interval>> runs(q.attribute_count());
    for (std::size_t a = 0; a < q.attribute_count(); ++a) {
        const auto& name = q.attributes()[a];
        auto it = std::find_if(classes.begin(), classes.end(),
                               [&](const EquivalenceClasses& c) { return c.attribute == name; });
        if (it == classes.end()) throw Error("no equivalence classes for attribute " + name);
        const auto& m = sigma.map(name);
        auto add_run = [&](const std::vector<std::uint64_t>& members) {
            if (members.empty()) return;
            std::uint64_t lo = m[members.front()], hi = lo;
            for (auto v : members) {
                lo = std::min(lo, m[v]);
                hi = std::max(hi, m[v]);
            }
            if (hi - lo + 1 != members.size())
                throw Error("equivalence class of " + name + " is not consecutive under the ordering");
            runs[a].push_back({lo, hi});
        };
        for (const auto& c : it->classes) add_run(c);
        add_run(it->absent);
        std::sort(runs[a].begin(), runs[a].end());
    }

    GridCover out;
    for (std::size_t ri = 0; ri < q.relations().size(); ++ri) {
        const Relation reordered = apply_ordering(q.relations()[ri], sigma);
        const auto& pos = q.positions(ri);
        GridCover::Part part;
        part.relation = reordered.name();
        for (auto p : pos) part.runs.push_back(runs[p]);

        std::vector<std::size_t> idx(pos.size(), 0);
        while (true) {
            GeneralBox cell;
            Point corner;
            for (std::size_t i = 0; i < pos.size(); ++i) {
                cell.sides.push_back(part.runs[i][idx[i]]);
                corner.push_back(part.runs[i][idx[i]].lo);
            }
            if (!reordered.contains(corner)) {
                auto pieces = decompose_general(cell, d);
                part.dyadic.insert(part.dyadic.end(), pieces.begin(), pieces.end());
                part.gap_boxes.push_back(std::move(cell));
            }
            std::size_t i = 0;
            for (; i < idx.size(); ++i) {
                if (++idx[i] < part.runs[i].size()) break;
                idx[i] = 0;
            }
            if (i == idx.size()) break;
        }
        std::sort(part.dyadic.begin(), part.dyadic.end());
        out.parts.push_back(std::move(part));
    }
    return out;
}

}  // namespace boxjoin
