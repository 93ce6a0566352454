#include "boxjoin/coverkit.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>
#include <unordered_set>

namespace boxjoin {

std::size_t BoxCover::size() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.boxes.size();
    return n;
}

std::string BoxCover::to_text() const {
    std::string s;
    for (const auto& p : parts)
        for (const auto& b : p.boxes) s += format_box_line(p.relation, b) + '\n';
    return s;
}

BoxCover parse_box_cover(std::string_view text) {
    BoxCover cover;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string tag, rel;
        if (!(words >> tag)) continue;
        if (tag != "box" || !(words >> rel)) throw ParseError(line_no, "expected 'box <relation> <prefix>...'");
        std::string rest;
        std::getline(words, rest);
        DyadicBox b;
        try {
            b = DyadicBox::parse(rest);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        if (b.arity() == 0) throw ParseError(line_no, "box without prefixes");
        auto it = std::find_if(cover.parts.begin(), cover.parts.end(),
                               [&](const BoxCover::Part& p) { return p.relation == rel; });
        if (it == cover.parts.end()) {
            cover.parts.push_back({rel, {}});
            it = std::prev(cover.parts.end());
        }
        if (!it->boxes.empty() && it->boxes.front().arity() != b.arity())
            throw ParseError(line_no, "box arity differs from earlier boxes of " + rel);
        it->boxes.push_back(std::move(b));
    }
    return cover;
}

OccupancyIndex::OccupancyIndex(const Relation& r) : d_(r.bit_width()) {
    for (const auto& t : r.tuples()) add(t);
}

void OccupancyIndex::add(const Point& t) {
    for_each_superbox(DyadicBox::unit(t, d_), [&](const DyadicBox& b) {
        ++counts_[b];
        return false;
    });
}

void OccupancyIndex::remove(const Point& t) {
    for_each_superbox(DyadicBox::unit(t, d_), [&](const DyadicBox& b) {
        auto it = counts_.find(b);
        if (it == counts_.end()) throw Error("removing a tuple that was never added");
        if (--it->second == 0) counts_.erase(it);
        return false;
    });
}

std::vector<DyadicBox> gamb(const Relation& r) {
    const int d = r.bit_width();
    std::vector<DyadicBox> candidates;  // B
    std::vector<DyadicBox> occupied;    // B-bar
    for (const auto& t : r.tuples()) {
        for_each_superbox(DyadicBox::unit(t, d), [&](const DyadicBox& b) {
            occupied.push_back(b);
            for (std::size_t a = 0; a < b.arity(); ++a) {
                if (b[a].is_star()) continue;
                DyadicBox flipped = b;
                flipped[a] = b[a].flipped();
                candidates.push_back(std::move(flipped));
            }
            return false;
        });
    }
    // Set difference by sorting both sides and merging.
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    std::vector<DyadicBox> out;
    std::set_difference(candidates.begin(), candidates.end(), occupied.begin(), occupied.end(),
                        std::back_inserter(out));
    return out;
}

std::vector<DyadicBox> gamb_cover(const Relation& r) {
    if (r.empty()) return {DyadicBox::all_star(r.arity())};
    return gamb(r);
}

std::vector<DyadicBox> maximality_filter(const std::vector<DyadicBox>& boxes, const Relation& r) {
    OccupancyIndex occ(r);
    std::vector<DyadicBox> out;
    for (const auto& b : boxes) {
        if (b.arity() != r.arity()) throw Error("box " + b.to_string() + " does not fit relation " + r.name());
        if (occ.occupied(b)) throw Error("box " + b.to_string() + " contains a tuple of " + r.name());
        bool maximal = true;
        for (std::size_t a = 0; a < b.arity() && maximal; ++a) {
            if (b[a].is_star()) continue;
            DyadicBox grown = b;
            grown[a] = b[a].parent();
            maximal = occ.occupied(grown);
        }
        if (maximal) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BoxCover build_query_cover(const Query& q) {
    BoxCover cover;
    for (const auto& r : q.relations())
        cover.parts.push_back({r.name(), maximality_filter(gamb_cover(r), r)});
    return cover;
}

Mdbci::Mdbci(const Relation& r) : d_(r.bit_width()), index_(r.arity()) {
    for (const auto& b : gamb_cover(r)) index_.insert(b);
    index_.reset_probes();
}

namespace {

// Boxes containing t, addressed by their per-attribute prefix lengths in
// mixed radix d+1.
struct PathLattice {
    const Point& t;
    int d;
    std::size_t n;
    std::size_t size;

    PathLattice(const Point& point, int bits) : t(point), d(bits), n(point.size()), size(1) {
        for (std::size_t i = 0; i < n; ++i) {
            size *= static_cast<std::size_t>(d + 1);
            if (size > (std::size_t{1} << 26)) throw Error("too many dyadic boxes around a tuple");
        }
    }

    std::vector<int> lengths(std::size_t code) const {
        std::vector<int> len(n);
        for (std::size_t i = 0; i < n; ++i) {
            len[i] = static_cast<int>(code % static_cast<std::size_t>(d + 1));
            code /= static_cast<std::size_t>(d + 1);
        }
        return len;
    }

    std::size_t stride(std::size_t attr) const {
        std::size_t s = 1;
        for (std::size_t i = 0; i < attr; ++i) s *= static_cast<std::size_t>(d + 1);
        return s;
    }

    DyadicBox box(const std::vector<int>& len) const {
        DyadicBox b;
        for (std::size_t i = 0; i < n; ++i) b.prefixes.push_back(Prefix::of_value(t[i], d).truncated(len[i]));
        return b;
    }
};

}  // namespace

void Mdbci::insert(const Relation& updated, const Point& t) {
    if (t.size() != index_.arity()) throw Error("tuple arity does not match the index");
    if (!updated.contains(t)) throw Error("insert expects the relation to already contain the tuple");
    index_.reset_probes();

    const DyadicBox unit = DyadicBox::unit(t, d_);
    const auto removed = index_.query_superboxes(unit);
    if (removed.empty()) throw Error("tuple " + format_tuple(t) + " is already a tuple of the relation");
    for (const auto& b : removed) index_.erase(b);

    std::unordered_set<DyadicBox, DyadicBoxHash> visited;
    for (const auto& b : removed) {
        // Odometer over every b' with t in b' and b' a subset of b.
        std::vector<int> len(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) len[i] = b[i].len;
        while (true) {
            DyadicBox inner;
            for (std::size_t i = 0; i < t.size(); ++i)
                inner.prefixes.push_back(Prefix::of_value(t[i], d_).truncated(len[i]));
            if (visited.insert(inner).second) {
                for (std::size_t a = 0; a < t.size(); ++a) {
                    if (inner[a].len >= d_) continue;
                    const unsigned t_bit = static_cast<unsigned>((t[a] >> (d_ - inner[a].len - 1)) & 1u);
                    DyadicBox extended = inner;
                    extended[a] = inner[a].child(t_bit ^ 1u);
                    index_.insert(extended);
                }
            }
            std::size_t i = 0;
            for (; i < t.size(); ++i) {
                if (len[i] < d_) {
                    ++len[i];
                    break;
                }
                len[i] = b[i].len;
            }
            if (i == t.size()) break;
        }
    }
    last_probes_ = index_.probes();
}

void Mdbci::erase(const Relation& updated, const Point& t) {
    if (t.size() != index_.arity()) throw Error("tuple arity does not match the index");
    if (updated.contains(t)) throw Error("erase expects the relation to no longer contain the tuple");
    index_.reset_probes();

    // covered(x): some indexed box contains x, memoised over the truncation
    // closure so each box is probed once.
    std::unordered_map<DyadicBox, bool, DyadicBoxHash> memo;
    auto covered = [&](auto&& self, const DyadicBox& x) -> bool {
        if (auto it = memo.find(x); it != memo.end()) return it->second;
        bool c = index_.contains(x);
        for (std::size_t a = 0; a < x.arity() && !c; ++a) {
            if (x[a].is_star()) continue;
            DyadicBox up = x;
            up[a] = x[a].parent();
            c = self(self, up);
        }
        memo.emplace(x, c);
        return c;
    };

    const DyadicBox unit = DyadicBox::unit(t, d_);
    if (covered(covered, unit)) throw Error("tuple " + format_tuple(t) + " was not a tuple of the relation");

    const PathLattice lattice(t, d_);
    // reach[a][L]: some box inside L (still holding t) has an uncovered
    // last-bit flip on attribute a. The box with lengths L is a gap box iff
    // reach[a][L + e_a] is clear for every attribute a.
    const std::size_t n = t.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(lattice.size, 0));
    for (std::size_t code = lattice.size; code-- > 0;) {
        const auto len = lattice.lengths(code);
        const DyadicBox b = lattice.box(len);
        for (std::size_t a = 0; a < n; ++a) {
            char r = 0;
            if (len[a] > 0) {
                DyadicBox flipped = b;
                flipped[a] = b[a].flipped();
                r = !covered(covered, flipped);
            }
            for (std::size_t c = 0; c < n && !r; ++c)
                if (len[c] < d_) r = reach[a][code + lattice.stride(c)];
            reach[a][code] = r;
        }
    }
    auto gap = [&](std::size_t code, const std::vector<int>& len) {
        for (std::size_t a = 0; a < n; ++a)
            if (len[a] < d_ && reach[a][code + lattice.stride(a)]) return false;
        return true;
    };
    for (std::size_t code = 0; code < lattice.size; ++code) {
        const auto len = lattice.lengths(code);
        if (!gap(code, len)) continue;
        bool maximal = true;
        for (std::size_t a = 0; a < n && maximal; ++a) {
            if (len[a] == 0) continue;
            auto up = len;
            --up[a];
            maximal = !gap(code - lattice.stride(a), up);
        }
        if (maximal) index_.insert(lattice.box(len));
    }
    last_probes_ = index_.probes();
}

}  // namespace boxjoin
