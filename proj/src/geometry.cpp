#include "boxjoin/geometry.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace boxjoin {

void check_bit_width(int d) {
    if (d < 1 || d > kMaxBitWidth)
        throw Error("bit width " + std::to_string(d) + " outside [1, " +
                    std::to_string(kMaxBitWidth) + "]");
}

Prefix Prefix::parse(std::string_view text) {
    if (text == "*") return star();
    if (text.empty() || text.size() > static_cast<std::size_t>(kMaxBitWidth))
        throw Error("bad prefix '" + std::string(text) + "'");
    Prefix p;
    for (char c : text) {
        if (c != '0' && c != '1') throw Error("bad prefix '" + std::string(text) + "'");
        p = p.child(static_cast<unsigned>(c - '0'));
    }
    return p;
}

std::string Prefix::to_string() const {
    if (len == 0) return "*";
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = 0; i < len; ++i)
        if ((bits >> (len - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

DyadicBox DyadicBox::unit(const Point& p, int d) {
    DyadicBox b;
    b.prefixes.reserve(p.size());
    for (auto v : p) b.prefixes.push_back(Prefix::of_value(v, d));
    return b;
}

DyadicBox DyadicBox::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    DyadicBox b;
    std::string tok;
    while (in >> tok) b.prefixes.push_back(Prefix::parse(tok));
    return b;
}

bool DyadicBox::is_unit(int d) const {
    return std::all_of(prefixes.begin(), prefixes.end(), [d](const Prefix& p) { return p.len == d; });
}

double DyadicBox::volume(int d) const {
    double v = 1.0;
    for (const auto& p : prefixes) v *= static_cast<double>(std::uint64_t{1} << (d - p.len));
    return v;
}

Point DyadicBox::min_point(int d) const {
    Point p;
    for (const auto& pr : prefixes) p.push_back(pr.lo(d));
    return p;
}

Point DyadicBox::max_point(int d) const {
    Point p;
    for (const auto& pr : prefixes) p.push_back(pr.hi(d));
    return p;
}

std::string DyadicBox::to_string() const {
    std::string s = "<";
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
        if (i) s += ',';
        s += prefixes[i].to_string();
    }
    return s + ">";
}

std::size_t DyadicBoxHash::operator()(const DyadicBox& b) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& p : b.prefixes) {
        std::uint64_t x = (p.bits << 6) ^ static_cast<std::uint64_t>(p.len);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdull;
        x ^= x >> 33;
        h = (h ^ x) * 0x100000001b3ull + 0x7f4a7c15;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
}

GeneralBox GeneralBox::from_dyadic(const DyadicBox& b, int d) {
    GeneralBox g;
    for (const auto& p : b.prefixes) g.sides.push_back({p.lo(d), p.hi(d)});
    return g;
}

bool GeneralBox::contains(const Point& p) const {
    if (p.size() != sides.size()) throw Error("point arity does not match box arity");
    for (std::size_t i = 0; i < sides.size(); ++i)
        if (p[i] < sides[i].lo || p[i] > sides[i].hi) return false;
    return true;
}

bool GeneralBox::contains(const GeneralBox& other) const {
    if (other.sides.size() != sides.size()) throw Error("box arity mismatch");
    for (std::size_t i = 0; i < sides.size(); ++i)
        if (other.sides[i].lo < sides[i].lo || other.sides[i].hi > sides[i].hi) return false;
    return true;
}

double GeneralBox::volume() const {
    double v = 1.0;
    for (const auto& s : sides) v *= static_cast<double>(s.hi - s.lo + 1);
    return v;
}

std::string GeneralBox::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (i) s += 'x';
        s += '[' + std::to_string(sides[i].lo) + ',' + std::to_string(sides[i].hi) + ']';
    }
    return s;
}

bool dyadic_contains(const DyadicBox& b, const Point& p, int d) {
    if (b.arity() != p.size()) throw Error("box and point have different schemas");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!b[i].matches(p[i], d)) return false;
    return true;
}

bool dyadic_contains(const DyadicBox& outer, const DyadicBox& inner) {
    if (outer.arity() != inner.arity()) throw Error("boxes have different schemas");
    for (std::size_t i = 0; i < outer.arity(); ++i)
        if (!outer[i].is_prefix_of(inner[i])) return false;
    return true;
}

std::vector<DyadicBox> dyadic_superboxes(const DyadicBox& b) {
    std::vector<DyadicBox> out;
    out.reserve(superbox_count(b));
    for_each_superbox(b, [&](const DyadicBox& s) {
        out.push_back(s);
        return false;
    });
    return out;
}

std::size_t superbox_count(const DyadicBox& b) {
    std::size_t c = 1;
    for (const auto& p : b.prefixes) c *= static_cast<std::size_t>(p.len + 1);
    return c;
}

std::vector<Prefix> decompose_interval(std::uint64_t lo, std::uint64_t hi, int d) {
    check_bit_width(d);
    const std::uint64_t top = (d == 64) ? ~0ull : ((std::uint64_t{1} << d) - 1);
    if (lo > hi || hi > top) throw Error("interval outside the domain");
    std::vector<Prefix> out;
    while (true) {
        // Largest k with lo aligned to 2^k and lo + 2^k - 1 <= hi.
        int k = lo == 0 ? d : std::min(d, std::countr_zero(lo));
        while (k > 0 && hi - lo < (std::uint64_t{1} << k) - 1) --k;
        out.push_back({lo >> k, d - k});
        const std::uint64_t end = lo + ((std::uint64_t{1} << k) - 1);
        if (end >= hi) break;
        lo = end + 1;
    }
    return out;
}

std::vector<DyadicBox> decompose_general(const GeneralBox& g, int d) {
    std::vector<std::vector<Prefix>> per_attr;
    per_attr.reserve(g.arity());
    for (const auto& s : g.sides) per_attr.push_back(decompose_interval(s.lo, s.hi, d));

    std::vector<DyadicBox> out;
    std::vector<std::size_t> idx(g.arity(), 0);
    if (g.arity() == 0) return {DyadicBox{}};
    while (true) {
        DyadicBox b;
        for (std::size_t i = 0; i < idx.size(); ++i) b.prefixes.push_back(per_attr[i][idx[i]]);
        out.push_back(std::move(b));
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < per_attr[i].size()) break;
            idx[i] = 0;
        }
        if (i == idx.size()) break;
    }
    return out;
}

std::optional<DyadicBox> geometric_resolution(const DyadicBox& b1, const DyadicBox& b2,
                                              std::size_t attr) {
    if (b1.arity() != b2.arity()) throw Error("boxes have different schemas");
    if (attr >= b1.arity()) throw Error("resolution attribute out of range");
    const Prefix& p1 = b1[attr];
    const Prefix& p2 = b2[attr];
    if (p1.len == 0 || p1.len != p2.len || (p1.bits ^ p2.bits) != 1u) return std::nullopt;

    DyadicBox out = b1;
    out[attr] = p1.parent();
    for (std::size_t i = 0; i < b1.arity(); ++i) {
        if (i == attr) continue;
        if (b1[i].is_prefix_of(b2[i]))
            out[i] = b2[i];
        else if (b2[i].is_prefix_of(b1[i]))
            out[i] = b1[i];
        else
            return std::nullopt;
    }
    return out;
}

void DyadicBoxIndex::check(const DyadicBox& b) const {
    if (b.arity() != arity_)
        throw Error("box " + b.to_string() + " does not match index arity " + std::to_string(arity_));
}

bool DyadicBoxIndex::insert(const DyadicBox& b) {
    check(b);
    ++probes_;
    return boxes_.insert(b).second;
}

bool DyadicBoxIndex::erase(const DyadicBox& b) {
    check(b);
    ++probes_;
    return boxes_.erase(b) > 0;
}

bool DyadicBoxIndex::contains(const DyadicBox& b) const {
    check(b);
    ++probes_;
    return boxes_.count(b) > 0;
}

std::vector<DyadicBox> DyadicBoxIndex::query_superboxes(const DyadicBox& b) const {
    check(b);
    std::vector<DyadicBox> out;
    if (boxes_.empty()) return out;
    for_each_superbox(b, [&](const DyadicBox& s) {
        ++probes_;
        if (boxes_.count(s)) out.push_back(s);
        return false;
    });
    return out;
}

bool DyadicBoxIndex::covers(const DyadicBox& b) const {
    check(b);
    if (boxes_.empty()) return false;
    return for_each_superbox(b, [&](const DyadicBox& s) {
        ++probes_;
        return boxes_.count(s) > 0;
    });
}

std::vector<DyadicBox> DyadicBoxIndex::sorted() const {
    std::vector<DyadicBox> out(boxes_.begin(), boxes_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_box_line(std::string_view relation, const DyadicBox& b) {
    std::string s = "box ";
    s += relation;
    for (const auto& p : b.prefixes) {
        s += ' ';
        s += p.to_string();
    }
    return s;
}

}  // namespace boxjoin
