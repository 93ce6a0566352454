#include "boxjoin/relational.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace boxjoin {

namespace {

std::string_view strip_comment(std::string_view line) {
    if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
        line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    return line;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::uint64_t domain_size(int d) { return std::uint64_t{1} << d; }

}  // namespace

Relation::Relation(std::string name, std::vector<std::string> schema, int d, std::vector<Point> tuples)
    : name_(std::move(name)), schema_(std::move(schema)), d_(d), tuples_(std::move(tuples)) {
    check_bit_width(d_);
    if (schema_.empty()) throw Error("relation " + name_ + " has an empty schema");
    std::set<std::string> seen;
    for (const auto& a : schema_)
        if (!seen.insert(a).second) throw Error("relation " + name_ + " repeats attribute " + a);
    for (const auto& t : tuples_) validate(t);
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

void Relation::validate(const Point& t) const {
    if (t.size() != schema_.size())
        throw Error("tuple arity " + std::to_string(t.size()) + " does not match relation " + name_);
    for (auto v : t)
        if (v >= domain_size(d_)) throw Error("value " + std::to_string(v) + " out of domain");
}

std::optional<std::size_t> Relation::attribute_index(std::string_view attr) const {
    for (std::size_t i = 0; i < schema_.size(); ++i)
        if (schema_[i] == attr) return i;
    return std::nullopt;
}

std::size_t Relation::require_attribute(std::string_view attr) const {
    if (auto i = attribute_index(attr)) return *i;
    throw Error("attribute " + std::string(attr) + " not in relation " + name_);
}

bool Relation::contains(const Point& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
}

bool Relation::insert(const Point& t) {
    validate(t);
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it != tuples_.end() && *it == t) return false;
    tuples_.insert(it, t);
    return true;
}

bool Relation::erase(const Point& t) {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || *it != t) return false;
    tuples_.erase(it);
    return true;
}

Query::Query(std::vector<Relation> relations) : relations_(std::move(relations)) {
    if (relations_.empty()) throw Error("a query needs at least one relation");
    d_ = relations_.front().bit_width();
    for (const auto& r : relations_) {
        if (r.bit_width() != d_)
            throw Error("relation " + r.name() + " has bit width " + std::to_string(r.bit_width()) +
                        ", expected " + std::to_string(d_));
        std::vector<std::size_t> pos;
        for (const auto& a : r.schema()) {
            auto it = std::find(attributes_.begin(), attributes_.end(), a);
            if (it == attributes_.end()) {
                attributes_.push_back(a);
                pos.push_back(attributes_.size() - 1);
            } else {
                pos.push_back(static_cast<std::size_t>(it - attributes_.begin()));
            }
        }
        positions_.push_back(std::move(pos));
    }
}

std::size_t Query::total_tuples() const {
    std::size_t n = 0;
    for (const auto& r : relations_) n += r.size();
    return n;
}

std::size_t Query::max_arity() const {
    std::size_t r = 0;
    for (const auto& rel : relations_) r = std::max(r, rel.arity());
    return r;
}

std::optional<std::size_t> Query::attribute_index(std::string_view attr) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i] == attr) return i;
    return std::nullopt;
}

std::size_t Query::require_attribute(std::string_view attr) const {
    if (auto i = attribute_index(attr)) return *i;
    throw Error("unknown attribute " + std::string(attr));
}

DomainOrdering::DomainOrdering(int d, std::map<std::string, std::vector<std::uint64_t>> old_to_new)
    : d_(d), maps_(std::move(old_to_new)) {
    check_bit_width(d_);
    const std::uint64_t size = domain_size(d_);
    for (const auto& [attr, m] : maps_) {
        if (m.size() != size)
            throw Error("ordering for " + attr + " has " + std::to_string(m.size()) + " entries, expected " +
                        std::to_string(size));
        std::vector<bool> seen(size, false);
        for (auto v : m) {
            if (v >= size || seen[v]) throw Error("ordering for " + attr + " is not a permutation");
            seen[v] = true;
        }
    }
}

DomainOrdering DomainOrdering::identity(const std::vector<std::string>& attributes, int d) {
    check_bit_width(d);
    std::vector<std::uint64_t> id(domain_size(d));
    for (std::uint64_t i = 0; i < id.size(); ++i) id[i] = i;
    std::map<std::string, std::vector<std::uint64_t>> maps;
    for (const auto& a : attributes) maps[a] = id;
    return DomainOrdering(d, std::move(maps));
}

DomainOrdering DomainOrdering::from_listings(int d,
                                             const std::map<std::string, std::vector<std::uint64_t>>& listings) {
    check_bit_width(d);
    std::map<std::string, std::vector<std::uint64_t>> maps;
    for (const auto& [attr, list] : listings) {
        if (list.size() != domain_size(d))
            throw Error("listing for " + attr + " has " + std::to_string(list.size()) + " entries");
        std::vector<std::uint64_t> m(list.size(), 0);
        std::vector<bool> seen(list.size(), false);
        for (std::uint64_t pos = 0; pos < list.size(); ++pos) {
            const auto old = list[pos];
            if (old >= list.size() || seen[old]) throw Error("listing for " + attr + " is not a permutation");
            seen[old] = true;
            m[old] = pos;
        }
        maps[attr] = std::move(m);
    }
    return DomainOrdering(d, std::move(maps));
}

const std::vector<std::uint64_t>& DomainOrdering::map(std::string_view attr) const {
    auto it = maps_.find(std::string(attr));
    if (it == maps_.end()) throw Error("ordering has no permutation for attribute " + std::string(attr));
    return it->second;
}

std::vector<std::uint64_t> DomainOrdering::listing(std::string_view attr) const {
    const auto& m = map(attr);
    std::vector<std::uint64_t> out(m.size());
    for (std::uint64_t old = 0; old < m.size(); ++old) out[m[old]] = old;
    return out;
}

DomainOrdering invert_ordering(const DomainOrdering& sigma) {
    std::map<std::string, std::vector<std::uint64_t>> inv;
    for (const auto& [attr, m] : sigma.maps()) inv[attr] = sigma.listing(attr);
    return DomainOrdering(sigma.bit_width(), std::move(inv));
}

Relation apply_ordering(const Relation& r, const DomainOrdering& sigma) {
    if (sigma.bit_width() != r.bit_width()) throw Error("ordering bit width does not match " + r.name());
    std::vector<const std::vector<std::uint64_t>*> maps;
    for (const auto& a : r.schema()) maps.push_back(&sigma.map(a));
    std::vector<Point> out;
    out.reserve(r.size());
    for (const auto& t : r.tuples()) {
        Point p(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) p[i] = (*maps[i])[t[i]];
        out.push_back(std::move(p));
    }
    return Relation(r.name(), r.schema(), r.bit_width(), std::move(out));
}

Query apply_ordering(const Query& q, const DomainOrdering& sigma) {
    std::vector<Relation> rels;
    for (const auto& r : q.relations()) rels.push_back(apply_ordering(r, sigma));
    return Query(std::move(rels));
}

std::vector<Point> apply_ordering(const std::vector<Point>& points, const std::vector<std::string>& attributes,
                                  const DomainOrdering& sigma) {
    std::vector<const std::vector<std::uint64_t>*> maps;
    for (const auto& a : attributes) maps.push_back(&sigma.map(a));
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& t : points) {
        Point p(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) p[i] = (*maps[i])[t[i]];
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Hyperplane hyperplane(const Relation& r, std::string_view attr, std::uint64_t a) {
    const std::size_t ai = r.require_attribute(attr);
    Hyperplane h;
    if (r.arity() == 1) {
        h.tuples.push_back(Point{r.contains(Point{a}) ? 1u : 0u});
        return h;
    }
    for (const auto& t : r.tuples()) {
        if (t[ai] != a) continue;
        Point rest;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (i != ai) rest.push_back(t[i]);
        h.tuples.push_back(std::move(rest));
    }
    std::sort(h.tuples.begin(), h.tuples.end());
    return h;
}

Point project(const Query& q, std::size_t relation, const Point& p) {
    const auto& pos = q.positions(relation);
    Point out(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) out[i] = p[pos[i]];
    return out;
}

Query semijoin_reduce(const Query& q, const std::vector<Point>& output) {
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < q.relations().size(); ++i) {
        const auto& r = q.relations()[i];
        std::vector<Point> kept;
        for (const auto& o : output) kept.push_back(project(q, i, o));
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        std::vector<Point> tuples;
        for (const auto& t : kept)
            if (r.contains(t)) tuples.push_back(t);
        rels.emplace_back(r.name(), r.schema(), r.bit_width(), std::move(tuples));
    }
    return Query(std::move(rels));
}

Point parse_tuple(std::string_view line, std::size_t arity, int d, std::size_t line_no) {
    auto toks = split_ws(line);
    if (toks.size() != arity)
        throw ParseError(line_no, "expected " + std::to_string(arity) + " values, got " + std::to_string(toks.size()));
    Point t;
    for (auto tok : toks) {
        auto v = parse_u64(tok);
        if (!v) throw ParseError(line_no, "malformed value '" + std::string(tok) + "'");
        if (*v >= domain_size(d)) throw ParseError(line_no, "value out of domain: " + std::string(tok));
        t.push_back(*v);
    }
    return t;
}

Relation parse_relation(std::string_view text) {
    std::vector<Point> tuples;
    std::set<Point> seen;
    std::string name;
    std::vector<std::string> schema;
    int d = 0;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        auto line = strip_comment(raw);
        if (line.empty()) continue;
        if (schema.empty()) {
            auto toks = split_ws(line);
            if (toks.size() < 3) throw ParseError(line_no, "header must be '<name> <d> <attr>...'");
            name = std::string(toks[0]);
            auto dv = parse_u64(toks[1]);
            if (!dv || *dv < 1 || *dv > static_cast<std::uint64_t>(kMaxBitWidth))
                throw ParseError(line_no, "bad bit width '" + std::string(toks[1]) + "'");
            d = static_cast<int>(*dv);
            std::set<std::string_view> attrs;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                if (!attrs.insert(toks[i]).second)
                    throw ParseError(line_no, "repeated attribute " + std::string(toks[i]));
                schema.emplace_back(toks[i]);
            }
            continue;
        }
        Point t = parse_tuple(line, schema.size(), d, line_no);
        if (!seen.insert(t).second) throw ParseError(line_no, "duplicate tuple");
        tuples.push_back(std::move(t));
    }
    if (schema.empty()) throw ParseError(line_no, "missing relation header");
    return Relation(name, schema, d, std::move(tuples));
}

std::string format_tuple(const Point& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(t[i]);
    }
    return s;
}

std::string serialize_relation(const Relation& r) {
    std::string s = r.name() + ' ' + std::to_string(r.bit_width());
    for (const auto& a : r.schema()) s += ' ' + a;
    s += '\n';
    for (const auto& t : r.tuples()) s += format_tuple(t) + '\n';
    return s;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

Relation read_relation_file(const std::string& path) {
    try {
        return parse_relation(read_text_file(path));
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

DomainOrdering parse_ordering(std::string_view text, int d) {
    std::map<std::string, std::vector<std::uint64_t>> listings;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        auto line = strip_comment(raw);
        if (line.empty()) continue;
        auto toks = split_ws(line);
        if (toks.size() < 2 || toks[0] != "order" || toks[1].empty() || toks[1].back() != ':')
            throw ParseError(line_no, "expected 'order <attr>: v0 v1 ...'");
        std::string attr(toks[1].substr(0, toks[1].size() - 1));
        if (listings.count(attr)) throw ParseError(line_no, "attribute " + attr + " listed twice");
        std::vector<std::uint64_t> list;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            auto v = parse_u64(toks[i]);
            if (!v) throw ParseError(line_no, "malformed value '" + std::string(toks[i]) + "'");
            list.push_back(*v);
        }
        try {
            listings[attr] = list;
            DomainOrdering::from_listings(d, {{attr, list}});
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return DomainOrdering::from_listings(d, listings);
}

std::string serialize_ordering(const DomainOrdering& sigma) {
    std::string s;
    for (const auto& [attr, m] : sigma.maps()) {
        s += "order " + attr + ":";
        for (auto v : sigma.listing(attr)) s += ' ' + std::to_string(v);
        s += '\n';
    }
    return s;
}

}  // namespace boxjoin
