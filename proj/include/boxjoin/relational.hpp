#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxjoin/geometry.hpp"

namespace boxjoin {

// Raised by the text parsers; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A named set of tuples over d-bit attributes. Tuples are kept sorted and
// duplicate-free.
class Relation {
public:
    Relation() = default;
    // Throws on repeated attribute names, a bad bit width, values out of
    // domain or arity mismatches. Duplicate tuples are merged.
    Relation(std::string name, std::vector<std::string> schema, int d,
             std::vector<Point> tuples = {});

    const std::string& name() const { return name_; }
    const std::vector<std::string>& schema() const { return schema_; }
    std::size_t arity() const { return schema_.size(); }
    int bit_width() const { return d_; }
    const std::vector<Point>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }

    std::optional<std::size_t> attribute_index(std::string_view attr) const;
    std::size_t require_attribute(std::string_view attr) const;

    bool contains(const Point& t) const;
    // Return false when the tuple was already present / absent.
    bool insert(const Point& t);
    bool erase(const Point& t);

    void rename(std::string name) { name_ = std::move(name); }

    bool operator==(const Relation&) const = default;

private:
    void validate(const Point& t) const;

    std::string name_;
    std::vector<std::string> schema_;
    int d_ = 1;
    std::vector<Point> tuples_;
};

// A natural join over relations that share one bit width. The attribute
// universe is the union of the schemas in first-appearance order.
class Query {
public:
    Query() = default;
    explicit Query(std::vector<Relation> relations);

    const std::vector<Relation>& relations() const { return relations_; }
    std::vector<Relation>& relations() { return relations_; }
    const std::vector<std::string>& attributes() const { return attributes_; }
    std::size_t attribute_count() const { return attributes_.size(); }
    int bit_width() const { return d_; }
    // N, the total number of input tuples.
    std::size_t total_tuples() const;
    // r, the largest arity.
    std::size_t max_arity() const;

    std::optional<std::size_t> attribute_index(std::string_view attr) const;
    std::size_t require_attribute(std::string_view attr) const;
    // Positions of relation i's attributes within the universe.
    const std::vector<std::size_t>& positions(std::size_t relation) const {
        return positions_[relation];
    }

    bool operator==(const Query& o) const { return relations_ == o.relations_; }

private:
    std::vector<Relation> relations_;
    std::vector<std::string> attributes_;
    std::vector<std::vector<std::size_t>> positions_;
    int d_ = 1;
};

// Per-attribute permutations of [0, 2^d). Each permutation is stored as the
// dense old -> new map.
class DomainOrdering {
public:
    DomainOrdering() = default;
    // Throws unless every map is a permutation of [0, 2^d).
    DomainOrdering(int d, std::map<std::string, std::vector<std::uint64_t>> old_to_new);

    static DomainOrdering identity(const std::vector<std::string>& attributes, int d);
    // Builds from per-attribute listings of old values in new order, i.e.
    // listing[k] is the old value that lands at position k.
    static DomainOrdering from_listings(int d,
                                        const std::map<std::string, std::vector<std::uint64_t>>& listings);

    int bit_width() const { return d_; }
    bool has(std::string_view attr) const { return maps_.count(std::string(attr)) > 0; }
    const std::vector<std::uint64_t>& map(std::string_view attr) const;
    std::uint64_t apply(std::string_view attr, std::uint64_t v) const { return map(attr)[v]; }
    // Old values in new order.
    std::vector<std::uint64_t> listing(std::string_view attr) const;
    const std::map<std::string, std::vector<std::uint64_t>>& maps() const { return maps_; }

    bool operator==(const DomainOrdering&) const = default;

private:
    int d_ = 1;
    std::map<std::string, std::vector<std::uint64_t>> maps_;
};

DomainOrdering invert_ordering(const DomainOrdering& sigma);

// Replaces each value v of attribute A by sigma_A(v). Throws when sigma
// lacks an attribute of the query.
Relation apply_ordering(const Relation& r, const DomainOrdering& sigma);
Query apply_ordering(const Query& q, const DomainOrdering& sigma);
// Maps points over the attribute universe `attributes`.
std::vector<Point> apply_ordering(const std::vector<Point>& points,
                                  const std::vector<std::string>& attributes,
                                  const DomainOrdering& sigma);

// The A-hyperplane of r at value a in canonical (sorted) form. For a unary
// relation it is the single count {|sigma_{A=a}(r)|}.
struct Hyperplane {
    std::vector<Point> tuples;
    auto operator<=>(const Hyperplane&) const = default;
    bool operator==(const Hyperplane&) const = default;
};

Hyperplane hyperplane(const Relation& r, std::string_view attr, std::uint64_t a);

// Projects a universe point onto relation i of q.
Point project(const Query& q, std::size_t relation, const Point& p);

// Removes every dangling tuple given the exact join output over the
// query's attribute universe.
Query semijoin_reduce(const Query& q, const std::vector<Point>& output);

// Relation file: "<name> <d> <attr>..." header then one tuple per line;
// '#' starts a comment.
Relation parse_relation(std::string_view text);
std::string serialize_relation(const Relation& r);
Relation read_relation_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

// Ordering file: "order <attr>: v0 v1 ..." listing old values in new order.
DomainOrdering parse_ordering(std::string_view text, int d);
std::string serialize_ordering(const DomainOrdering& sigma);

// A tuple line in the relation format: space-separated decimals.
std::string format_tuple(const Point& t);
Point parse_tuple(std::string_view line, std::size_t arity, int d, std::size_t line_no);

}  // namespace boxjoin
