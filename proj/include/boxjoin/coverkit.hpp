#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "boxjoin/geometry.hpp"
#include "boxjoin/relational.hpp"

namespace boxjoin {

// Per-relation sets of dyadic gap boxes, in query relation order.
struct BoxCover {
    struct Part {
        std::string relation;
        std::vector<DyadicBox> boxes;
    };
    std::vector<Part> parts;

    std::size_t size() const;
    // Box dump lines, one per box.
    std::string to_text() const;
};

// Reads box dump lines ("box <relation> <prefix>..."); parts appear in
// first-mention order. '#' starts a comment.
BoxCover parse_box_cover(std::string_view text);

// Tuple counts for every dyadic box that holds at least one tuple. Answers
// "does box b contain a tuple" with one hash lookup and supports updates.
class OccupancyIndex {
public:
    explicit OccupancyIndex(const Relation& r);

    bool occupied(const DyadicBox& b) const { return counts_.count(b) > 0; }
    void add(const Point& t);
    void remove(const Point& t);
    std::size_t size() const { return counts_.size(); }

private:
    int d_;
    std::unordered_map<DyadicBox, std::uint32_t, DyadicBoxHash> counts_;
};

// All maximal dyadic gap boxes of r, possibly with some non-maximal ones,
// in canonical order. An empty relation yields no boxes.
std::vector<DyadicBox> gamb(const Relation& r);

// gamb(r), except that an empty relation yields the single all-star box so
// that the result always covers the complement.
std::vector<DyadicBox> gamb_cover(const Relation& r);

// Keeps the boxes that cannot be grown along any attribute without
// swallowing a tuple. Throws if some input box holds a tuple.
std::vector<DyadicBox> maximality_filter(const std::vector<DyadicBox>& boxes, const Relation& r);

// Maximal dyadic gap boxes of every relation.
BoxCover build_query_cover(const Query& q);

// Maximal dyadic box cover index: a set of gap boxes of a relation that
// contains every maximal dyadic gap box. Updates take the relation after the
// change.
class Mdbci {
public:
    // Seeds from gamb_cover(r).
    explicit Mdbci(const Relation& r);

    // `updated` already contains t. Throws if t was already a tuple, i.e. no
    // indexed box covers it.
    void insert(const Relation& updated, const Point& t);
    // `updated` no longer contains t. Throws if t was not a tuple, i.e. some
    // indexed box covers it.
    void erase(const Relation& updated, const Point& t);

    const DyadicBoxIndex& index() const { return index_; }
    std::vector<DyadicBox> boxes() const { return index_.sorted(); }
    int bit_width() const { return d_; }
    // Index probes spent by the most recent insert or erase.
    std::uint64_t last_probes() const { return last_probes_; }

private:
    int d_;
    DyadicBoxIndex index_;
    std::uint64_t last_probes_ = 0;
};

}  // namespace boxjoin
