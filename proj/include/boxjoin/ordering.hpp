#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boxjoin/geometry.hpp"
#include "boxjoin/relational.hpp"

namespace boxjoin {

// Partition of the values of one attribute by hyperplane equality across
// every relation that mentions it.
struct EquivalenceClasses {
    std::string attribute;
    // Classes of the values that occur in some relation (the set D), in the
    // order produced by order_attr; each class is sorted ascending.
    std::vector<std::vector<std::uint64_t>> classes;
    // Domain values that occur in no relation, ascending. They all share the
    // empty hyperplane and so form one extra class when present.
    std::vector<std::uint64_t> absent;

    // h over D.
    std::size_t count() const { return classes.size(); }
    // h over the whole domain.
    std::size_t full_count() const { return classes.size() + (absent.empty() ? 0 : 1); }
    // Class id of every domain value (absent values share the last id).
    std::vector<std::size_t> labels(int d) const;
};

// Computes the ordering of one attribute that makes every equivalence class a
// consecutive run, together with the classes themselves.
struct AttributeOrder {
    // Old values in new order (a listing).
    std::vector<std::uint64_t> listing;
    EquivalenceClasses classes;
};

AttributeOrder order_attribute(const Query& q, std::string_view attr);

// Listing form of order_attribute.
std::vector<std::uint64_t> order_attr(const Query& q, std::string_view attr);
EquivalenceClasses equivalence_classes(const Query& q, std::string_view attr);

// One order_attr run per attribute of the query.
DomainOrdering adora(const Query& q);

// Adjacent pairs of sigma_A that sit in different equivalence classes.
std::size_t count_class_switches(const Query& q, const DomainOrdering& sigma, std::string_view attr);

struct GridCover {
    struct Part {
        std::string relation;
        // Per attribute of the relation, the runs as intervals of new values.
        std::vector<std::vector<Interval>> runs;
        // Gap grid cells.
        std::vector<GeneralBox> gap_boxes;
        // Dyadic decomposition of gap_boxes.
        std::vector<DyadicBox> dyadic;
    };
    std::vector<Part> parts;

    std::size_t general_count() const;
    std::size_t dyadic_count() const;
    std::string to_text() const;
};

// Builds the grid-box cover of sigma(q). The classes of q (under its original
// values) must each land on a consecutive run of sigma; otherwise throws.
GridCover grid_cover(const Query& q, const DomainOrdering& sigma);
GridCover grid_cover(const Query& q, const DomainOrdering& sigma,
                     const std::vector<EquivalenceClasses>& classes);

}  // namespace boxjoin
