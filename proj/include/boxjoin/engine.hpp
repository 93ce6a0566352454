#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boxjoin/coverkit.hpp"
#include "boxjoin/geometry.hpp"
#include "boxjoin/relational.hpp"

namespace boxjoin {

// Gap boxes over the full attribute universe gathered during a join.
class KnowledgeBase {
public:
    KnowledgeBase(std::size_t attributes, int d) : d_(d), index_(attributes) {}

    std::size_t arity() const { return index_.arity(); }
    int bit_width() const { return d_; }
    std::size_t size() const { return index_.size(); }

    bool insert(const DyadicBox& b) { return index_.insert(b); }
    bool contains(const DyadicBox& b) const { return index_.contains(b); }
    // Some single stored box contains b.
    bool covers(const DyadicBox& b) const { return index_.covers(b); }
    const DyadicBoxIndex& index() const { return index_; }

private:
    int d_;
    DyadicBoxIndex index_;
};

struct ResolutionConfig {
    bool enabled = false;
    // Resolutions allowed per call of resolve_step.
    std::size_t budget = 0;
};

struct CertificateEntry {
    std::size_t relation = 0;      // index into the query
    std::string relation_name;
    DyadicBox box;                 // over the relation's own schema
    DyadicBox extended;            // over the attribute universe
};

struct JoinResult {
    std::vector<Point> output;     // sorted, over the attribute universe
    std::vector<CertificateEntry> certificate;
    std::vector<Point> witnesses;
    std::size_t iterations = 0;
    std::size_t resolutions = 0;
};

// Least uncovered point of the cube in lexicographic order, or nothing when
// the boxes of K cover everything. Points below `start` are assumed covered
// and skipped.
std::optional<Point> find_witness(const KnowledgeBase& k, const std::optional<Point>& start = std::nullopt);

// Sibling resolution over K, seeded with every stored box. Returns the
// number of resolvents inserted (at most cfg.budget).
std::size_t resolve_step(KnowledgeBase& k, const ResolutionConfig& cfg);
// Same, seeded only with `seeds` (and any resolvent it produces).
std::size_t resolve_step(KnowledgeBase& k, const ResolutionConfig& cfg, std::vector<DyadicBox> seeds);

// Witness-driven join over box cover b. Every box of b must be a gap box of
// its relation and b must cover each relation's complement.
JoinResult tetris_join(const BoxCover& b, const Query& q, const ResolutionConfig& cfg = {});

struct ReorderedResult {
    std::vector<Point> output;     // original domain values, sorted
    DomainOrdering sigma;
    JoinResult inner;              // in reordered values
};

// adora, per-relation maximal gamb boxes of sigma(q), join, then map back.
ReorderedResult tetris_reordered(const Query& q, const ResolutionConfig& cfg = {});

}  // namespace boxjoin
