#include "boxjoin/engine.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "boxjoin/ordering.hpp"

namespace boxjoin {

namespace {

struct WitnessSearch {
    const KnowledgeBase& k;
    const std::optional<Point>& start;
    int d;

    std::optional<Point> run(DyadicBox& cube) const {
        if (start && cube.max_point(d) < *start) return std::nullopt;
        if (k.covers(cube)) return std::nullopt;
        std::size_t attr = 0;
        while (attr < cube.arity() && cube[attr].len == d) ++attr;
        if (attr == cube.arity()) return cube.min_point(d);
        const Prefix saved = cube[attr];
        for (unsigned bit = 0; bit < 2; ++bit) {
            cube[attr] = saved.child(bit);
            auto found = run(cube);
            if (found) {
                cube[attr] = saved;
                return found;
            }
        }
        cube[attr] = saved;
        return std::nullopt;
    }
};

DyadicBox extend(const DyadicBox& local, const std::vector<std::size_t>& positions, std::size_t universe) {
    DyadicBox out = DyadicBox::all_star(universe);
    for (std::size_t i = 0; i < positions.size(); ++i) out[positions[i]] = local[i];
    return out;
}

}  // namespace

std::optional<Point> find_witness(const KnowledgeBase& k, const std::optional<Point>& start) {
    DyadicBox cube = DyadicBox::all_star(k.arity());
    return WitnessSearch{k, start, k.bit_width()}.run(cube);
}

std::size_t resolve_step(KnowledgeBase& k, const ResolutionConfig& cfg) {
    return resolve_step(k, cfg, k.index().sorted());
}

std::size_t resolve_step(KnowledgeBase& k, const ResolutionConfig& cfg, std::vector<DyadicBox> seeds) {
    if (!cfg.enabled || cfg.budget == 0) return 0;
    std::deque<DyadicBox> work(seeds.begin(), seeds.end());
    std::size_t added = 0;
    while (!work.empty() && added < cfg.budget) {
        const DyadicBox b = std::move(work.front());
        work.pop_front();
        for (std::size_t a = 0; a < b.arity() && added < cfg.budget; ++a) {
            if (b[a].is_star()) continue;
            // Partners: sibling on a, a truncation of b elsewhere. The
            // resolvent is then b with a's last bit dropped.
            DyadicBox partner = b;
            partner[a] = b[a].flipped();
            DyadicBox resolvent = b;
            resolvent[a] = b[a].parent();
            if (k.covers(resolvent)) continue;
            bool found = false;
            std::vector<int> len(b.arity());
            for (std::size_t i = 0; i < b.arity(); ++i) len[i] = b[i].len;
            while (!found) {
                for (std::size_t i = 0; i < b.arity(); ++i)
                    if (i != a) partner[i] = b[i].truncated(len[i]);
                found = k.contains(partner);
                std::size_t i = 0;
                for (; i < b.arity(); ++i) {
                    if (i == a) continue;
                    if (len[i] > 0) {
                        --len[i];
                        break;
                    }
                    len[i] = b[i].len;
                }
                if (i == b.arity()) break;
            }
            if (!found) continue;
            k.insert(resolvent);
            work.push_back(resolvent);
            ++added;
        }
    }
    return added;
}

JoinResult tetris_join(const BoxCover& b, const Query& q, const ResolutionConfig& cfg) {
    const std::size_t n = q.attribute_count();
    const int d = q.bit_width();

    std::vector<DyadicBoxIndex> covers;
    for (const auto& r : q.relations()) covers.emplace_back(r.arity());
    for (const auto& part : b.parts) {
        std::size_t ri = 0;
        while (ri < q.relations().size() && q.relations()[ri].name() != part.relation) ++ri;
        if (ri == q.relations().size()) throw Error("box cover names unknown relation " + part.relation);
        const Relation& r = q.relations()[ri];
        OccupancyIndex occ(r);
        for (const auto& box : part.boxes) {
            if (box.arity() != r.arity()) throw Error("box " + box.to_string() + " does not fit relation " + r.name());
            for (std::size_t i = 0; i < box.arity(); ++i)
                if (box[i].len > d) throw Error("box " + box.to_string() + " is deeper than the bit width");
            if (occ.occupied(box)) throw Error("box " + box.to_string() + " is not a gap box of " + r.name());
            covers[ri].insert(box);
        }
    }

    KnowledgeBase k(n, d);
    JoinResult result;
    std::unordered_set<DyadicBox, DyadicBoxHash> in_certificate;
    std::optional<Point> start;
    while (auto o = find_witness(k, start)) {
        ++result.iterations;
        std::vector<DyadicBox> fresh;
        for (std::size_t ri = 0; ri < q.relations().size(); ++ri) {
            const auto& pos = q.positions(ri);
            const auto local = DyadicBox::unit(project(q, ri, *o), d);
            for (const auto& box : covers[ri].query_superboxes(local)) {
                DyadicBox ext = extend(box, pos, n);
                if (in_certificate.insert(ext).second) {
                    result.certificate.push_back({ri, q.relations()[ri].name(), box, ext});
                    k.insert(ext);
                    fresh.push_back(std::move(ext));
                }
            }
        }
        if (fresh.empty()) {
            result.output.push_back(*o);
            k.insert(DyadicBox::unit(*o, d));
        } else {
            result.witnesses.push_back(*o);
            if (cfg.enabled) result.resolutions += resolve_step(k, cfg, std::move(fresh));
        }
        start = std::move(o);
    }
    return result;
}

ReorderedResult tetris_reordered(const Query& q, const ResolutionConfig& cfg) {
    ReorderedResult out;
    out.sigma = adora(q);
    const Query reordered = apply_ordering(q, out.sigma);
    BoxCover cover;
    for (const auto& r : reordered.relations())
        cover.parts.push_back({r.name(), maximality_filter(gamb_cover(r), r)});
    out.inner = tetris_join(cover, reordered, cfg);
    out.output = apply_ordering(out.inner.output, q.attributes(), invert_ordering(out.sigma));
    std::sort(out.output.begin(), out.output.end());
    return out;
}

}  // namespace boxjoin
