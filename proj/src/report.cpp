#include "boxjoin/report.hpp"

#include <chrono>
#include <cstdio>

#include "boxjoin/coverkit.hpp"
#include "boxjoin/engine.hpp"
#include "boxjoin/instances.hpp"
#include "boxjoin/ordering.hpp"

namespace boxjoin {

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Triangle R(A,B), S(B,C), T(A,C) with `per_relation` random tuples each.
Query random_triangle(std::uint64_t seed, int d, std::size_t per_relation) {
    const char* names[] = {"R", "S", "T"};
    const std::vector<std::string> schemas[] = {{"A", "B"}, {"B", "C"}, {"A", "C"}};
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < 3; ++i) {
        const Query one = gen_random_sized(seed * 3 + i, d, {2}, per_relation, 2);
        rels.emplace_back(names[i], schemas[i], d, one.relations()[0].tuples());
    }
    return Query(std::move(rels));
}

BenchRecord join_record(const std::string& instance, const std::string& algorithm, const Query& q,
                        bool reorder) {
    BenchRecord rec{instance, algorithm, 0, q.total_tuples(), 0, 0, 0, 0};
    JoinResult res;
    rec.wall_ms = time_ms([&] {
        if (reorder) {
            res = tetris_reordered(q).inner;
        } else {
            BoxCover cover;
            for (const auto& r : q.relations()) cover.parts.push_back({r.name(), gamb_cover(r)});
            res = tetris_join(cover, q);
        }
    });
    if (reorder) {
        const Query moved = apply_ordering(q, adora(q));
        rec.cover_size = build_query_cover(moved).size();
    } else {
        rec.cover_size = build_query_cover(q).size();
    }
    rec.certificate_size = res.certificate.size();
    rec.witnesses = res.witnesses.size();
    rec.output_size = res.output.size();
    return rec;
}

}  // namespace

std::string report_header() {
    return "instance\talgorithm\twall_ms\tN\tcover_size\tcertificate_size\twitnesses\toutput_size\n";
}

std::string emit_report(const std::vector<BenchRecord>& records) {
    std::string out = report_header();
    for (const auto& r : records) {
        char ms[64];
        std::snprintf(ms, sizeof ms, "%.3f", r.wall_ms);
        out += r.instance + '\t' + r.algorithm + '\t' + ms + '\t' + std::to_string(r.n) + '\t' +
               std::to_string(r.cover_size) + '\t' + std::to_string(r.certificate_size) + '\t' +
               std::to_string(r.witnesses) + '\t' + std::to_string(r.output_size) + '\n';
    }
    return out;
}

std::vector<std::string> bench_suites() { return {"adora-scaling", "join", "checkerboard"}; }

std::vector<BenchRecord> run_bench(const std::string& suite, const BenchOptions& options) {
    std::vector<BenchRecord> out;
    if (suite == "adora-scaling") {
        if (options.steps == 0) throw Error("adora-scaling needs at least one size step");
        std::vector<std::size_t> sizes;
        std::size_t n = options.max_n;
        for (std::size_t i = 0; i < options.steps && n >= 3; ++i, n /= 2) sizes.insert(sizes.begin(), n);
        for (auto total : sizes) {
            for (std::size_t s = 0; s < options.seeds; ++s) {
                const Query q = random_triangle(options.seed + s, options.d, total / 3);
                BenchRecord rec{"triangle-N" + std::to_string(q.total_tuples()) + "-seed" + std::to_string(options.seed + s),
                                "adora", 0, q.total_tuples(), 0, 0, 0, 0};
                DomainOrdering sigma;
                rec.wall_ms = time_ms([&] { sigma = adora(q); });
                out.push_back(rec);
            }
        }
    } else if (suite == "join") {
        for (std::size_t s = 0; s < options.seeds; ++s) {
            const std::uint64_t seed = options.seed + s;
            const Query q = gen_random(seed, 3, {2, 2, 2}, {0.6}, 3);
            const std::string id = "random-d3-seed" + std::to_string(seed);
            out.push_back(join_record(id, "tetris", q, false));
            out.push_back(join_record(id, "tetris-reordered", q, true));
        }
    } else if (suite == "checkerboard") {
        for (int d = 1; d <= 4; ++d) {
            const auto cb = gen_checkerboard(d);
            const std::string id = "checkerboard-d" + std::to_string(d);
            out.push_back(join_record(id, "tetris", cb.query, false));
            out.push_back(join_record(id, "tetris-reordered", cb.query, true));
        }
    } else {
        throw Error("unknown bench suite " + suite);
    }
    return out;
}

}  // namespace boxjoin
