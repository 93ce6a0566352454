#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "boxjoin/coverkit.hpp"
#include "boxjoin/engine.hpp"
#include "boxjoin/instances.hpp"
#include "boxjoin/oracle.hpp"
#include "boxjoin/ordering.hpp"
#include "boxjoin/report.hpp"

using namespace boxjoin;

namespace {

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 1;
    int limit_d = OracleLimits{}.max_d;
    std::size_t limit_tuples = OracleLimits{}.max_tuples;
    std::uint64_t limit_points = OracleLimits{}.max_points;
    std::uint64_t limit_permutations = OracleLimits{}.max_permutations;
    double time_budget = OracleLimits{}.time_budget_s;
    std::string out;
    bool verify = false;

    OracleLimits limits() const {
        OracleLimits l;
        l.max_d = limit_d;
        l.max_tuples = limit_tuples;
        l.max_points = limit_points;
        l.max_permutations = limit_permutations;
        l.time_budget_s = time_budget;
        return l;
    }
};

Query load_query(const std::vector<std::string>& paths) {
    std::vector<Relation> rels;
    for (const auto& p : paths) rels.push_back(read_relation_file(p));
    return Query(std::move(rels));
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) std::cout << text;
    else write_text_file(g.out, text);
}

std::string format_points(const std::vector<std::string>& attributes, const std::vector<Point>& points) {
    std::string s = "#";
    for (const auto& a : attributes) s += ' ' + a;
    s += '\n';
    for (const auto& p : points) s += format_tuple(p) + '\n';
    return s;
}

// "0-3 5 7-9"
std::string format_values(const std::vector<std::uint64_t>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == values[j] + 1) ++j;
        if (!s.empty()) s += ' ';
        s += std::to_string(values[i]);
        if (j > i) s += '-' + std::to_string(values[j]);
        i = j + 1;
    }
    return s;
}

std::string general_box_line(const std::string& rel, const GeneralBox& b) {
    std::string s = "gbox " + rel;
    for (const auto& side : b.sides) s += " [" + std::to_string(side.lo) + "," + std::to_string(side.hi) + "]";
    return s;
}

std::string write_in_dir(const std::string& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    const auto path = (std::filesystem::path(dir) / name).string();
    write_text_file(path, text);
    return path;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Box-cover joins, domain orderings and exact oracles over dyadic boxes"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for randomized paths");
    app.add_option("--limit-d", g.limit_d, "Largest bit width the oracles accept");
    app.add_option("--limit-tuples", g.limit_tuples, "Largest tuple count the oracles accept");
    app.add_option("--limit-points", g.limit_points, "Largest cube size the oracles enumerate");
    app.add_option("--limit-permutations", g.limit_permutations, "Largest number of orderings searched");
    app.add_option("--time-budget", g.time_budget, "Seconds allowed for one exhaustive search");
    app.add_option("--out", g.out, "Write the main output to this file instead of stdout");
    app.add_flag("--verify", g.verify, "Cross-check against the oracles where defined");

    std::function<void()> action;

    // gamb
    std::string gamb_rel;
    bool maximal_only = false;
    auto* gamb_cmd = app.add_subcommand("gamb", "Dyadic gap boxes of one relation (box dump)");
    gamb_cmd->add_option("--rel", gamb_rel, "Relation file")->required();
    gamb_cmd->add_flag("--maximal-only", maximal_only, "Keep only maximal boxes");
    gamb_cmd->callback([&] {
        action = [&] {
            const Relation r = read_relation_file(gamb_rel);
            auto boxes = gamb_cover(r);
            if (maximal_only) boxes = maximality_filter(boxes, r);
            if (g.verify) {
                const auto expect = enumerate_maximal_dyadic_gap_boxes(r, g.limits());
                if (maximality_filter(gamb_cover(r), r) != expect && !(r.empty()))
                    throw Error("maximal boxes differ from the exhaustive enumeration");
            }
            std::string text;
            for (const auto& b : boxes) text += format_box_line(r.name(), b) + '\n';
            emit(g, text);
        };
    });

    // adora / classes / gridcover
    std::vector<std::string> rels;
    auto* adora_cmd = app.add_subcommand("adora", "Domain ordering that groups equivalence classes");
    adora_cmd->add_option("--rel", rels, "Relation files")->required();
    adora_cmd->callback([&] {
        action = [&] { emit(g, serialize_ordering(adora(load_query(rels)))); };
    });

    std::string attr;
    auto* classes_cmd = app.add_subcommand("classes", "Equivalence classes of one attribute");
    classes_cmd->add_option("--rel", rels, "Relation files")->required();
    classes_cmd->add_option("--attr", attr, "Attribute")->required();
    classes_cmd->callback([&] {
        action = [&] {
            const auto c = equivalence_classes(load_query(rels), attr);
            std::string text = "attribute " + c.attribute + " classes " + std::to_string(c.full_count()) + '\n';
            for (std::size_t i = 0; i < c.classes.size(); ++i)
                text += "class " + std::to_string(i) + ": " + format_values(c.classes[i]) + '\n';
            if (!c.absent.empty()) text += "absent: " + format_values(c.absent) + '\n';
            emit(g, text);
        };
    });

    std::string order_file;
    bool summary = false;
    auto* grid_cmd = app.add_subcommand("gridcover", "Grid-box cover under an ordering (box dump)");
    grid_cmd->add_option("--rel", rels, "Relation files")->required();
    grid_cmd->add_option("--order", order_file, "Ordering file (default: adora)");
    grid_cmd->add_flag("--summary", summary, "Print box counts instead of boxes");
    grid_cmd->callback([&] {
        action = [&] {
            const Query q = load_query(rels);
            const DomainOrdering sigma = order_file.empty() ? adora(q) : parse_ordering(read_text_file(order_file), q.bit_width());
            const auto cover = grid_cover(q, sigma);
            if (summary)
                emit(g, "general " + std::to_string(cover.general_count()) + "\ndyadic " +
                            std::to_string(cover.dyadic_count()) + '\n');
            else
                emit(g, cover.to_text());
        };
    });

    // join
    bool reorder = false;
    std::string cert_file, witness_file;
    std::size_t resolution_budget = 0;
    auto* join_cmd = app.add_subcommand("join", "Witness-driven join over the gap-box cover");
    join_cmd->add_option("--rel", rels, "Relation files")->required();
    join_cmd->add_flag("--reorder", reorder, "Reorder domains with adora first");
    join_cmd->add_option("--emit-certificate", cert_file, "Write the certificate boxes here");
    join_cmd->add_option("--emit-witnesses", witness_file, "Write the witness points here");
    join_cmd->add_option("--resolution-budget", resolution_budget, "Resolutions per witness (0 = off)");
    join_cmd->callback([&] {
        action = [&] {
            const Query q = load_query(rels);
            ResolutionConfig cfg{resolution_budget > 0, resolution_budget};
            JoinResult inner;
            std::vector<Point> output;
            if (reorder) {
                auto res = tetris_reordered(q, cfg);
                output = std::move(res.output);
                inner = std::move(res.inner);
            } else {
                BoxCover cover;
                for (const auto& r : q.relations()) cover.parts.push_back({r.name(), gamb_cover(r)});
                inner = tetris_join(cover, q, cfg);
                output = inner.output;
            }
            if (g.verify && output != brute_join(q, g.limits())) throw Error("join output differs from the nested-loop join");
            if (!cert_file.empty()) {
                std::string text = reorder ? "# boxes over reordered values\n" : "";
                for (const auto& c : inner.certificate) text += format_box_line(c.relation_name, c.box) + '\n';
                write_text_file(cert_file, text);
            }
            if (!witness_file.empty()) {
                std::string text = reorder ? "# points over reordered values\n" : "";
                write_text_file(witness_file, text + format_points(q.attributes(), inner.witnesses));
            }
            emit(g, format_points(q.attributes(), output));
        };
    });

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive reference computations");
    oracle_cmd->require_subcommand(1);
    std::string matrix_file, cover_file;
    bool fast_symmetry = false, minimise = false;

    auto* mincover = oracle_cmd->add_subcommand("mincover", "Minimum general box cover of each relation");
    mincover->add_option("--rel", rels, "Relation files")->required();
    mincover->callback([&] {
        action = [&] {
            const auto limits = g.limits();
            std::string text;
            std::size_t total = 0;
            for (const auto& path : rels) {
                const Relation r = read_relation_file(path);
                const auto c = min_box_cover(r, limits);
                total += c.size;
                text += "K " + r.name() + " " + std::to_string(c.size) + '\n';
                for (const auto& b : c.boxes) text += general_box_line(r.name(), b) + '\n';
            }
            emit(g, "K " + std::to_string(total) + '\n' + text);
        };
    });

    auto* minorder = oracle_cmd->add_subcommand("minorder", "Minimum cover over all domain orderings (2^d <= 4)");
    minorder->add_option("--rel", rels, "Relation files")->required();
    minorder->add_flag("--fast-symmetry", fast_symmetry, "Pin sigma(0) = 0; not exact in general");
    minorder->callback([&] {
        action = [&] {
            const auto res = min_cover_over_orderings(load_query(rels), g.limits(), fast_symmetry);
            emit(g, "K* " + std::to_string(res.k) + '\n' + serialize_ordering(res.sigma));
        };
    });

    auto* mincert = oracle_cmd->add_subcommand("mincert", "Minimum box certificate of a cover");
    mincert->add_option("--rel", rels, "Relation files")->required();
    mincert->add_option("--cover", cover_file, "Box dump (default: gamb cover of each relation)");
    mincert->callback([&] {
        action = [&] {
            const Query q = load_query(rels);
            BoxCover cover;
            if (cover_file.empty()) {
                for (const auto& r : q.relations()) cover.parts.push_back({r.name(), gamb_cover(r)});
            } else {
                cover = parse_box_cover(read_text_file(cover_file));
            }
            const auto res = min_certificate(q, cover, g.limits());
            std::string text = "C " + std::to_string(res.size) + '\n';
            for (const auto& [pi, bi] : res.chosen) text += format_box_line(cover.parts[pi].relation, cover.parts[pi].boxes[bi]) + '\n';
            emit(g, text);
        };
    });

    auto* maxgen = oracle_cmd->add_subcommand("maxgen", "Maximal general gap boxes");
    maxgen->add_option("--rel", rels, "Relation files")->required();
    maxgen->callback([&] {
        action = [&] {
            std::string text;
            for (const auto& path : rels) {
                const Relation r = read_relation_file(path);
                const auto boxes = enumerate_maximal_general_gap_boxes(r, g.limits());
                text += "count " + r.name() + " " + std::to_string(boxes.size()) + '\n';
                for (const auto& b : boxes) text += general_box_line(r.name(), b) + '\n';
            }
            emit(g, text);
        };
    });

    auto* cb = oracle_cmd->add_subcommand("cb", "Consecutive blocks of a 0/1 matrix");
    cb->add_option("--matrix", matrix_file, "Matrix file")->required();
    cb->add_flag("--min", minimise, "Also minimise over column orders");
    cb->callback([&] {
        action = [&] {
            const auto m = BoolMatrix::parse(read_text_file(matrix_file));
            std::string text = "cb " + std::to_string(consecutive_blocks(m)) + '\n';
            if (minimise) {
                const auto best = min_cb_over_columns(m);
                text += "min " + std::to_string(best.k) + "\norder";
                for (auto c : best.order) text += ' ' + std::to_string(c);
                text += '\n';
            }
            emit(g, text);
        };
    });

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "Instance generators");
    gen_cmd->require_subcommand(1);
    std::string out_dir = ".";
    int gen_d = 3, lift_p = 1, pool = 0;
    std::uint64_t gen_n = 8;
    std::vector<std::size_t> arities{2, 2, 2};
    std::vector<double> densities{0.5};

    auto* g_cb = gen_cmd->add_subcommand("checkerboard", "Odd-parity triangle and its grouping order");
    g_cb->add_option("--d", gen_d, "Bit width")->required();
    g_cb->add_option("--out-dir", out_dir, "Output directory");
    g_cb->callback([&] {
        action = [&] {
            const auto inst = gen_checkerboard(gen_d);
            std::string text;
            for (const auto& r : inst.query.relations())
                text += write_in_dir(out_dir, r.name() + ".rel", serialize_relation(r)) + '\n';
            text += write_in_dir(out_dir, "sigma.ord", serialize_ordering(inst.sigma)) + '\n';
            emit(g, text);
        };
    });

    auto* g_lift = gen_cmd->add_subcommand("lift", "Prepend p free bits to every value");
    g_lift->add_option("--rel", rels, "Relation files")->required();
    g_lift->add_option("--p", lift_p, "Extra bits")->required();
    g_lift->add_option("--out-dir", out_dir, "Output directory");
    g_lift->callback([&] {
        action = [&] {
            const Query lifted = lift_query(load_query(rels), lift_p);
            std::string text;
            for (const auto& r : lifted.relations())
                text += write_in_dir(out_dir, r.name() + ".rel", serialize_relation(r)) + '\n';
            emit(g, text);
        };
    });

    auto* g_tight = gen_cmd->add_subcommand("adora-tight", "R_d and its even-first order");
    g_tight->add_option("--d", gen_d, "Bit width")->required();
    g_tight->add_option("--out-dir", out_dir, "Output directory");
    g_tight->callback([&] {
        action = [&] {
            const auto inst = gen_adora_tight(gen_d);
            emit(g, write_in_dir(out_dir, "R.rel", serialize_relation(inst.relation)) + '\n' +
                        write_in_dir(out_dir, "sigma.ord", serialize_ordering(inst.sigma)) + '\n');
        };
    });

    auto* g_many = gen_cmd->add_subcommand("many-maximal", "Two anti-diagonal stripes over N x N");
    g_many->add_option("--n", gen_n, "Grid side, a power of two")->required();
    g_many->add_option("--out-dir", out_dir, "Output directory");
    g_many->callback([&] {
        action = [&] { emit(g, write_in_dir(out_dir, "R.rel", serialize_relation(gen_many_maximal(gen_n))) + '\n'); };
    });

    auto* g_random = gen_cmd->add_subcommand("random", "Seeded random query");
    g_random->add_option("--d", gen_d, "Bit width");
    g_random->add_option("--arities", arities, "Arity per relation")->delimiter(',');
    g_random->add_option("--density", densities, "Density, one or one per relation")->delimiter(',');
    g_random->add_option("--attributes", pool, "Attribute pool size (default: max arity + 1)");
    g_random->add_option("--out-dir", out_dir, "Output directory");
    g_random->callback([&] {
        action = [&] {
            const Query q = gen_random(g.seed, gen_d, arities, densities, static_cast<std::size_t>(pool));
            std::string text;
            for (const auto& r : q.relations())
                text += write_in_dir(out_dir, r.name() + ".rel", serialize_relation(r)) + '\n';
            emit(g, text);
        };
    });

    auto* g_red = gen_cmd->add_subcommand("reduce2cbmp", "Matrix M' and relation R' of the reduction");
    g_red->add_option("--matrix", matrix_file, "Matrix file, at most two ones per row")->required();
    g_red->add_option("--out-dir", out_dir, "Output directory");
    g_red->callback([&] {
        action = [&] {
            const auto red = reduce_2cbmp(BoolMatrix::parse(read_text_file(matrix_file)));
            emit(g, write_in_dir(out_dir, "Mprime.txt", red.matrix.to_text()) + '\n' +
                        write_in_dir(out_dir, "M.rel", serialize_relation(red.relation)) + '\n');
        };
    });

    // reduce2cbmp (with optional equivalence check)
    bool check = false;
    auto* red_cmd = app.add_subcommand("reduce2cbmp", "Print M' for a matrix; --check compares both optima");
    red_cmd->add_option("--matrix", matrix_file, "Matrix file")->required();
    red_cmd->add_flag("--check", check, "Compare min cb(M) + 2n with the reordered cover of M'");
    red_cmd->callback([&] {
        action = [&] {
            const auto m = BoolMatrix::parse(read_text_file(matrix_file));
            const auto red = reduce_2cbmp(m);
            std::string text = red.matrix.to_text();
            if (check || g.verify) {
                const auto k = min_cb_over_columns(m).k;
                const auto cover = min_matrix_cover_over_orders(red.matrix, g.limits());
                text += "min_cb " + std::to_string(k) + "\nmin_cover " + std::to_string(cover) + "\n";
                if (cover != k + 2 * m.rows()) throw Error("min cover " + std::to_string(cover) + " != min cb + 2n = " + std::to_string(k + 2 * m.rows()));
                text += "equivalent yes\n";
            }
            emit(g, text);
        };
    });

    // mdbci-sim
    std::string ops_file, sim_rel;
    auto* sim_cmd = app.add_subcommand("mdbci-sim", "Replay inserts and deletes against the box index");
    sim_cmd->add_option("--rel", sim_rel, "Initial relation")->required();
    sim_cmd->add_option("--ops", ops_file, "Lines 'ins v...' or 'del v...'")->required();
    sim_cmd->callback([&] {
        action = [&] {
            Relation r = read_relation_file(sim_rel);
            Mdbci index(r);
            std::istringstream in(read_text_file(ops_file));
            std::string line, text;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
                std::istringstream words(line);
                std::string op;
                if (!(words >> op)) continue;
                std::string rest;
                std::getline(words, rest);
                const Point t = parse_tuple(rest, r.arity(), r.bit_width(), line_no);
                if (op == "ins") {
                    if (!r.insert(t)) throw ParseError(line_no, "tuple " + format_tuple(t) + " is already present");
                    index.insert(r, t);
                } else if (op == "del") {
                    if (!r.erase(t)) throw ParseError(line_no, "tuple " + format_tuple(t) + " is not present");
                    index.erase(r, t);
                } else {
                    throw ParseError(line_no, "unknown operation '" + op + "'");
                }
                text += op + ' ' + format_tuple(t) + " boxes " + std::to_string(index.boxes().size()) + " probes " +
                        std::to_string(index.last_probes()) + '\n';
                if (g.verify && maximality_filter(index.boxes(), r) != maximality_filter(gamb_cover(r), r))
                    throw Error("line " + std::to_string(line_no) + ": index lost a maximal box");
            }
            emit(g, text);
        };
    });

    // bench
    std::string suite;
    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark suites as a tab-separated report");
    bench_cmd->add_option("--suite", suite, "adora-scaling, join or checkerboard")->required();
    bench_cmd->add_option("--seeds", bench.seeds, "Seeds per configuration");
    bench_cmd->add_option("--max-n", bench.max_n, "adora-scaling: largest input size");
    bench_cmd->add_option("--steps", bench.steps, "adora-scaling: number of halvings");
    bench_cmd->add_option("--d", bench.d, "adora-scaling: bit width");
    bench_cmd->callback([&] {
        action = [&] {
            bench.seed = g.seed;
            emit(g, emit_report(run_bench(suite, bench)));
        };
    });

    // class count bound
    auto* bound_cmd = app.add_subcommand("lemma2-check", "Class count h against 2K+1 under an ordering");
    bound_cmd->add_option("--rel", rels, "Relation files")->required();
    bound_cmd->add_option("--order", order_file, "Ordering file (default: identity)");
    bound_cmd->callback([&] {
        action = [&] {
            const Query q = load_query(rels);
            const DomainOrdering sigma = order_file.empty() ? DomainOrdering::identity(q.attributes(), q.bit_width())
                                                            : parse_ordering(read_text_file(order_file), q.bit_width());
            const std::size_t k = min_query_cover(apply_ordering(q, sigma), g.limits());
            std::string text = "K " + std::to_string(k) + '\n';
            bool ok = true;
            for (const auto& a : q.attributes()) {
                const auto h = equivalence_classes(q, a).full_count();
                const bool holds = h <= 2 * k + 1;
                ok = ok && holds;
                text += a + " h " + std::to_string(h) + (holds ? " ok\n" : " VIOLATION\n");
            }
            emit(g, text);
            if (!ok) throw Error("class count exceeds 2K+1");
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }
    try {
        if (!action) throw UsageError("no command given");
        action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
