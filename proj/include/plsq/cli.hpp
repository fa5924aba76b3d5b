#pragma once
// Subcommand front end.  Kept in a header so tests can call cli_main with
// argv vectors directly instead of spawning the binary.
//
// Exit codes: 0 success, 1 bad input, 2 verification failure, 3 budget or
// resource exhaustion.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plsq/common.hpp"
#include "plsq/count.hpp"
#include "plsq/cycles.hpp"
#include "plsq/decomp.hpp"
#include "plsq/extract.hpp"
#include "plsq/gen.hpp"
#include "plsq/io.hpp"
#include "plsq/pls.hpp"
#include "plsq/quadrangle.hpp"
#include "plsq/vk.hpp"

namespace plsq {

namespace cli {

inline std::vector<Cell> parse_cycle(const std::string& s) {
    std::vector<Cell> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ';')) {
        if (part.empty()) continue;
        Cell c;
        char c1 = 0, c2 = 0;
        std::istringstream row(part);
        if (!(row >> c.x >> c1 >> c.y >> c2 >> c.z) || c1 != ',' || c2 != ',')
            throw input_error("bad cycle cell: " + part + " (want x,y,z;x,y,z;...)");
        out.push_back(c);
    }
    return out;
}

inline void emit(const nlohmann::json& j, bool pretty) {
    if (pretty)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << j.dump() << "\n";
}

inline nlohmann::json violation_to_json(const QCViolation& v) {
    auto cell_j = [](const Cell& c) { return nlohmann::json{c.x, c.y, c.z}; };
    return nlohmann::json{{"kind", to_string(v.kind)},
                          {"witness", {cell_j(v.ra), cell_j(v.rb), cell_j(v.rc), cell_j(v.rd)}},
                          {"prefix", {cell_j(v.oa), cell_j(v.ob), cell_j(v.oc)}},
                          {"displaced", cell_j(v.displaced)},
                          {"expected", v.expected},
                          {"found", v.found}};
}

// Generator specs: cyclic:N, product:N1xN2[x..], quasigroup:N:SEED.  An
// optional suffix @P:SEED keeps each cell with probability P.
inline Pls from_gen_spec(const std::string& spec) {
    std::string base = spec;
    double keep = -1.0;
    u64 keep_seed = 0;
    if (auto at = spec.find('@'); at != std::string::npos) {
        base = spec.substr(0, at);
        std::string rest = spec.substr(at + 1);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw input_error("restriction suffix wants @P:SEED, got @" + rest);
        keep = std::stod(rest.substr(0, colon));
        keep_seed = std::stoull(rest.substr(colon + 1));
    }
    std::vector<std::string> parts;
    {
        std::istringstream in(base);
        std::string p;
        while (std::getline(in, p, ':')) parts.push_back(p);
    }
    if (parts.empty()) throw input_error("empty generator spec");
    Pls a(Dims{0, 0, 0}, {});
    if (parts[0] == "cyclic" && parts.size() == 2) {
        a = gen_cyclic(std::stoi(parts[1]));
    } else if (parts[0] == "product" && parts.size() == 2) {
        std::vector<int> factors;
        std::istringstream in(parts[1]);
        std::string f;
        while (std::getline(in, f, 'x')) factors.push_back(std::stoi(f));
        a = gen_cyclic_product(factors);
    } else if (parts[0] == "quasigroup" && parts.size() == 3) {
        a = random_quasigroup(std::stoi(parts[1]), std::stoull(parts[2]));
    } else {
        throw input_error("unknown generator spec: " + spec +
                          " (want cyclic:N, product:N1xN2, quasigroup:N:SEED)");
    }
    if (keep >= 0.0) a = restrict_random(a, keep, keep_seed);
    return a;
}

// Instance source shared by the subcommands: exactly one of --in / --gen.
struct Source {
    std::string in_path;
    std::string gen_spec;

    void attach(CLI::App* cmd) {
        cmd->add_option("--in", in_path, "instance JSON file");
        cmd->add_option("--gen", gen_spec, "generator spec (cyclic:N, product:N1xN2, ...)");
    }

    Pls load(RunConfig& rc) const {
        if (in_path.empty() == gen_spec.empty())
            throw input_error("need exactly one of --in or --gen");
        rc.input = in_path.empty() ? gen_spec : in_path;
        return in_path.empty() ? from_gen_spec(gen_spec) : load_pls(in_path);
    }
};

inline unsigned default_threads() {
    if (const char* env = std::getenv("PLSQ_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return unsigned(v);
    }
    return 1;
}

inline void write_artifact(const std::string& path, nlohmann::json j, const RunConfig& rc,
                           bool pretty) {
    j["run"] = to_json(rc);
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << (pretty ? j.dump(2) : j.dump()) << "\n";
}

}  // namespace cli

inline int cli_main_inner(int argc, char** argv) {
    CLI::App app{"partial Latin square toolkit"};
    app.require_subcommand(1);

    bool pretty = false;
    unsigned threads = cli::default_threads();
    app.add_flag("--pretty", pretty, "indent JSON, print human tables");
    app.add_option("--threads", threads, "worker cap (default from PLSQ_THREADS)");

    u64 seed = 0, budget = 0;
    std::string out_path, cycle_str, kind_str = "label", what, disc_spec;
    int r = 2, row = 0, col = 0;
    double eps = 0.0, theta = 0.0, keep = 1.0;
    cli::Source src;

    // gen
    auto* g = app.add_subcommand("gen", "generate an instance and write it as JSON");
    std::string gen_spec;
    g->add_option("spec", gen_spec, "cyclic:N | product:N1xN2 | quasigroup:N:SEED")->required();
    g->add_option("--out", out_path, "output instance path")->required();
    g->add_option("--scramble", seed, "relabel all classes with seeded permutations");
    g->add_option("--restrict", keep, "keep each cell with this probability");
    u64 restrict_seed = 0;
    g->add_option("--restrict-seed", restrict_seed, "seed for --restrict");

    // validate
    auto* val = app.add_subcommand("validate", "check an instance file");
    std::string val_in;
    val->add_option("--in", val_in, "instance JSON file")->required();

    // count
    auto* cnt = app.add_subcommand("count", "count substructures (CSV: metric,value,method,ms)");
    cnt->add_option("what", what, "octahedra | rectangles | cycles | assoc")->required();
    src.attach(cnt);
    cnt->add_option("--kind", kind_str, "cycle kind: label | column | row");
    cnt->add_option("--r", r, "cycle half-length");
    cnt->add_option("--out", out_path, "also write a JSON artifact");

    // qc
    auto* qc = app.add_subcommand("qc", "quadrangle conditions and reconstruction");
    qc->require_subcommand(1);
    auto* qc_check = qc->add_subcommand("check", "list violations");
    cli::Source qc_src;
    qc_src.attach(qc_check);
    qc_check->add_option("--kind", kind_str, "label | column | row | all");
    auto* qc_defect = qc->add_subcommand("defect", "completion defect");
    cli::Source qd_src;
    qd_src.attach(qc_defect);
    qc_defect->add_option("--kind", kind_str, "label | column | row");
    qc_defect->add_option("--r", r, "cycle half-length");
    qc_defect->add_option("--budget", budget, "state budget (0 = default)");
    bool with_hist = false;
    qc_defect->add_flag("--hist", with_hist, "include the defect histogram");
    auto* qc_rec = qc->add_subcommand("reconstruct", "group table from a clean square");
    cli::Source qr_src;
    qr_src.attach(qc_rec);
    qc_rec->add_option("--row", row, "reference row R");
    qc_rec->add_option("--col", col, "reference column C");
    qc_rec->add_option("--out", out_path, "write the table here instead of stdout");

    // decomp
    auto* dec = app.add_subcommand("decomp", "decomposition counters");
    dec->require_subcommand(1);
    cli::Source dp_src, dr_src, dd_src;
    auto* dp = dec->add_subcommand("point", "point decompositions of a cycle");
    dp_src.attach(dp);
    dp->add_option("--cycle", cycle_str, "cells x,y,z;x,y,z;... (row-first)")->required();
    dp->add_option("--eps", eps, "popularity threshold");
    dp->add_option("--budget", budget, "state budget (0 = default)");
    auto* dr = dec->add_subcommand("ring", "ring decompositions of a cycle");
    dr_src.attach(dr);
    dr->add_option("--cycle", cycle_str, "cells x,y,z;x,y,z;... (row-first)")->required();
    dr->add_option("--theta", theta, "popularity threshold");
    dr->add_option("--budget", budget, "state budget (0 = default)");
    auto* dd = dec->add_subcommand("dispersed", "dispersed ring decompositions");
    dd_src.attach(dd);
    dd->add_option("--cycle", cycle_str, "cells x,y,z;x,y,z;... (row-first)")->required();
    dd->add_option("--budget", budget, "state budget (0 = default)");
    auto* dt = dec->add_subcommand("trivmax", "trivial maximum of a boundary-fixed disc");
    dt->add_option("--disc", disc_spec, "polygon:R | dispersed:R")->required();
    int ambient = 0;
    dt->add_option("--n", ambient, "ambient class size")->required();

    // vk
    auto* vk = app.add_subcommand("vk", "word metric: distances, slit scan, embedding report");
    vk->require_subcommand(1);
    cli::Source vd_src, vs_src, ve_src;
    std::string w1_str, w2_str;
    int cap = -1;
    auto* vd = vk->add_subcommand("dist", "search for a small-area equality certificate");
    vd_src.attach(vd);
    vd->add_option("--w1", w1_str, "first word, e.g. \"x0 y1'\" or \"z2\"")->required();
    vd->add_option("--w2", w2_str, "second word")->required();
    vd->add_option("--budget", budget, "area budget")->required();
    vd->add_option("--cap", cap, "intermediate length cap (default |w1|+|w2|+3b)");
    vd->add_option("--out", out_path, "write the result here instead of stdout");
    auto* vs = vk->add_subcommand("scan", "slit configurations with word-metric evidence");
    vs_src.attach(vs);
    vs->add_option("--budget", budget, "area budget for the evidence searches (default 9)");
    vs->add_option("--cap", cap, "intermediate length cap for the searches (default 6)");
    auto* ve = vk->add_subcommand("embed", "separation report for the scaled embedding");
    ve_src.attach(ve);
    ve->add_option("--budget", budget, "area budget b; reported distances are area/b")
        ->required();
    ve->add_option("--cap", cap, "intermediate length cap (default 2 + 3b)");
    ve->add_option("--out", out_path, "write the report here instead of stdout");

    // extract
    auto* ext = app.add_subcommand("extract", "dense well-behaved subset extraction");
    ext->require_subcommand(1);
    cli::Source eq_src, ed_src, ep_src;
    std::string trace_path;
    double delta = 0.0, gamma = 0.0;
    int kk = 2;
    auto* eq = ext->add_subcommand("qc", "extraction pipeline with hard verification");
    eq_src.attach(eq);
    eq->add_option("--seed", seed, "tie-break seed");
    eq->add_option("--trace", trace_path, "write the stage trace JSON here");
    eq->add_option("--out", out_path, "write the extracted instance here");
    auto* ed = ext->add_subcommand("drs", "one dependent-random-selection step");
    ed_src.attach(ed);
    ed->add_option("--eps", eps, "density parameter in (0,1)")->required();
    ed->add_option("--delta", delta, "popularity parameter in (0,1)")->required();
    ed->add_option("--k", kk, "cycle half-length bound (default 2)");
    ed->add_option("--seed", seed, "tie-break seed");
    ed->add_option("--trace", trace_path, "write the stage trace JSON here");
    ed->add_option("--out", out_path, "write the selected subset here");
    auto* ep = ext->add_subcommand("prune", "drop cells on rare short cycles");
    ep_src.attach(ep);
    ep->add_option("--gamma", gamma, "cycle count floor coefficient")->required();
    ep->add_option("--theta", theta, "ring popularity threshold");
    ep->add_option("--k", kk, "max cycle half-length (default 2)");
    ep->add_option("--budget", budget, "state budget (0 = default)");
    ep->add_option("--trace", trace_path, "write the stage trace JSON here");
    ep->add_option("--out", out_path, "write the pruned instance here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    RunConfig rc;
    rc.seed = seed;
    rc.budget = budget;
    rc.threads = threads;
    rc.out = out_path;

    if (*g) {
        rc.command = "gen";
        rc.input = gen_spec;
        Pls a = cli::from_gen_spec(gen_spec);
        if (g->count("--scramble")) a = scramble(a, seed);
        if (g->count("--restrict")) {
            rc.seed = restrict_seed;
            a = restrict_random(a, keep, restrict_seed);
        }
        nlohmann::json j = pls_to_json(a);
        cli::write_artifact(out_path, j, rc, pretty);
        std::cout << out_path << "\n";
        return 0;
    }

    if (*val) {
        rc.command = "validate";
        rc.input = val_in;
        Pls a = load_pls(val_in);
        nlohmann::json out{{"run", to_json(rc)},
                           {"dims", {a.dims.nx, a.dims.ny, a.dims.nz}},
                           {"cells", a.cells.size()},
                           {"density", a.density()},
                           {"full_latin_square", is_full_latin_square(a)}};
        cli::emit(out, pretty);
        return 0;
    }

    if (*cnt) {
        rc.command = "count " + what;
        Pls a = src.load(rc);
        std::string value, method;
        double ms = 0.0;
        if (what == "octahedra") {
            CountReport rep = count_octahedra(a);
            value = rep.value.decimal;
            method = rep.method;
            ms = rep.elapsed_ms;
        } else if (what == "rectangles" || what == "cycles") {
            auto t0 = std::chrono::steady_clock::now();
            BigCount b = what == "rectangles"
                             ? count_rectangles(a)
                             : count_cycles(a, cycle_kind_from_string(kind_str), r);
            ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
            value = b.decimal;
            method = what == "rectangles" ? "row-pair-sum" : "trace-power";
        } else if (what == "assoc") {
            auto t0 = std::chrono::steady_clock::now();
            u64 triples = count_associative_triples(to_binary_op(a));
            ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
            value = std::to_string(triples);
            method = "direct";
        } else {
            throw input_error("unknown count target: " + what);
        }
        std::cout << what << "," << value << "," << method << "," << ms << "\n";
        if (!out_path.empty()) {
            nlohmann::json j{{"metric", what}, {"value", value}, {"method", method},
                             {"elapsed_ms", ms}};
            cli::write_artifact(out_path, j, rc, pretty);
        }
        return 0;
    }

    if (*qc_check) {
        rc.command = "qc check";
        Pls a = qc_src.load(rc);
        std::vector<CycleKind> kinds;
        if (kind_str == "all")
            kinds = {CycleKind::label, CycleKind::column, CycleKind::row};
        else
            kinds = {cycle_kind_from_string(kind_str)};
        nlohmann::json out{{"run", to_json(rc)}};
        u64 total = 0;
        for (CycleKind k : kinds) {
            auto viol = check_quadrangle(a, k);
            total += viol.size();
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& v : viol) arr.push_back(cli::violation_to_json(v));
            out["violations"][to_string(k)] = arr;
        }
        out["total"] = total;
        cli::emit(out, pretty);
        return 0;
    }

    if (*qc_defect) {
        rc.command = "qc defect";
        Pls a = qd_src.load(rc);
        Budget bud{budget ? budget : kDefaultBudget, 0};
        std::map<u64, u64> hist;
        u64 d = completion_defect(a, cycle_kind_from_string(kind_str), r, bud,
                                  with_hist ? &hist : nullptr);
        nlohmann::json out{
            {"run", to_json(rc)}, {"kind", kind_str}, {"r", r}, {"defect", d},
            {"states", bud.used}};
        if (with_hist) {
            nlohmann::json h = nlohmann::json::object();
            for (const auto& [k, v] : hist) h[std::to_string(k)] = v;
            out["histogram"] = h;
        }
        cli::emit(out, pretty);
        return 0;
    }

    if (*qc_rec) {
        rc.command = "qc reconstruct";
        Pls a = qr_src.load(rc);
        GroupTable gt = brandt_reconstruct(a, row, col);
        nlohmann::json j = group_table_to_json(gt);
        if (out_path.empty()) {
            j["run"] = to_json(rc);
            cli::emit(j, pretty);
        } else {
            cli::write_artifact(out_path, j, rc, pretty);
            std::cout << out_path << "\n";
        }
        return 0;
    }

    auto run_decomp = [&](const char* name, const cli::Source& s,
                          u64 (*counter)(const Pls&, const std::vector<Cell>&, double, Budget&)) {
        rc.command = std::string("decomp ") + name;
        Pls a = s.load(rc);
        std::vector<Cell> cyc = cli::parse_cycle(cycle_str);
        Budget bud{budget ? budget : kDefaultBudget, 0};
        double threshold = std::string(name) == "point" ? eps : theta;
        u64 count = counter(a, cyc, threshold, bud);
        nlohmann::json out{{"run", to_json(rc)},
                           {"what", name},
                           {"threshold", threshold},
                           {"count", count},
                           {"states", bud.used}};
        cli::emit(out, pretty);
    };

    if (*dp) {
        run_decomp("point", dp_src,
                   [](const Pls& a, const std::vector<Cell>& c, double e, Budget& b) {
                       return count_point_decompositions(a, c, e, b);
                   });
        return 0;
    }
    if (*dr) {
        run_decomp("ring", dr_src,
                   [](const Pls& a, const std::vector<Cell>& c, double t, Budget& b) {
                       return count_ring_decompositions(a, c, t, b);
                   });
        return 0;
    }
    if (*dd) {
        rc.command = "decomp dispersed";
        Pls a = dd_src.load(rc);
        std::vector<Cell> cyc = cli::parse_cycle(cycle_str);
        Budget bud{budget ? budget : kDefaultBudget, 0};
        u64 count = count_dispersed_ring_decompositions(a, cyc, bud);
        nlohmann::json out{{"run", to_json(rc)},
                           {"what", "dispersed"},
                           {"count", count},
                           {"states", bud.used}};
        cli::emit(out, pretty);
        return 0;
    }
    if (*dt) {
        rc.command = "decomp trivmax";
        rc.input = disc_spec;
        auto colon = disc_spec.find(':');
        if (colon == std::string::npos)
            throw input_error("disc spec wants polygon:R or dispersed:R");
        std::string which = disc_spec.substr(0, colon);
        int rr = std::stoi(disc_spec.substr(colon + 1));
        AbstractDisc d;
        if (which == "polygon")
            d = make_polygon_disc(rr);
        else if (which == "dispersed")
            d = make_dispersed_ring_disc(rr);
        else
            throw input_error("unknown disc kind: " + which);
        TrivialMax tm = trivial_max(d, ambient);
        nlohmann::json out{{"run", to_json(rc)},
                           {"disc", disc_spec},
                           {"n", ambient},
                           {"internal_vertices", tm.internal_vertices},
                           {"value", tm.value.decimal}};
        cli::emit(out, pretty);
        return 0;
    }

    if (*vd) {
        rc.command = "vk dist";
        Pls a = vd_src.load(rc);
        VKPresentation p = build_presentation(a);
        DistanceResult res =
            vk_distance(p, parse_word(w1_str, p), parse_word(w2_str, p), budget, cap);
        nlohmann::json j = distance_result_to_json(res, p);
        if (out_path.empty()) {
            j["run"] = to_json(rc);
            cli::emit(j, pretty);
        } else {
            cli::write_artifact(out_path, j, rc, pretty);
            std::cout << out_path << "\n";
        }
        return 0;
    }

    if (*vs) {
        rc.command = "vk scan";
        Pls a = vs_src.load(rc);
        u64 b = vs->count("--budget") ? budget : 9;
        int wcap = vs->count("--cap") ? cap : 6;
        rc.budget = b;
        std::vector<SlitEntry> slits = slit_scan(a);
        if (slits.empty() != check_quadrangle(a, CycleKind::label).empty())
            throw verify_error("slit scan and label quadrangle check disagree");
        std::set<std::pair<int, int>> pairs;
        nlohmann::json slit_arr = nlohmann::json::array();
        for (const SlitEntry& e : slits) {
            nlohmann::json cells = nlohmann::json::array();
            for (const Cell& c : e.cells()) cells.push_back({c.x, c.y, c.z});
            slit_arr.push_back({{"d", e.d}, {"dprime", e.dprime}, {"cells", cells}});
            pairs.emplace(std::min(e.d, e.dprime), std::max(e.d, e.dprime));
        }
        VKPresentation p = build_presentation(a);
        nlohmann::json evidence = nlohmann::json::array();
        for (const auto& [d, dp] : pairs) {
            DistanceResult res =
                vk_distance(p, Word{p.z_code(d) + 1}, Word{p.z_code(dp) + 1}, b, wcap);
            evidence.push_back(distance_result_to_json(res, p));
        }
        nlohmann::json out{{"run", to_json(rc)},
                           {"slits", slit_arr},
                           {"count", slits.size()},
                           {"distinct_pairs", evidence}};
        cli::emit(out, pretty);
        return 0;
    }

    if (*ve) {
        rc.command = "vk embed";
        Pls a = ve_src.load(rc);
        EmbeddingReport rep = emit_embedding(a, budget, cap);
        nlohmann::json j = embedding_report_to_json(rep, a);
        if (out_path.empty()) {
            j["run"] = to_json(rc);
            cli::emit(j, pretty);
        } else {
            cli::write_artifact(out_path, j, rc, pretty);
            std::cout << out_path << "\n";
        }
        return 0;
    }

    auto run_extract = [&](const char* name, const Pls& a, const ExtractResult& res) {
        nlohmann::json out{{"run", to_json(rc)},
                           {"what", name},
                           {"cells_in", a.cells.size()},
                           {"cells_out", res.subset.cells.size()},
                           {"stages", res.trace.stages.size()},
                           {"verified", res.verified}};
        cli::emit(out, pretty);
        if (!trace_path.empty())
            cli::write_artifact(trace_path, extraction_trace_to_json(res.trace, res.verified), rc,
                                pretty);
        if (!out_path.empty()) cli::write_artifact(out_path, pls_to_json(res.subset), rc, pretty);
    };

    if (*eq) {
        rc.command = "extract qc";
        Pls a = eq_src.load(rc);
        ExtractResult res = qc_extract(a, seed);
        run_extract("qc", a, res);
        return 0;
    }
    if (*ed) {
        rc.command = "extract drs";
        Pls a = ed_src.load(rc);
        ExtractResult res = drs_cell_neighborhood(a, eps, delta, kk, seed);
        run_extract("drs", a, res);
        return 0;
    }
    if (*ep) {
        rc.command = "extract prune";
        Pls a = ep_src.load(rc);
        Budget bud{budget ? budget : kDefaultBudget, 0};
        ExtractResult res = prune_indecomposable(a, kk, gamma, theta, bud);
        run_extract("prune", a, res);
        return res.verified ? 0 : 3;
    }

    return 0;
}

inline int cli_main(int argc, char** argv) {
    try {
        return cli_main_inner(argc, argv);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const verify_error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace plsq
