#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <tuple>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "plsq/extract.hpp"
#include "plsq/gen.hpp"
#include "plsq/quadrangle.hpp"
#include "plsq/vk.hpp"

using namespace plsq;

namespace {

std::vector<char> keep_mask(const Pls& whole, const Pls& subset) {
    std::set<std::tuple<int, int, int>> in;
    for (const Cell& c : subset.cells) in.insert({c.x, c.y, c.z});
    std::vector<char> keep(whole.cells.size(), 0);
    for (std::size_t i = 0; i < whole.cells.size(); ++i) {
        const Cell& c = whole.cells[i];
        keep[i] = in.count({c.x, c.y, c.z}) ? 1 : 0;
    }
    return keep;
}

bool is_subset(const Pls& whole, const Pls& subset) {
    auto keep = keep_mask(whole, subset);
    return u64(std::count(keep.begin(), keep.end(), char(1))) == subset.cells.size();
}

void require_nested(const ExtractionTrace& t) {
    for (std::size_t i = 0; i + 1 < t.stages.size(); ++i)
        REQUIRE(t.stages[i + 1].cells_in == t.stages[i].cells_out);
}

bool qc_clean(const Pls& a) {
    return check_quadrangle(a, CycleKind::label).empty() &&
           check_quadrangle(a, CycleKind::column).empty() &&
           check_quadrangle(a, CycleKind::row).empty();
}

}  // namespace

TEST_CASE("cell selection on a group keeps a quarter-dense neighbourhood") {
    Pls a = gen_cyclic(6);
    ExtractResult r = drs_cell_neighborhood(a, 0.5, 0.01, 2, 0);
    REQUIRE(r.verified);
    REQUIRE(r.subset.cells.size() == 25);  // everything off the chosen row and column
    REQUIRE(is_subset(a, r.subset));

    REQUIRE(r.trace.stages.size() == 1);
    const StageRecord& s = r.trace.stages[0];
    REQUIRE(s.name == "drs-cell-neighborhood");
    REQUIRE(s.alpha == Catch::Approx(25.0 / 36.0));
    REQUIRE(s.alpha >= 0.5 / 2.0);
    REQUIRE(s.well_defined);
    REQUIRE(s.bad_cycle_proportion.at(2) == 0.0);

    // the subset is the popular-graph neighbourhood of some cell
    auto adj = oracle::popular_adjacency(a, 2);
    auto keep = keep_mask(a, r.subset);
    bool matches_some_vertex = false;
    for (std::size_t v = 0; v < a.cells.size() && !matches_some_vertex; ++v)
        matches_some_vertex = std::equal(keep.begin(), keep.end(), adj[v].begin());
    REQUIRE(matches_some_vertex);
}

TEST_CASE("cell selection bad-cycle shares match the oracle") {
    Pls a = restrict_random(gen_cyclic(8), 0.8, 5);
    double eps = 0.5, delta = 0.01;
    int k = 2;
    ExtractResult r = drs_cell_neighborhood(a, eps, delta, k, 42);
    REQUIRE(r.subset.cells.size() > 0);
    REQUIRE(is_subset(a, r.subset));

    u64 needed = u64(std::ceil(eps / 2.0 * a.dims.nz));
    double eta = delta * std::pow(eps, 4.0 * k);
    double threshold = eta * double(a.dims.nx) * double(a.dims.ny);
    auto adj = oracle::popular_adjacency(a, needed);
    auto [bad, total] = oracle::bad_rectangle_stats(a, adj, keep_mask(a, r.subset), threshold);
    double expect = total == 0 ? 0.0 : double(bad) / double(total);
    REQUIRE(r.trace.stages[0].bad_cycle_proportion.at(2) == Catch::Approx(expect));

    ExtractResult again = drs_cell_neighborhood(a, eps, delta, k, 42);
    REQUIRE(again.subset.cells == r.subset.cells);
}

TEST_CASE("cell selection handles degenerate inputs") {
    ExtractResult empty = drs_cell_neighborhood(Pls({3, 3, 3}, {}), 0.5, 0.5, 2, 0);
    REQUIRE(empty.subset.cells.empty());
    REQUIRE(empty.trace.stages.size() == 1);
    REQUIRE(empty.trace.stages[0].note.rfind("no octahedra", 0) == 0);

    // a diagonal still carries degenerate closed-walk octahedra, but its
    // popular-rectangle graph is empty, so the best neighbourhood is empty
    Pls diag({3, 3, 3}, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}});
    ExtractResult r = drs_cell_neighborhood(diag, 0.5, 0.5, 2, 0);
    REQUIRE(r.subset.cells.empty());
    REQUIRE(r.trace.stages.size() == 1);
    REQUIRE(r.trace.stages[0].note.find("negative at this scale") != std::string::npos);

    Pls a = gen_cyclic(3);
    REQUIRE_THROWS_AS(drs_cell_neighborhood(a, 0.0, 0.5, 2, 0), input_error);
    REQUIRE_THROWS_AS(drs_cell_neighborhood(a, 1.0, 0.5, 2, 0), input_error);
    REQUIRE_THROWS_AS(drs_cell_neighborhood(a, 0.5, 0.0, 2, 0), input_error);
    REQUIRE_THROWS_AS(drs_cell_neighborhood(a, 0.5, 0.5, 1, 0), input_error);
}

TEST_CASE("bipartite selection keeps the complete graph whole") {
    BipartiteGraph g = BipartiteGraph::complete(8, 8);
    BipartiteResult r = drs_bipartite(g, 2, 0);
    REQUIRE_FALSE(r.degenerate);
    REQUIRE(r.delta == 1.0);
    REQUIRE(r.xs.size() == 8);
    REQUIRE(r.ys.size() == 8);
    REQUIRE(r.restricted_density == 1.0);
    REQUIRE(r.connector_floor == Catch::Approx(4096.0));
    REQUIRE(r.min_connectors == 4096);
    for (const auto& s : r.samples) REQUIRE(s.connectors == 4096);
}

TEST_CASE("bipartite sample connectors match direct enumeration") {
    BipartiteGraph g = BipartiteGraph::erdos_renyi(32, 32, 0.5, 6);
    BipartiteResult r = drs_bipartite(g, 2, 7);
    REQUIRE_FALSE(r.degenerate);
    REQUIRE(r.restricted_density > 0.0);
    REQUIRE(r.restricted_density <= 1.0);

    std::vector<char> in_x3(32, 0), in_y1(32, 0);
    for (int x : r.xs) in_x3[std::size_t(x)] = 1;
    for (int y : r.ys) in_y1[std::size_t(y)] = 1;
    auto adj = [&](int x, int y) { return g.at(x, y); };
    u64 min_seen = ~u64(0);
    REQUIRE(r.samples.size() == 8);
    for (const auto& s : r.samples) {
        u64 direct = oracle::count_connectors2(32, 32, adj, in_x3, in_y1, s.xs[0], s.xs[1],
                                               s.ys[0], s.ys[1]);
        REQUIRE(s.connectors == direct);
        min_seen = std::min(min_seen, s.connectors);
    }
    REQUIRE(r.min_connectors == min_seen);
}

TEST_CASE("bipartite selection reports degenerate graphs") {
    BipartiteResult r = drs_bipartite(BipartiteGraph::empty(5, 4), 2, 1);
    REQUIRE(r.degenerate);
    REQUIRE(r.xs.empty());
    REQUIRE_FALSE(r.note.empty());

    REQUIRE_THROWS_AS(drs_bipartite(BipartiteGraph::complete(3, 3), 0, 1), input_error);
    REQUIRE_THROWS_AS(drs_bipartite(BipartiteGraph::empty(0, 3), 2, 1), input_error);
}

TEST_CASE("the stacked blocks yield one auxiliary label edge") {
    Pls a = fixtures::two_block_conflict();

    AuxiliaryGraph labels = build_auxiliary_graph(a, 2, 9);
    REQUIRE(labels.edges.size() == 1);
    REQUIRE(labels.edges[0].u == 3);
    REQUIRE(labels.edges[0].v == 4);
    REQUIRE(labels.edges[0].qc_witness.has_value());
    REQUIRE(reverify_violation(a, *labels.edges[0].qc_witness));

    REQUIRE(build_auxiliary_graph(a, 0, 9).edges.empty());
    REQUIRE(build_auxiliary_graph(a, 1, 9).edges.empty());
    // at b = 8 the slit family is out of range and the capped word search
    // cannot reach the area-8 proof
    REQUIRE(build_auxiliary_graph(a, 2, 8).edges.empty());
}

TEST_CASE("auxiliary edges carry verifiable witnesses") {
    Pls a = restrict_random(random_quasigroup(6, 4), 0.7, 9);
    VKPresentation pres = build_presentation(a);
    for (int cls = 0; cls < 3; ++cls) {
        AuxiliaryGraph g = build_auxiliary_graph(a, cls, 9);
        std::set<std::pair<int, int>> pairs;
        std::set<std::pair<int, int>> qc_pairs;
        for (const AuxEdge& e : g.edges) {
            REQUIRE(e.u < e.v);
            REQUIRE(pairs.insert({e.u, e.v}).second);  // simple graph
            REQUIRE((e.qc_witness.has_value() || e.word_witness.has_value()));
            if (e.qc_witness) {
                REQUIRE(reverify_violation(a, *e.qc_witness));
                qc_pairs.insert({e.u, e.v});
            }
            if (e.word_witness) {
                REQUIRE(e.word_witness->status == VKStatus::proven);
                REQUIRE(e.word_witness->area <= 8);
                REQUIRE(replay_certificate(pres, e.word_witness->w1, e.word_witness->w2,
                                           e.word_witness->certificate));
            }
        }
        // the exact scan's pairs all appear, witnessed by configurations
        std::set<std::pair<int, int>> expect;
        CycleKind kind = cls == 0 ? CycleKind::column : cls == 1 ? CycleKind::row : CycleKind::label;
        for (const QCViolation& v : check_quadrangle(a, kind)) {
            int u = 0, w = 0;
            if (v.kind == CycleKind::column) {
                u = v.ob.x;
                w = v.displaced.x;
            } else if (v.kind == CycleKind::row) {
                u = v.oc.y;
                w = v.displaced.y;
            } else {
                u = v.expected;
                w = v.found;
            }
            if (u != w) expect.insert({std::min(u, w), std::max(u, w)});
        }
        REQUIRE(qc_pairs == expect);
    }
}

TEST_CASE("independent pruning is the identity on groups") {
    for (int n : {3, 5})
        for (u64 b : {u64(2), u64(9), u64(12)}) {
            Pls a = gen_cyclic(n);
            ExtractResult r = independent_prune(a, b);
            REQUIRE(r.subset.cells == a.cells);
            REQUIRE(r.trace.stages.size() == 3);
        }
    Pls big = gen_cyclic(8);
    REQUIRE(independent_prune(big, 12).subset.cells == big.cells);

    REQUIRE_THROWS_AS(independent_prune(gen_cyclic(3), 1), input_error);
    REQUIRE_THROWS_AS(independent_prune(gen_cyclic(3), 9, 0, 2), input_error);
}

TEST_CASE("independent pruning drops one stacked-block label") {
    Pls a = fixtures::two_block_conflict();
    ExtractResult r = independent_prune(a, 9);
    REQUIRE(r.subset.cells.size() == 7);
    for (const Cell& c : r.subset.cells) REQUIRE(c.z != 4);
    REQUIRE(is_subset(a, r.subset));
    REQUIRE(qc_clean(r.subset));

    REQUIRE(r.trace.stages.size() == 3);
    REQUIRE(r.trace.stages[0].name == "independent-prune-rows");
    REQUIRE(r.trace.stages[1].name == "independent-prune-columns");
    REQUIRE(r.trace.stages[2].name == "independent-prune-labels");
    require_nested(r.trace);
    REQUIRE(r.trace.stages[2].note.find("auxiliary edges") != std::string::npos);
    REQUIRE(r.trace.stages[2].cells_in == 8);
    REQUIRE(r.trace.stages[2].cells_out == 7);
}

TEST_CASE("independent pruning cleans a quasigroup") {
    Pls a = random_quasigroup(5, 3);
    REQUIRE_FALSE(qc_clean(a));  // this square is not a group table
    ExtractResult r = independent_prune(a, 9, 8);
    REQUIRE(is_subset(a, r.subset));
    REQUIRE_FALSE(r.subset.cells.empty());
    REQUIRE(qc_clean(r.subset));
    REQUIRE(slit_scan(r.subset).empty());
    require_nested(r.trace);
}

TEST_CASE("indecomposable pruning keeps group tables intact") {
    for (double gamma : {0.5, 1.0}) {
        Budget budget{kDefaultBudget, 0};
        Pls a = gen_cyclic(4);
        ExtractResult r = prune_indecomposable(a, 2, gamma, 1.0, budget);
        REQUIRE(r.verified);
        REQUIRE(r.subset.cells == a.cells);
        REQUIRE(r.trace.stages.size() == 1);
        REQUIRE(r.trace.stages[0].name == "prune-indecomposable-rescan");
    }
}

TEST_CASE("indecomposable pruning can empty a sparse square") {
    Budget budget{kDefaultBudget, 0};
    Pls a = gen_cyclic(2);
    ExtractResult r = prune_indecomposable(a, 2, 1.5, 1.0, budget);
    REQUIRE(r.verified);
    REQUIRE(r.subset.cells.empty());
    REQUIRE(r.trace.stages.back().name == "prune-indecomposable-rescan");

    Budget budget3{kDefaultBudget, 0};
    Pls z3 = gen_cyclic(3);
    ExtractResult r3 = prune_indecomposable(z3, 2, 1.5, 1.0, budget3);
    REQUIRE(r3.verified);
    Budget probe{kDefaultBudget, 0};
    REQUIRE(detail::enumerate_cycles(r3.subset, 2, probe).empty());
}

TEST_CASE("indecomposable pruning verifies its postcondition") {
    Pls a = restrict_random(gen_cyclic(6), 0.6, 7);
    Budget budget{kDefaultBudget, 0};
    double gamma = 0.25, theta = 0.0;
    ExtractResult r = prune_indecomposable(a, 2, gamma, theta, budget);
    REQUIRE(r.verified);
    REQUIRE(is_subset(a, r.subset));
    require_nested(r.trace);
    REQUIRE(r.trace.stages.back().name == "prune-indecomposable-rescan");

    double floor2 = gamma * std::pow(6.0, 4.0);
    Budget check{kDefaultBudget, 0};
    for (const auto& cyc : detail::enumerate_cycles(r.subset, 2, check)) {
        u64 cnt = count_ring_decompositions(r.subset, detail::cycle_cells(r.subset, cyc), theta,
                                            check);
        REQUIRE(double(cnt) >= floor2);
    }

    Budget tiny{10, 0};
    ExtractResult aborted = prune_indecomposable(gen_cyclic(4), 2, 1.5, 1.0, tiny);
    REQUIRE_FALSE(aborted.verified);
    REQUIRE(aborted.trace.stages.back().name == "prune-indecomposable-aborted");

    Budget b2{kDefaultBudget, 0};
    REQUIRE_THROWS_AS(prune_indecomposable(a, 1, 0.5, 0.5, b2), input_error);
}

TEST_CASE("quadrangle extraction returns clean inputs unchanged") {
    Pls a = gen_cyclic(5);
    ExtractResult r = qc_extract(a, 0);
    REQUIRE(r.verified);
    REQUIRE(r.subset.cells == a.cells);
    REQUIRE(r.trace.stages.size() == 2);
    REQUIRE(r.trace.stages[0].name == "measure");
    REQUIRE(r.trace.stages[0].note.find("asymptotic density floor") != std::string::npos);
    REQUIRE(r.trace.stages[1].name == "clean-check");
}

TEST_CASE("quadrangle extraction is optimal on the stacked blocks") {
    Pls a = fixtures::two_block_conflict();
    REQUIRE(oracle::max_clean_subset(a) == 7);
    ExtractResult r = qc_extract(a, 0);
    REQUIRE(r.subset.cells.size() == 7);
    REQUIRE(qc_clean(r.subset));
    require_nested(r.trace);
    REQUIRE(r.trace.stages.front().name == "measure");
    REQUIRE(r.trace.stages.back().name == "verify");
}

TEST_CASE("quadrangle extraction cleans a restricted quasigroup") {
    Pls a = restrict_random(random_quasigroup(8, 2), 0.7, 9);
    ExtractResult r = qc_extract(a, 9);
    REQUIRE(is_subset(a, r.subset));
    REQUIRE_FALSE(r.subset.cells.empty());
    REQUIRE(qc_clean(r.subset));
    REQUIRE(slit_scan(r.subset).empty());
    require_nested(r.trace);

    auto js = extraction_trace_to_json(r.trace, r.verified);
    REQUIRE(js["verified"] == true);
    REQUIRE(js["stages"].is_array());
    for (const auto& row : js["stages"]) {
        for (const char* key : {"name", "cells_in", "cells_out", "alpha", "epsilon", "theta",
                                "gamma", "well_defined", "seed", "note"})
            REQUIRE(row.contains(key));
    }
}
