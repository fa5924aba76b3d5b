#pragma once
// Point, ring, full, and dispersed ring decompositions of label cycles, and
// trivial maxima for partially fixed discs.
//
// Cycle cells are handed around in row-first order: cells at even positions
// pair with the next cell by a shared row, odd positions by a shared column,
// the last closing back to the first by a shared column.  Partner cycles use
// the swapped pattern (column first), so that points sharing a row in C
// correspond to points sharing a column in the partner.
//
// Popularity of a rectangle or cycle means its label sequence occurs at
// least theta * nz times, nz being the ambient label-class size.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "plsq/common.hpp"
#include "plsq/cycles.hpp"
#include "plsq/pls.hpp"

namespace plsq {

// ---- cycle plumbing ----

inline void validate_label_cycle(const Pls& a, const std::vector<Cell>& cyc) {
    if (cyc.size() < 4 || cyc.size() % 2 != 0)
        throw input_error("cycle must list an even number of cells, at least 4");
    std::size_t m = cyc.size();
    for (const Cell& c : cyc)
        if (!a.contains(c.x, c.y, c.z)) throw input_error("cycle cell " + cell_str(c) + " not in instance");
    for (std::size_t i = 0; i < m; ++i) {
        const Cell& c = cyc[i];
        const Cell& d = cyc[(i + 1) % m];
        bool row_step = i % 2 == 0;
        if (row_step && c.y != d.y)
            throw input_error("cycle cells " + std::to_string(i) + "," + std::to_string(i + 1) +
                              " must share a row");
        if (!row_step && c.x != d.x)
            throw input_error("cycle cells " + std::to_string(i) + "," + std::to_string(i + 1) +
                              " must share a column");
    }
}

namespace detail {

// Occurrence counts for label 4-cycle signatures, memoized.
struct PopularityCache {
    const Pls& a;
    std::unordered_map<u64, u64> memo;

    explicit PopularityCache(const Pls& pls) : a(pls) {}

    u64 occurrences4(int s0, int s1, int s2, int s3) {
        u64 key = (u64(u32(s0)) << 48) | (u64(u32(s1)) << 32) | (u64(u32(s2)) << 16) | u64(u32(s3));
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        u64 v = count_signature_occurrences(a, CycleKind::label, {s0, s1, s2, s3});
        memo.emplace(key, v);
        return v;
    }
};

// The rectangle spanned by opposite corners p and q, listed row-first from
// p:  p, (q.x, p.y), q, (p.x, q.y).  Returns false if a corner is missing.
inline bool rectangle_signature(const Pls& a, const Cell& p, const Cell& q, int sig[4]) {
    int m1 = a.z_at(q.x, p.y);
    if (m1 < 0) return false;
    int m2 = a.z_at(p.x, q.y);
    if (m2 < 0) return false;
    sig[0] = p.z;
    sig[1] = m1;
    sig[2] = q.z;
    sig[3] = m2;
    return true;
}

}  // namespace detail

// Number of centre cells u such that for every cycle cell c the rectangle
// with opposite corners c and u lies in the instance; with eps > 0 every such
// rectangle must also be eps-popular.  eps = 0 counts all decompositions.
// When witnesses is non-null it receives every counted centre.
inline u64 count_point_decompositions(const Pls& a, const std::vector<Cell>& cycle, double eps,
                                      Budget& budget, std::vector<Cell>* witnesses = nullptr) {
    validate_label_cycle(a, cycle);
    detail::PopularityCache pop(a);
    u64 needed = eps > 0.0 ? u64(std::ceil(eps * double(a.dims.nz))) : 0;
    u64 total = 0;
    for (const Cell& u : a.cells) {
        budget.tick();
        bool good = true;
        for (const Cell& c : cycle) {
            budget.tick();
            int sig[4];
            if (!detail::rectangle_signature(a, c, u, sig)) {
                good = false;
                break;
            }
            if (needed > 0 && pop.occurrences4(sig[0], sig[1], sig[2], sig[3]) < needed) {
                good = false;
                break;
            }
        }
        if (good) {
            ++total;
            if (witnesses) witnesses->push_back(u);
        }
    }
    return total;
}

// Re-checks a point decomposition from its witness centre alone.
inline bool reverify_point_decomposition(const Pls& a, const std::vector<Cell>& cycle, double eps,
                                         const Cell& centre) {
    validate_label_cycle(a, cycle);
    if (!a.contains(centre.x, centre.y, centre.z)) return false;
    detail::PopularityCache pop(a);
    u64 needed = eps > 0.0 ? u64(std::ceil(eps * double(a.dims.nz))) : 0;
    for (const Cell& c : cycle) {
        int sig[4];
        if (!detail::rectangle_signature(a, c, centre, sig)) return false;
        if (needed > 0 && pop.occurrences4(sig[0], sig[1], sig[2], sig[3]) < needed) return false;
    }
    return true;
}

namespace detail {

// The partner must be a second cycle: a partner identical to the decomposed
// cycle is not counted.  Slot-wise position comparison suffices, and only a
// degenerate cycle can collide with a column-first partner in the first
// place, since equality at consecutive slots would merge two cells.
inline bool partner_equals_cycle(const std::vector<Cell>& cp, const std::vector<Cell>& cycle) {
    for (std::size_t t = 0; t < cp.size(); ++t)
        if (cp[t].x != cycle[t].x || cp[t].y != cycle[t].y) return false;
    return true;
}

}  // namespace detail

// Number of partner cycles C' such that every rectangle spanned by the
// corresponding corner pairs lies in the instance; with theta > 0 the partner
// cycle and all 2r rectangles must be theta-popular.  The partner determines
// the decomposition, so this is also the number of ring decompositions.
// When witnesses is non-null it receives every counted partner.
inline u64 count_ring_decompositions(const Pls& a, const std::vector<Cell>& cycle, double theta,
                                     Budget& budget,
                                     std::vector<std::vector<Cell>>* witnesses = nullptr) {
    validate_label_cycle(a, cycle);
    detail::PopularityCache pop(a);
    std::size_t m = cycle.size();
    u64 needed = theta > 0.0 ? u64(std::ceil(theta * double(a.dims.nz))) : 0;

    auto rect_ok = [&](const Cell& p, const Cell& q) {
        int sig[4];
        if (!detail::rectangle_signature(a, p, q, sig)) return false;
        return needed == 0 || pop.occurrences4(sig[0], sig[1], sig[2], sig[3]) >= needed;
    };

    std::vector<Cell> cp(m);
    u64 total = 0;

    // Partner slots are filled left to right; slot j shares a column with
    // slot j-1 when j is odd and a row when j is even.  The final slot is
    // forced by the closure with slot 0.
    std::function<void(std::size_t)> place = [&](std::size_t j) {
        budget.tick();
        if (j == m - 1) {
            const Cell& prev = cp[m - 2];
            int z = a.z_at(prev.x, cp[0].y);
            if (z < 0) return;
            cp[m - 1] = {prev.x, cp[0].y, z};
            if (detail::partner_equals_cycle(cp, cycle)) return;
            if (!rect_ok(cycle[m - 1], cp[m - 1])) return;
            if (needed > 0) {
                // the partner read as a cycle starts at slot 1 (row first)
                std::vector<int> sig;
                sig.reserve(m);
                for (std::size_t t = 1; t <= m; ++t) sig.push_back(cp[t % m].z);
                if (count_signature_occurrences(a, CycleKind::label, sig) < needed) return;
            }
            ++total;
            if (witnesses) witnesses->push_back(cp);
            return;
        }
        auto try_cell = [&](const Cell& cand) {
            budget.tick();
            cp[j] = cand;
            if (!rect_ok(cycle[j], cand)) return;
            place(j + 1);
        };
        if (j == 0) {
            for (const Cell& cand : a.cells) try_cell(cand);
        } else if (j % 2 == 1) {
            for (int ci : a.in_col[std::size_t(cp[j - 1].x)]) try_cell(a.cells[std::size_t(ci)]);
        } else {
            for (int ci : a.in_row[std::size_t(cp[j - 1].y)]) try_cell(a.cells[std::size_t(ci)]);
        }
    };
    place(0);
    return total;
}

// Re-checks a ring decomposition from its witness partner alone.
inline bool reverify_ring_decomposition(const Pls& a, const std::vector<Cell>& cycle, double theta,
                                        const std::vector<Cell>& partner) {
    validate_label_cycle(a, cycle);
    std::size_t m = cycle.size();
    if (partner.size() != m) return false;
    for (const Cell& c : partner)
        if (!a.contains(c.x, c.y, c.z)) return false;
    for (std::size_t j = 0; j < m; ++j) {
        const Cell& c = partner[j];
        const Cell& d = partner[(j + 1) % m];
        if (j % 2 == 0 ? c.x != d.x : c.y != d.y) return false;
    }
    if (detail::partner_equals_cycle(partner, cycle)) return false;
    detail::PopularityCache pop(a);
    u64 needed = theta > 0.0 ? u64(std::ceil(theta * double(a.dims.nz))) : 0;
    for (std::size_t j = 0; j < m; ++j) {
        int sig[4];
        if (!detail::rectangle_signature(a, cycle[j], partner[j], sig)) return false;
        if (needed > 0 && pop.occurrences4(sig[0], sig[1], sig[2], sig[3]) < needed) return false;
    }
    if (needed > 0) {
        std::vector<int> sig;
        sig.reserve(m);
        for (std::size_t t = 1; t <= m; ++t) sig.push_back(partner[t % m].z);
        if (count_signature_occurrences(a, CycleKind::label, sig) < needed) return false;
    }
    return true;
}

// Witness record for one dispersed ring decomposition: the partner cycle and,
// per sector, the chosen opposite-corner pairs of the two rectangles.
struct DispersedWitness {
    std::vector<Cell> partner;                  // aligned, column-first
    std::vector<std::array<Cell, 2>> rect_x;    // sector i: (xi'', xi''')
    std::vector<std::array<Cell, 2>> rect_y;    // sector i: (yi'', yi''')
};

// Exact number of dispersed ring decompositions of the cycle: partner cycles
// x1'y1'..xr'yr' (column-first pattern) together with rectangles
// Ri = xi'' ui xi''' vi and Si = yi'' wi yi''' zi such that labels agree in
// the six families z(xi)=z(xi''), z(xi')=z(xi'''), z(yi)=z(yi''),
// z(yi')=z(yi'''), z(ui)=z(zi), z(wi)=z(v(i+1)), cyclically.  Only the
// labels of the decomposed cycle matter, so the count is a function of its
// signature.  Enumeration is partner-first with early pruning; the budget
// guards the whole search.
inline u64 count_dispersed_ring_decompositions(const Pls& a, const std::vector<Cell>& cycle,
                                               Budget& budget,
                                               std::vector<DispersedWitness>* witnesses = nullptr) {
    validate_label_cycle(a, cycle);
    std::size_t m = cycle.size();
    std::size_t r = m / 2;

    std::vector<Cell> cp(m);  // partner cycle, aligned: cp[2i] = x(i+1)', cp[2i+1] = y(i+1)'
    u64 total = 0;

    // per-sector state while walking i = 0..r-1: chosen u_i / v_i / w_i labels
    std::vector<int> ulab(r, -1), vlab(r, -1), wlab(r, -1);
    std::vector<std::array<Cell, 2>> rx(r), ry(r);

    // Rectangle R_i: choose cells p = xi'' (label of cycle x_i) and
    // q = xi''' (label of partner x_i'); corners u_i = (q.x, p.y) and
    // v_i = (p.x, q.y) must exist; v_i must match w_(i-1) for i >= 1.
    // Rectangle S_i: p = yi'' and q = yi'''; w_i = (p.x, q.y) and
    // z_i = (q.x, p.y) must exist; z_i must match u_i; for the final sector
    // w_(r-1) must match v_0.
    std::function<void(std::size_t, bool)> sector = [&](std::size_t i, bool second) {
        if (i == r && !second) {
            if (wlab[r - 1] == vlab[0]) {
                ++total;
                if (witnesses) witnesses->push_back({cp, rx, ry});
            }
            return;
        }
        const Cell& corner = second ? cycle[2 * i + 1] : cycle[2 * i];
        const Cell& partner = second ? cp[2 * i + 1] : cp[2 * i];
        for (int pi : a.in_label[std::size_t(corner.z)]) {
            const Cell& p = a.cells[std::size_t(pi)];
            for (int qi : a.in_label[std::size_t(partner.z)]) {
                budget.tick();
                const Cell& q = a.cells[std::size_t(qi)];
                if (!second) {
                    int u = a.z_at(q.x, p.y);
                    if (u < 0) continue;
                    int v = a.z_at(p.x, q.y);
                    if (v < 0) continue;
                    if (i > 0 && v != wlab[i - 1]) continue;
                    ulab[i] = u;
                    vlab[i] = v;
                    rx[i] = {p, q};
                    sector(i, true);
                } else {
                    int w = a.z_at(p.x, q.y);
                    if (w < 0) continue;
                    int zz = a.z_at(q.x, p.y);
                    if (zz < 0) continue;
                    if (zz != ulab[i]) continue;
                    wlab[i] = w;
                    ry[i] = {p, q};
                    sector(i + 1, false);
                }
            }
        }
    };

    // Partner slots as in count_ring_decompositions but with the swapped
    // share pattern: slot j shares a column with slot j-1 when j is odd...
    // here the partner is column-first: (cp[2k], cp[2k+1]) share a column,
    // (cp[2k+1], cp[2k+2]) share a row, closure (cp[m-1], cp[0]) by row.
    std::function<void(std::size_t)> place = [&](std::size_t j) {
        budget.tick();
        if (j == m - 1) {
            const Cell& prev = cp[m - 2];
            int z = a.z_at(prev.x, cp[0].y);
            if (z < 0) return;
            cp[m - 1] = {prev.x, cp[0].y, z};
            if (detail::partner_equals_cycle(cp, cycle)) return;
            sector(0, false);
            return;
        }
        if (j == 0) {
            for (const Cell& cand : a.cells) {
                budget.tick();
                cp[0] = cand;
                place(1);
            }
        } else if (j % 2 == 1) {
            for (int ci : a.in_col[std::size_t(cp[j - 1].x)]) {
                budget.tick();
                cp[j] = a.cells[std::size_t(ci)];
                place(j + 1);
            }
        } else {
            for (int ci : a.in_row[std::size_t(cp[j - 1].y)]) {
                budget.tick();
                cp[j] = a.cells[std::size_t(ci)];
                place(j + 1);
            }
        }
    };
    place(0);
    return total;
}

// Re-checks a dispersed ring decomposition from its witness record alone.
inline bool reverify_dispersed_decomposition(const Pls& a, const std::vector<Cell>& cycle,
                                             const DispersedWitness& w) {
    validate_label_cycle(a, cycle);
    std::size_t m = cycle.size();
    std::size_t r = m / 2;
    if (w.partner.size() != m || w.rect_x.size() != r || w.rect_y.size() != r) return false;
    for (const Cell& c : w.partner)
        if (!a.contains(c.x, c.y, c.z)) return false;
    for (std::size_t j = 0; j < m; ++j) {
        const Cell& c = w.partner[j];
        const Cell& d = w.partner[(j + 1) % m];
        if (j % 2 == 0 ? c.x != d.x : c.y != d.y) return false;
    }
    if (detail::partner_equals_cycle(w.partner, cycle)) return false;
    std::vector<int> ulab(r), vlab(r), wlab(r);
    for (std::size_t i = 0; i < r; ++i) {
        const Cell& p = w.rect_x[i][0];
        const Cell& q = w.rect_x[i][1];
        if (!a.contains(p.x, p.y, p.z) || !a.contains(q.x, q.y, q.z)) return false;
        if (p.z != cycle[2 * i].z || q.z != w.partner[2 * i].z) return false;
        int u = a.z_at(q.x, p.y), v = a.z_at(p.x, q.y);
        if (u < 0 || v < 0) return false;
        ulab[i] = u;
        vlab[i] = v;
        const Cell& py = w.rect_y[i][0];
        const Cell& qy = w.rect_y[i][1];
        if (!a.contains(py.x, py.y, py.z) || !a.contains(qy.x, qy.y, qy.z)) return false;
        if (py.z != cycle[2 * i + 1].z || qy.z != w.partner[2 * i + 1].z) return false;
        int ww = a.z_at(py.x, qy.y), zz = a.z_at(qy.x, py.y);
        if (ww < 0 || zz < 0) return false;
        if (zz != u) return false;
        wlab[i] = ww;
    }
    for (std::size_t i = 0; i < r; ++i)
        if (wlab[i] != vlab[(i + 1) % r]) return false;
    return true;
}

// ---- full decompositions (validated, not counted at scale) ----

struct FullDecomposition {
    std::vector<Cell> cycle;          // C, row-first
    std::vector<Cell> partner;        // C', aligned, column-first
    Cell centre_partner;              // centre of the point decomposition of C'
    std::vector<Cell> centre_rects;   // centres for the 2r ring rectangles,
                                      // ordered x1, y1, x2, y2, ...
};

// Checks that the record describes a full decomposition: a ring
// decomposition (C', bridging rectangles present) together with a point
// decomposition of C' and of every bridging rectangle.  Returns an empty
// string on success, else the reason.
inline std::string check_full_decomposition(const Pls& a, const FullDecomposition& fd) {
    std::size_t m = fd.cycle.size();
    if (fd.partner.size() != m || fd.centre_rects.size() != m) return "size mismatch";
    try {
        validate_label_cycle(a, fd.cycle);
    } catch (const input_error& e) {
        return std::string("cycle: ") + e.what();
    }
    // partner pattern: column-first, aligned slots
    for (std::size_t j = 0; j < m; ++j) {
        const Cell& c = fd.partner[j];
        const Cell& d = fd.partner[(j + 1) % m];
        if (!a.contains(c.x, c.y, c.z)) return "partner cell missing";
        bool col_step = j % 2 == 0;
        if (col_step && c.x != d.x) return "partner cells must share a column";
        if (!col_step && c.y != d.y) return "partner cells must share a row";
    }
    auto rect_present = [&](const Cell& p, const Cell& q) {
        return a.z_at(q.x, p.y) >= 0 && a.z_at(p.x, q.y) >= 0;
    };
    for (std::size_t j = 0; j < m; ++j)
        if (!rect_present(fd.cycle[j], fd.partner[j])) return "bridging rectangle missing";
    // point decomposition of C'
    for (const Cell& c : fd.partner)
        if (!rect_present(c, fd.centre_partner)) return "partner point decomposition missing";
    if (!a.contains(fd.centre_partner.x, fd.centre_partner.y, fd.centre_partner.z))
        return "partner centre missing";
    // point decompositions of the bridging rectangles
    for (std::size_t j = 0; j < m; ++j) {
        const Cell& p = fd.cycle[j];
        const Cell& q = fd.partner[j];
        const Cell& u = fd.centre_rects[j];
        if (!a.contains(u.x, u.y, u.z)) return "rectangle centre missing";
        int z1 = a.z_at(q.x, p.y), z2 = a.z_at(p.x, q.y);
        Cell corners[4] = {p, {q.x, p.y, z1}, q, {p.x, q.y, z2}};
        for (const Cell& c : corners)
            if (!rect_present(c, u)) return "rectangle point decomposition missing";
    }
    return "";
}

// ---- partially fixed discs ----

// A triangulated disc with tripartite vertex classes (0 = U, 1 = V, 2 = W),
// directed typed edges and triangular faces, plus a fixed-edge marking.  A
// copy in an instance assigns a generator value to every edge of its class
// so that every face is a cell; fixed edges have their values prescribed.
struct AbstractDisc {
    std::vector<int> vertex_class;           // per vertex: 0, 1, 2
    std::vector<std::pair<int, int>> edges;  // (from, to), class-typed by endpoints
    std::vector<std::array<int, 3>> faces;   // edge ids, any order
    std::vector<char> fixed;                 // per edge

    // edge class: 0 = U->V (column), 1 = V->W (row), 2 = U->W (label)
    int edge_class(int e) const {
        int cf = vertex_class[std::size_t(edges[std::size_t(e)].first)];
        int ct = vertex_class[std::size_t(edges[std::size_t(e)].second)];
        if (cf == 0 && ct == 1) return 0;
        if (cf == 1 && ct == 2) return 1;
        if (cf == 0 && ct == 2) return 2;
        return -1;
    }
};

// Validates the disc invariants: typed edges, faces that are genuine
// triangles with one edge of each class, each edge lying in one or two
// faces, Euler characteristic V - E + F = 1, and a boundary (edges in
// exactly one face) forming a single closed cycle.  Throws input_error.
inline void validate_disc(const AbstractDisc& d) {
    std::size_t nv = d.vertex_class.size(), ne = d.edges.size(), nf = d.faces.size();
    if (nv == 0 || ne == 0 || nf == 0) throw input_error("disc must be nonempty");
    if (d.fixed.size() != ne) throw input_error("fixed marking size mismatch");
    for (int c : d.vertex_class)
        if (c < 0 || c > 2) throw input_error("vertex class must be 0, 1 or 2");
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& [f, t] = d.edges[e];
        if (f < 0 || t < 0 || f >= int(nv) || t >= int(nv)) throw input_error("edge endpoint out of range");
        if (d.edge_class(int(e)) < 0)
            throw input_error("edge " + std::to_string(e) + " does not follow the class directions");
    }
    std::vector<int> incidence(ne, 0);
    for (const auto& tri : d.faces) {
        int ex = -1, ey = -1, ez = -1;
        for (int e : tri) {
            if (e < 0 || e >= int(ne)) throw input_error("face edge id out of range");
            int cls = d.edge_class(e);
            if (cls == 0) ex = e;
            if (cls == 1) ey = e;
            if (cls == 2) ez = e;
        }
        if (ex < 0 || ey < 0 || ez < 0)
            throw input_error("each face needs one edge of every class");
        const auto& X = d.edges[std::size_t(ex)];
        const auto& Y = d.edges[std::size_t(ey)];
        const auto& Z = d.edges[std::size_t(ez)];
        if (X.second != Y.first || X.first != Z.first || Y.second != Z.second)
            throw input_error("face edges do not close into a triangle");
        for (int e : tri) ++incidence[std::size_t(e)];
    }
    std::vector<int> boundary;
    for (std::size_t e = 0; e < ne; ++e) {
        if (incidence[e] == 0) throw input_error("edge " + std::to_string(e) + " lies in no face");
        if (incidence[e] > 2) throw input_error("edge " + std::to_string(e) + " lies in more than two faces");
        if (incidence[e] == 1) boundary.push_back(int(e));
    }
    if (i64(nv) - i64(ne) + i64(nf) != 1)
        throw input_error("Euler characteristic V - E + F must equal 1");
    if (boundary.empty()) throw input_error("disc must have a boundary");
    // boundary forms a single closed cycle: every touched vertex has degree 2
    std::map<int, int> deg;
    for (int e : boundary) {
        ++deg[d.edges[std::size_t(e)].first];
        ++deg[d.edges[std::size_t(e)].second];
    }
    for (const auto& [v, k] : deg) {
        (void)v;
        if (k != 2) throw input_error("boundary does not form a single closed cycle");
    }
    // connectivity of the boundary cycle
    std::map<int, std::vector<int>> adj;
    for (int e : boundary) {
        adj[d.edges[std::size_t(e)].first].push_back(d.edges[std::size_t(e)].second);
        adj[d.edges[std::size_t(e)].second].push_back(d.edges[std::size_t(e)].first);
    }
    std::vector<int> stack{adj.begin()->first};
    std::map<int, char> seen{{stack[0], 1}};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen.count(w)) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    if (seen.size() != deg.size()) throw input_error("boundary is disconnected");
}

inline std::vector<int> boundary_edges(const AbstractDisc& d) {
    std::vector<int> incidence(d.edges.size(), 0);
    for (const auto& tri : d.faces)
        for (int e : tri) ++incidence[std::size_t(e)];
    std::vector<int> out;
    for (std::size_t e = 0; e < d.edges.size(); ++e)
        if (incidence[e] == 1) out.push_back(int(e));
    return out;
}

struct TrivialMax {
    BigCount value;
    int internal_vertices = 0;
};

// Trivial maximum number of copies of a boundary-fixed disc: n to the number
// of internal vertices.  Requires every boundary edge to be fixed.
inline TrivialMax trivial_max(const AbstractDisc& d, int n) {
    validate_disc(d);
    if (n < 1) throw input_error("ambient size must be positive");
    for (int e : boundary_edges(d))
        if (!d.fixed[std::size_t(e)])
            throw input_error("boundary edge " + std::to_string(e) +
                              " is unfixed; fix the whole boundary first");
    std::vector<char> on_boundary(d.vertex_class.size(), 0);
    for (int e : boundary_edges(d)) {
        on_boundary[std::size_t(d.edges[std::size_t(e)].first)] = 1;
        on_boundary[std::size_t(d.edges[std::size_t(e)].second)] = 1;
    }
    int vi = 0;
    for (char b : on_boundary)
        if (!b) ++vi;
    TrivialMax out;
    out.internal_vertices = vi;
    u128 v = 1;
    bool fits = true;
    for (int i = 0; i < vi; ++i) {
        u128 next = v * u128(u64(n));
        if (next / u128(u64(n)) != v) {
            fits = false;
            break;
        }
        v = next;
    }
    if (fits) {
        out.value = BigCount::of(v);
    } else {
        boost::multiprecision::cpp_int big = 1;
        for (int i = 0; i < vi; ++i) big *= n;
        out.value = BigCount::from_decimal(big.str());
    }
    return out;
}

// Exhaustive copy counting for small discs: assigns values to unfixed edges
// by backtracking over faces.  gamma maps fixed edge ids to values.
inline u64 count_disc_copies(const AbstractDisc& d, const Pls& a,
                             const std::map<int, int>& gamma, Budget& budget) {
    validate_disc(d);
    std::size_t ne = d.edges.size();
    std::vector<int> value(ne, -1);
    for (std::size_t e = 0; e < ne; ++e) {
        if (d.fixed[e]) {
            auto it = gamma.find(int(e));
            if (it == gamma.end()) throw input_error("fixed edge " + std::to_string(e) + " missing a value");
            value[e] = it->second;
        }
    }
    auto cls_size = [&](int cls) { return cls == 0 ? a.dims.nx : cls == 1 ? a.dims.ny : a.dims.nz; };
    for (std::size_t e = 0; e < ne; ++e)
        if (value[e] >= cls_size(d.edge_class(int(e)))) throw input_error("fixed value out of range");

    // face edge ids by class, for quick checking
    struct FaceEdges {
        int ex, ey, ez;
    };
    std::vector<FaceEdges> fe;
    for (const auto& tri : d.faces) {
        FaceEdges f{-1, -1, -1};
        for (int e : tri) {
            int cls = d.edge_class(e);
            if (cls == 0) f.ex = e;
            if (cls == 1) f.ey = e;
            if (cls == 2) f.ez = e;
        }
        fe.push_back(f);
    }
    auto face_ok = [&](const FaceEdges& f) {
        int x = value[std::size_t(f.ex)], y = value[std::size_t(f.ey)], z = value[std::size_t(f.ez)];
        if (x < 0 || y < 0) return true;           // undecided
        if (z < 0) return a.z_at(x, y) >= 0;       // completably undecided
        return a.contains(x, y, z);
    };

    std::vector<int> order;
    for (std::size_t e = 0; e < ne; ++e)
        if (value[e] < 0) order.push_back(int(e));

    u64 total = 0;
    std::function<void(std::size_t)> place = [&](std::size_t k) {
        budget.tick();
        if (k == order.size()) {
            for (const auto& f : fe)
                if (!face_ok(f)) return;
            ++total;
            return;
        }
        int e = order[k];
        int cls = d.edge_class(e);
        for (int v = 0; v < cls_size(cls); ++v) {
            value[std::size_t(e)] = v;
            bool ok = true;
            for (const auto& f : fe) {
                if (f.ex != e && f.ey != e && f.ez != e) continue;
                int x = value[std::size_t(f.ex)], y = value[std::size_t(f.ey)],
                    z = value[std::size_t(f.ez)];
                if (x >= 0 && y >= 0) {
                    int zz = a.z_at(x, y);
                    if (zz < 0 || (z >= 0 && z != zz)) {
                        ok = false;
                        break;
                    }
                } else if (x >= 0 && z >= 0) {
                    if (a.y_at(x, z) < 0) {
                        ok = false;
                        break;
                    }
                } else if (y >= 0 && z >= 0) {
                    if (a.x_at(y, z) < 0) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) place(k + 1);
            value[std::size_t(e)] = -1;
        }
    };
    place(0);
    return total;
}

// The 2r-gon: 2r triangles around a central vertex, boundary fixed to the
// given signature-length; vertices: centre (class V), then alternating
// U, W around the boundary.
inline AbstractDisc make_polygon_disc(int r) {
    if (r < 1) throw input_error("polygon needs r >= 1");
    AbstractDisc d;
    int m = 2 * r;
    d.vertex_class.push_back(1);  // centre, class V
    for (int i = 0; i < r; ++i) {
        d.vertex_class.push_back(0);  // U
        d.vertex_class.push_back(2);  // W
    }
    // spokes: u_i -> centre (class X edge), centre -> w_i (class Y edge)
    // vertex ids: u_i = 1 + 2i, w_i = 2 + 2i
    std::vector<int> spoke_u(std::size_t(r), 0), spoke_w(std::size_t(r), 0);
    for (int i = 0; i < r; ++i) {
        spoke_u[std::size_t(i)] = int(d.edges.size());
        d.edges.emplace_back(1 + 2 * i, 0);
        spoke_w[std::size_t(i)] = int(d.edges.size());
        d.edges.emplace_back(0, 2 + 2 * i);
    }
    // boundary z-edges: u_i -> w_i and u_(i+1) -> w_i
    for (int i = 0; i < r; ++i) {
        int zi1 = int(d.edges.size());
        d.edges.emplace_back(1 + 2 * i, 2 + 2 * i);
        int zi2 = int(d.edges.size());
        d.edges.emplace_back(1 + 2 * ((i + 1) % r), 2 + 2 * i);
        d.faces.push_back(std::array<int, 3>{spoke_u[std::size_t(i)], spoke_w[std::size_t(i)], zi1});
        d.faces.push_back(std::array<int, 3>{spoke_u[std::size_t((i + 1) % r)], spoke_w[std::size_t(i)], zi2});
    }
    d.fixed.assign(d.edges.size(), 0);
    for (int e : boundary_edges(d)) d.fixed[std::size_t(e)] = 1;
    (void)m;
    return d;
}

// The dispersed-ring disc of a 2r-gon: a central 2r-gon (the partner cycle,
// column-first) surrounded by 2r 4-gon sectors (the bridging rectangles),
// boundary fixed.  Internal vertex count is 4r + 1.
//
// Ring vertex j sits between the central ring edges of partner cells j and
// j+1; outer vertex s between boundary edges s and s+1.  Since the partner
// alternates column/row sharing while the boundary alternates row/column,
// ring vertices have class U at even j and outer vertices class W at even s.
// Radial edges join ring vertex s to outer vertex s, alternating direction.
inline AbstractDisc make_dispersed_ring_disc(int r) {
    if (r < 2) throw input_error("dispersed ring disc needs r >= 2");
    AbstractDisc d;
    int m = 2 * r;
    // vertices: 0 = central centre (V); 1..m ring (U at even j, W at odd);
    // m+1..2m outer (W at even s, U at odd); 2m+1..3m sector centres (V)
    d.vertex_class.push_back(1);
    for (int j = 0; j < m; ++j) d.vertex_class.push_back(j % 2 == 0 ? 0 : 2);
    for (int s = 0; s < m; ++s) d.vertex_class.push_back(s % 2 == 0 ? 2 : 0);
    for (int s = 0; s < m; ++s) d.vertex_class.push_back(1);

    auto ringv = [&](int j) { return 1 + ((j + m) % m); };
    auto outv = [&](int s) { return m + 1 + ((s + m) % m); };
    auto sectc = [&](int s) { return 2 * m + 1 + ((s + m) % m); };

    auto add_edge = [&](int from, int to) {
        d.edges.emplace_back(from, to);
        return int(d.edges.size()) - 1;
    };

    // central spokes: one x-spoke per even ring vertex, one y-spoke per odd
    std::vector<int> cen_spoke(std::size_t(m), 0);
    for (int j = 0; j < m; ++j)
        cen_spoke[std::size_t(j)] = j % 2 == 0 ? add_edge(ringv(j), 0) : add_edge(0, ringv(j));
    // central ring edges: ring[j] is the z-edge of partner cell j, running
    // between ring vertices j-1 and j with the U endpoint first
    std::vector<int> ring(std::size_t(m), 0);
    for (int j = 0; j < m; ++j) {
        ring[std::size_t(j)] = j % 2 == 0 ? add_edge(ringv(j), ringv(j - 1))
                                          : add_edge(ringv(j - 1), ringv(j));
        int xs = cen_spoke[std::size_t(j % 2 == 0 ? j : j - 1)];
        int ys = cen_spoke[std::size_t(j % 2 == 0 ? (j - 1 + m) % m : j)];
        d.faces.push_back(std::array<int, 3>{xs, ys, ring[std::size_t(j)]});
    }
    // boundary edges: b[s] is the z-edge of cycle cell s, between outer
    // vertices s-1 and s
    std::vector<int> outer(std::size_t(m), 0);
    for (int s = 0; s < m; ++s)
        outer[std::size_t(s)] = s % 2 == 0 ? add_edge(outv(s - 1), outv(s))
                                           : add_edge(outv(s), outv(s - 1));
    // radials: rad[s] between sectors s and s+1
    std::vector<int> radial(std::size_t(m), 0);
    for (int s = 0; s < m; ++s)
        radial[std::size_t(s)] = s % 2 == 0 ? add_edge(ringv(s), outv(s))
                                            : add_edge(outv(s), ringv(s));
    // sectors: quadrilateral s has corners outv(s-1), outv(s), ringv(s-1),
    // ringv(s) and sides outer[s], rad[s], ring[s], rad[s-1]
    for (int s = 0; s < m; ++s) {
        int c = sectc(s);
        int x_out, y_out, x_ring, y_ring;  // spokes to the four corners
        if (s % 2 == 0) {
            x_out = add_edge(outv(s - 1), c);
            y_out = add_edge(c, outv(s));
            x_ring = add_edge(ringv(s), c);
            y_ring = add_edge(c, ringv(s - 1));
        } else {
            x_out = add_edge(outv(s), c);
            y_out = add_edge(c, outv(s - 1));
            x_ring = add_edge(ringv(s - 1), c);
            y_ring = add_edge(c, ringv(s));
        }
        if (s % 2 == 0) {
            d.faces.push_back(std::array<int, 3>{x_out, y_out, outer[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_ring, y_out, radial[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_ring, y_ring, ring[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_out, y_ring, radial[std::size_t((s + m - 1) % m)]});
        } else {
            d.faces.push_back(std::array<int, 3>{x_out, y_out, outer[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_out, y_ring, radial[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_ring, y_ring, ring[std::size_t(s)]});
            d.faces.push_back(std::array<int, 3>{x_ring, y_out, radial[std::size_t((s + m - 1) % m)]});
        }
    }
    d.fixed.assign(d.edges.size(), 0);
    for (int e : boundary_edges(d)) d.fixed[std::size_t(e)] = 1;
    return d;
}

}  // namespace plsq
