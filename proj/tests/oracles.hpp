#pragma once
// Independent reference implementations used only by tests.  Everything here
// is written as literally as possible from the definitions - plain nested
// loops and exhaustive searches - so the optimized library code can be
// checked against them on small instances.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "plsq/cycles.hpp"
#include "plsq/pls.hpp"

namespace oracle {

using plsq::Cell;
using plsq::CycleKind;
using plsq::Pls;
using plsq::u64;

// Ordered tuples (x1, x2, y1, y2) whose four corners are all filled.
inline u64 count_rectangles(const Pls& a) {
    u64 total = 0;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2)
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = 0; y2 < a.dims.ny; ++y2)
                    if (a.z_at(x1, y1) >= 0 && a.z_at(x2, y1) >= 0 && a.z_at(x1, y2) >= 0 &&
                        a.z_at(x2, y2) >= 0)
                        ++total;
    return total;
}

// Ordered pairs of rectangles with equal labellings, by eight nested loops.
inline u64 count_octahedra(const Pls& a) {
    u64 total = 0;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2)
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = 0; y2 < a.dims.ny; ++y2) {
                    int la = a.z_at(x1, y1), lb = a.z_at(x2, y1);
                    int lc = a.z_at(x1, y2), ld = a.z_at(x2, y2);
                    if (la < 0 || lb < 0 || lc < 0 || ld < 0) continue;
                    for (int x3 = 0; x3 < a.dims.nx; ++x3)
                        for (int x4 = 0; x4 < a.dims.nx; ++x4)
                            for (int y3 = 0; y3 < a.dims.ny; ++y3)
                                for (int y4 = 0; y4 < a.dims.ny; ++y4)
                                    if (a.z_at(x3, y3) == la && a.z_at(x4, y3) == lb &&
                                        a.z_at(x3, y4) == lc && a.z_at(x4, y4) == ld)
                                        ++total;
                }
    return total;
}

// Twelve-coordinate octahedron parametrization: maps x indexed by the last
// two bits, y by the outer two, z by the first two, every one of the eight
// induced triples a cell.  Counts assignments of the twelve coordinates.
inline u64 count_octahedra_symmetric(const Pls& a) {
    u64 total = 0;
    int X = a.dims.nx, Y = a.dims.ny, Z = a.dims.nz;
    std::vector<int> xs(4), ys(4), zs(4);
    // xs[2*e2 + e3], ys[2*e1 + e3], zs[2*e1 + e2]
    std::function<void(int)> fill = [&](int slot) {
        if (slot == 12) {
            for (int e = 0; e < 8; ++e) {
                int e1 = (e >> 2) & 1, e2 = (e >> 1) & 1, e3 = e & 1;
                if (!a.contains(xs[std::size_t(2 * e2 + e3)], ys[std::size_t(2 * e1 + e3)],
                                zs[std::size_t(2 * e1 + e2)]))
                    return;
            }
            ++total;
            return;
        }
        int bound = slot < 4 ? X : slot < 8 ? Y : Z;
        for (int v = 0; v < bound; ++v) {
            (slot < 4 ? xs[std::size_t(slot)]
                      : slot < 8 ? ys[std::size_t(slot - 4)] : zs[std::size_t(slot - 8)]) = v;
            fill(slot + 1);
        }
    };
    fill(0);
    return total;
}

// Closed 2r-walk counting straight from the three cycle definitions.  The
// share pattern depends on the kind: label cycles alternate row/column,
// column cycles row/label, row cycles label/column; a step at index j
// (0-based, j odd = even-numbered step) uses the second pattern entry.
inline bool share_matches(const Cell& c, const Cell& d, int what) {
    // what: 0 = column, 1 = row, 2 = label
    return what == 0 ? c.x == d.x : what == 1 ? c.y == d.y : c.z == d.z;
}

inline void share_pattern(CycleKind kind, int& odd_share, int& even_share) {
    switch (kind) {
        case CycleKind::label: odd_share = 1; even_share = 0; return;
        case CycleKind::column: odd_share = 1; even_share = 2; return;
        case CycleKind::row: odd_share = 2; even_share = 0; return;
    }
}

inline u64 count_cycles(const Pls& a, CycleKind kind, int r) {
    int odd_share = 0, even_share = 0;
    share_pattern(kind, odd_share, even_share);
    int m = 2 * r;
    u64 total = 0;
    std::vector<Cell> walk(std::size_t(m), Cell{});
    std::function<void(int)> step = [&](int j) {
        if (j == m) {
            if (share_matches(walk[std::size_t(m - 1)], walk[0], even_share)) ++total;
            return;
        }
        for (const Cell& c : a.cells) {
            if (j > 0) {
                int what = j % 2 == 1 ? odd_share : even_share;
                if (!share_matches(walk[std::size_t(j - 1)], c, what)) continue;
            }
            walk[std::size_t(j)] = c;
            step(j + 1);
        }
    };
    step(0);
    return total;
}

inline int signature_of(const Cell& c, CycleKind kind) {
    switch (kind) {
        case CycleKind::label: return c.z;
        case CycleKind::column: return c.x;
        case CycleKind::row: return c.y;
    }
    return -1;
}

inline u64 count_signature_occurrences(const Pls& a, CycleKind kind, const std::vector<int>& sig) {
    int odd_share = 0, even_share = 0;
    share_pattern(kind, odd_share, even_share);
    int m = int(sig.size());
    u64 total = 0;
    std::vector<Cell> walk(std::size_t(m), Cell{});
    std::function<void(int)> step = [&](int j) {
        if (j == m) {
            if (share_matches(walk[std::size_t(m - 1)], walk[0], even_share)) ++total;
            return;
        }
        for (const Cell& c : a.cells) {
            if (signature_of(c, kind) != sig[std::size_t(j)]) continue;
            if (j > 0) {
                int what = j % 2 == 1 ? odd_share : even_share;
                if (!share_matches(walk[std::size_t(j - 1)], c, what)) continue;
            }
            walk[std::size_t(j)] = c;
            step(j + 1);
        }
    };
    step(0);
    return total;
}

// All signatures with their occurrence counts, by enumerating every walk.
inline std::map<std::vector<int>, u64> signature_census(const Pls& a, CycleKind kind, int r) {
    int odd_share = 0, even_share = 0;
    share_pattern(kind, odd_share, even_share);
    int m = 2 * r;
    std::map<std::vector<int>, u64> census;
    std::vector<Cell> walk(std::size_t(m), Cell{});
    std::function<void(int)> step = [&](int j) {
        if (j == m) {
            if (!share_matches(walk[std::size_t(m - 1)], walk[0], even_share)) return;
            std::vector<int> sig;
            for (const Cell& c : walk) sig.push_back(signature_of(c, kind));
            ++census[sig];
            return;
        }
        for (const Cell& c : a.cells) {
            if (j > 0) {
                int what = j % 2 == 1 ? odd_share : even_share;
                if (!share_matches(walk[std::size_t(j - 1)], c, what)) continue;
            }
            walk[std::size_t(j)] = c;
            step(j + 1);
        }
    };
    step(0);
    return census;
}

// Largest number of distinct closing signature values over realizable
// (2r-1)-prefixes, by enumerating every prefix walk.
inline u64 completion_defect(const Pls& a, CycleKind kind, int r) {
    int odd_share = 0, even_share = 0;
    share_pattern(kind, odd_share, even_share);
    int m = 2 * r;
    std::map<std::vector<int>, std::set<int>> closings;
    std::vector<Cell> walk(std::size_t(m), Cell{});
    std::function<void(int)> step = [&](int j) {
        if (j == m - 1) {
            std::vector<int> sig;
            for (int t = 0; t < m - 1; ++t) sig.push_back(signature_of(walk[std::size_t(t)], kind));
            auto& slot = closings[sig];
            // the closing cell shares per the odd pattern with the last
            // prefix cell and per the even pattern with the first
            for (const Cell& c : a.cells)
                if (share_matches(walk[std::size_t(m - 2)], c, odd_share) &&
                    share_matches(c, walk[0], even_share))
                    slot.insert(signature_of(c, kind));
            return;
        }
        for (const Cell& c : a.cells) {
            if (j > 0) {
                int what = j % 2 == 1 ? odd_share : even_share;
                if (!share_matches(walk[std::size_t(j - 1)], c, what)) continue;
            }
            walk[std::size_t(j)] = c;
            step(j + 1);
        }
    };
    step(0);
    u64 defect = 0;
    for (const auto& [sig, set] : closings) {
        (void)sig;
        defect = std::max(defect, u64(set.size()));
    }
    return defect;
}

// Quadrangle violations counted straight from the pattern definition: build
// the completion relation, pick the lexicographically least witness
// rectangle per (prefix, d), scan open prefixes for displaced evidence, and
// count distinct configurations of eight cells.
inline u64 count_qc_violations(const Pls& a, CycleKind kind) {
    std::map<std::array<int, 3>, std::set<int>> completions;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2)
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = 0; y2 < a.dims.ny; ++y2) {
                    int la = a.z_at(x1, y1), lb = a.z_at(x2, y1);
                    int lc = a.z_at(x1, y2), ld = a.z_at(x2, y2);
                    if (la < 0 || lb < 0 || lc < 0 || ld < 0) continue;
                    completions[{la, lb, lc}].insert(ld);
                }
    auto witness = [&](int la, int lb, int lc, int d) {
        for (int x1 = 0; x1 < a.dims.nx; ++x1)
            for (int x2 = 0; x2 < a.dims.nx; ++x2)
                for (int y1 = 0; y1 < a.dims.ny; ++y1)
                    for (int y2 = 0; y2 < a.dims.ny; ++y2)
                        if (a.z_at(x1, y1) == la && a.z_at(x2, y1) == lb &&
                            a.z_at(x1, y2) == lc && a.z_at(x2, y2) == d)
                            return std::array<int, 4>{x1, x2, y1, y2};
        return std::array<int, 4>{-1, -1, -1, -1};
    };
    std::set<std::vector<std::array<int, 3>>> configs;
    auto record = [&](const std::array<int, 4>& w, int la, int lb, int lc, int d, int x3, int y3,
                      int x4, int y4, const std::array<int, 3>& displaced) {
        std::vector<std::array<int, 3>> cells{
            {w[0], w[2], la}, {w[1], w[2], lb}, {w[0], w[3], lc}, {w[1], w[3], d},
            {x3, y3, la},     {x4, y3, lb},     {x3, y4, lc},     displaced};
        std::sort(cells.begin(), cells.end());
        configs.insert(cells);
    };
    for (int x3 = 0; x3 < a.dims.nx; ++x3)
        for (int x4 = 0; x4 < a.dims.nx; ++x4)
            for (int y3 = 0; y3 < a.dims.ny; ++y3)
                for (int y4 = 0; y4 < a.dims.ny; ++y4) {
                    int la = a.z_at(x3, y3), lb = a.z_at(x4, y3), lc = a.z_at(x3, y4);
                    if (la < 0 || lb < 0 || lc < 0) continue;
                    auto it = completions.find({la, lb, lc});
                    if (it == completions.end()) continue;
                    for (int d : it->second) {
                        auto w = witness(la, lb, lc, d);
                        if (kind == CycleKind::label) {
                            int dp = a.z_at(x4, y4);
                            if (dp >= 0 && dp != d)
                                record(w, la, lb, lc, d, x3, y3, x4, y4, {x4, y4, dp});
                        } else if (kind == CycleKind::column) {
                            for (int x5 = 0; x5 < a.dims.nx; ++x5)
                                if (x5 != x4 && a.z_at(x5, y4) == d)
                                    record(w, la, lb, lc, d, x3, y3, x4, y4, {x5, y4, d});
                        } else {
                            for (int y5 = 0; y5 < a.dims.ny; ++y5)
                                if (y5 != y4 && a.z_at(x4, y5) == d)
                                    record(w, la, lb, lc, d, x3, y3, x4, y4, {x4, y5, d});
                        }
                    }
                }
    return u64(configs.size());
}

// Decomposition oracles: every slot is scanned over all cells with literal
// share and presence checks.

inline bool rect_in(const Pls& a, const Cell& p, const Cell& q) {
    return a.z_at(q.x, p.y) >= 0 && a.z_at(p.x, q.y) >= 0;
}

inline u64 count_point_decompositions(const Pls& a, const std::vector<Cell>& cycle, double eps) {
    u64 needed = eps > 0 ? u64(std::ceil(eps * double(a.dims.nz))) : 0;
    u64 total = 0;
    for (const Cell& u : a.cells) {
        bool ok = true;
        for (const Cell& c : cycle) {
            if (!rect_in(a, c, u)) {
                ok = false;
                break;
            }
            if (needed > 0) {
                std::vector<int> sig{c.z, a.z_at(u.x, c.y), u.z, a.z_at(c.x, u.y)};
                if (oracle::count_signature_occurrences(a, CycleKind::label, sig) < needed) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) ++total;
    }
    return total;
}

// Partner cycles are enumerated as arbitrary cell tuples and filtered by the
// column-first share pattern.
inline u64 count_ring_decompositions(const Pls& a, const std::vector<Cell>& cycle, double theta) {
    std::size_t m = cycle.size();
    u64 needed = theta > 0 ? u64(std::ceil(theta * double(a.dims.nz))) : 0;
    u64 total = 0;
    std::vector<Cell> cp(m);
    std::function<void(std::size_t)> pick = [&](std::size_t j) {
        if (j == m) {
            for (std::size_t t = 0; t < m; ++t) {
                const Cell& c = cp[t];
                const Cell& d = cp[(t + 1) % m];
                if (t % 2 == 0 ? c.x != d.x : c.y != d.y) return;
            }
            // a second cycle is required, so the decomposed cycle itself
            // does not qualify as its own partner
            bool same = true;
            for (std::size_t t = 0; t < m && same; ++t)
                same = cp[t].x == cycle[t].x && cp[t].y == cycle[t].y;
            if (same) return;
            for (std::size_t t = 0; t < m; ++t)
                if (!rect_in(a, cycle[t], cp[t])) return;
            if (needed > 0) {
                std::vector<int> sig;
                for (std::size_t t = 1; t <= m; ++t) sig.push_back(cp[t % m].z);
                if (oracle::count_signature_occurrences(a, CycleKind::label, sig) < needed) return;
                for (std::size_t t = 0; t < m; ++t) {
                    const Cell& p = cycle[t];
                    const Cell& q = cp[t];
                    std::vector<int> rs{p.z, a.z_at(q.x, p.y), q.z, a.z_at(p.x, q.y)};
                    if (oracle::count_signature_occurrences(a, CycleKind::label, rs) < needed) return;
                }
            }
            ++total;
            return;
        }
        for (const Cell& c : a.cells) {
            cp[j] = c;
            pick(j + 1);
        }
    };
    pick(0);
    return total;
}

// Dispersed ring decompositions: partner tuple filtered as above, then the
// two rectangle families chosen from all cell pairs, with the six label
// equalities checked literally.
inline u64 count_dispersed(const Pls& a, const std::vector<Cell>& cycle) {
    std::size_t m = cycle.size();
    std::size_t r = m / 2;
    u64 total = 0;
    std::vector<Cell> cp(m);

    struct Pair {
        Cell first, second;
        int corner1, corner2;  // labels of the two forced corners
    };

    auto pairs_for = [&](int second_label, int first_label, bool xtype) {
        // xtype: corners u = (q.x, p.y), v = (p.x, q.y); ytype: w = (p.x, q.y),
        // z = (q.x, p.y) -- same two corners, named per the family
        std::vector<Pair> out;
        for (const Cell& p : a.cells) {
            if (p.z != first_label) continue;
            for (const Cell& q : a.cells) {
                if (q.z != second_label) continue;
                int c1 = a.z_at(q.x, p.y);
                int c2 = a.z_at(p.x, q.y);
                if (c1 < 0 || c2 < 0) continue;
                if (xtype)
                    out.push_back({p, q, c1, c2});  // corner1 = u, corner2 = v
                else
                    out.push_back({p, q, c2, c1});  // corner1 = w, corner2 = z
            }
        }
        return out;
    };

    std::function<void(std::size_t)> pick = [&](std::size_t j) {
        if (j < m) {
            for (const Cell& c : a.cells) {
                cp[j] = c;
                pick(j + 1);
            }
            return;
        }
        for (std::size_t t = 0; t < m; ++t) {
            const Cell& c = cp[t];
            const Cell& d = cp[(t + 1) % m];
            if (t % 2 == 0 ? c.x != d.x : c.y != d.y) return;
        }
        bool same = true;
        for (std::size_t t = 0; t < m && same; ++t)
            same = cp[t].x == cycle[t].x && cp[t].y == cycle[t].y;
        if (same) return;
        // rectangle pair lists per sector
        std::vector<std::vector<Pair>> rx(r), sy(r);
        for (std::size_t i = 0; i < r; ++i) {
            rx[i] = pairs_for(cp[2 * i].z, cycle[2 * i].z, true);
            sy[i] = pairs_for(cp[2 * i + 1].z, cycle[2 * i + 1].z, false);
        }
        // walk the coupling chain R1 S1 R2 S2 ... checking u_i = z_i and
        // w_i = v_(i+1)
        std::function<void(std::size_t, int, int)> chain = [&](std::size_t i, int v1, int prev_w) {
            if (i == r) {
                if (prev_w == v1) ++total;
                return;
            }
            for (const Pair& R : rx[i]) {
                if (i > 0 && R.corner2 != prev_w) continue;  // v_i = w_(i-1)
                for (const Pair& S : sy[i]) {
                    if (S.corner2 != R.corner1) continue;  // z_i = u_i
                    chain(i + 1, i == 0 ? R.corner2 : v1, S.corner1);
                }
            }
        };
        chain(0, -1, -1);
    };
    pick(0);
    return total;
}

// Every completed rectangle grouped by its label prefix (z1, z2, z3); two
// different completions of one prefix are a slit pair.
inline std::set<std::pair<int, int>> slit_pairs(const Pls& a) {
    struct Slot {
        int z1, z2, z3, d;
    };
    std::vector<Slot> slots;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2) {
            if (x2 == x1) continue;
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = 0; y2 < a.dims.ny; ++y2) {
                    if (y2 == y1) continue;
                    int z1 = a.z_at(x1, y1);
                    int z2 = a.z_at(x2, y1);
                    int z3 = a.z_at(x1, y2);
                    int d = a.z_at(x2, y2);
                    if (z1 < 0 || z2 < 0 || z3 < 0 || d < 0) continue;
                    slots.push_back({z1, z2, z3, d});
                }
        }
    std::set<std::pair<int, int>> out;
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = 0; j < slots.size(); ++j) {
            const Slot& s = slots[i];
            const Slot& t = slots[j];
            if (s.z1 == t.z1 && s.z2 == t.z2 && s.z3 == t.z3 && s.d != t.d)
                out.insert({std::min(s.d, t.d), std::max(s.d, t.d)});
        }
    return out;
}

// Connectors for a pair of 2-tuples in a bipartite graph by literal
// enumeration: right vertices u1 ~ x1, u2 ~ x2 and left vertices v1 ~ y1,
// v2 ~ y2 with every u adjacent to every v, all within the allowed sets.
inline u64 count_connectors2(int nx, int ny, const std::function<bool(int, int)>& adj,
                             const std::vector<char>& x_ok, const std::vector<char>& y_ok, int x1,
                             int x2, int y1, int y2) {
    u64 total = 0;
    for (int u1 = 0; u1 < ny; ++u1) {
        if (!y_ok[std::size_t(u1)] || !adj(x1, u1)) continue;
        for (int u2 = 0; u2 < ny; ++u2) {
            if (!y_ok[std::size_t(u2)] || !adj(x2, u2)) continue;
            for (int v1 = 0; v1 < nx; ++v1) {
                if (!x_ok[std::size_t(v1)] || !adj(v1, y1)) continue;
                if (!adj(v1, u1) || !adj(v1, u2)) continue;
                for (int v2 = 0; v2 < nx; ++v2) {
                    if (!x_ok[std::size_t(v2)] || !adj(v2, y2)) continue;
                    if (!adj(v2, u1) || !adj(v2, u2)) continue;
                    ++total;
                }
            }
        }
    }
    return total;
}

// Adjacency of the popular-rectangle graph: cells spanning a completed
// rectangle whose label signature occurs at least `needed` times.
inline std::vector<std::vector<char>> popular_adjacency(const Pls& a, u64 needed) {
    std::size_t m = a.cells.size();
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const Cell& p = a.cells[i];
            const Cell& q = a.cells[j];
            if (p.x == q.x || p.y == q.y) continue;
            int m1 = a.z_at(q.x, p.y);
            int m2 = a.z_at(p.x, q.y);
            if (m1 < 0 || m2 < 0) continue;
            if (oracle::count_signature_occurrences(a, CycleKind::label, {p.z, m1, q.z, m2}) <
                needed)
                continue;
            adj[i][j] = 1;
            adj[j][i] = 1;
        }
    return adj;
}

// Rectangles of the instance restricted to the kept cells, split into
// (bad, total) where bad means fewer than `threshold` common neighbours in
// the popular-rectangle graph.
inline std::pair<u64, u64> bad_rectangle_stats(const Pls& a,
                                               const std::vector<std::vector<char>>& adj,
                                               const std::vector<char>& keep, double threshold) {
    std::size_t m = a.cells.size();
    auto index_of = [&](int x, int y) {
        for (std::size_t i = 0; i < m; ++i)
            if (a.cells[i].x == x && a.cells[i].y == y) return int(i);
        return -1;
    };
    u64 bad = 0, total = 0;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = x1 + 1; x2 < a.dims.nx; ++x2)
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = y1 + 1; y2 < a.dims.ny; ++y2) {
                    int c[4] = {index_of(x1, y1), index_of(x2, y1), index_of(x2, y2),
                                index_of(x1, y2)};
                    bool present = true;
                    for (int i : c) present = present && i >= 0;
                    if (!present) continue;
                    bool inside = true;
                    for (int i : c) inside = inside && keep[std::size_t(i)];
                    if (!inside) continue;
                    ++total;
                    u64 common = 0;
                    for (std::size_t u = 0; u < m; ++u) {
                        bool all = true;
                        for (int i : c) all = all && adj[u][std::size_t(i)];
                        if (all) ++common;
                    }
                    if (double(common) < threshold) ++bad;
                }
    return {bad, total};
}

// Largest subset clean for all three quadrangle conditions, by trying
// every subset of cells.
inline std::size_t max_clean_subset(const Pls& a) {
    std::size_t m = a.cells.size();
    std::size_t best = 0;
    for (u64 mask = 0; mask < (u64(1) << m); ++mask) {
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < m; ++i)
            if ((mask >> i) & 1) cells.push_back(a.cells[i]);
        std::size_t size = cells.size();
        if (size <= best) continue;
        Pls sub(a.dims, std::move(cells));
        if (count_qc_violations(sub, CycleKind::label) != 0) continue;
        if (count_qc_violations(sub, CycleKind::row) != 0) continue;
        if (count_qc_violations(sub, CycleKind::column) != 0) continue;
        best = size;
    }
    return best;
}

}  // namespace oracle
