#pragma once
// Quadrangle conditions, completion defect, and group reconstruction.
//
// Rectangle naming convention used throughout: a rectangle (x1, x2, y1, y2)
// carries labels a = z(x1,y1), b = z(x2,y1), c = z(x1,y2), d = z(x2,y2), so
// a shares a row with b and a column with c, and d completes the prefix
// (a, b, c).  A kind-specific violation is a full rectangle completing
// (a, b, c) to d, together with an occurrence of the open prefix
// (a, b, c) at corners (x3,y3), (x4,y3), (x3,y4) whose completion evidence
// is displaced: label kind - the corner (x4,y4) is filled with d' != d;
// column kind - d sits in row y4 at a column x5 != x4; row kind - d sits in
// column x4 at a row y5 != y4.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "plsq/common.hpp"
#include "plsq/cycles.hpp"
#include "plsq/pls.hpp"

namespace plsq {

struct QCViolation {
    CycleKind kind;
    // Witness rectangle completing (a, b, c) to expected.
    Cell ra, rb, rc, rd;
    // Open prefix occurrence and the displaced cell.
    Cell oa, ob, oc, displaced;
    int expected = -1;  // d from the witness rectangle
    int found = -1;     // label kind: d'; column/row kind: equal to expected

    std::vector<Cell> cells() const { return {ra, rb, rc, rd, oa, ob, oc, displaced}; }
};

// Checks that a violation record really describes the forbidden pattern in a.
inline bool reverify_violation(const Pls& a, const QCViolation& v) {
    auto has = [&](const Cell& c) { return a.contains(c.x, c.y, c.z); };
    for (const Cell& c : v.cells())
        if (!has(c)) return false;
    // witness rectangle shape
    if (!(v.ra.y == v.rb.y && v.rc.y == v.rd.y && v.ra.x == v.rc.x && v.rb.x == v.rd.x))
        return false;
    if (v.rd.z != v.expected) return false;
    // open prefix shape and labels matching the witness rectangle
    if (!(v.oa.y == v.ob.y && v.oa.x == v.oc.x)) return false;
    if (!(v.oa.z == v.ra.z && v.ob.z == v.rb.z && v.oc.z == v.rc.z)) return false;
    switch (v.kind) {
        case CycleKind::label:
            return v.displaced.x == v.ob.x && v.displaced.y == v.oc.y &&
                   v.displaced.z == v.found && v.found != v.expected;
        case CycleKind::column:
            return v.displaced.y == v.oc.y && v.displaced.z == v.expected &&
                   v.displaced.x != v.ob.x;
        case CycleKind::row:
            return v.displaced.x == v.ob.x && v.displaced.z == v.expected &&
                   v.displaced.y != v.oc.y;
    }
    return false;
}

namespace detail {

struct CompletionTable {
    // packed (a,b,c) -> distinct completion labels with one witness rectangle each
    std::unordered_map<u64, std::vector<std::pair<int, std::array<Cell, 4>>>> map;

    static u64 key(int a, int b, int c) {
        return (u64(u32(a)) << 42) | (u64(u32(b)) << 21) | u64(u32(c));
    }
};

// Enumerates all full rectangles once, keeping one witness per (prefix, d).
inline CompletionTable build_completions(const Pls& a) {
    if (a.dims.nz >= (1 << 21)) throw input_error("label count beyond packing limit");
    CompletionTable tab;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2)
            for (int y1 = 0; y1 < a.dims.ny; ++y1) {
                int la = a.z_at(x1, y1);
                if (la < 0) continue;
                int lb = a.z_at(x2, y1);
                if (lb < 0) continue;
                for (int y2 = 0; y2 < a.dims.ny; ++y2) {
                    int lc = a.z_at(x1, y2);
                    if (lc < 0) continue;
                    int ld = a.z_at(x2, y2);
                    if (ld < 0) continue;
                    auto& slot = tab.map[CompletionTable::key(la, lb, lc)];
                    bool seen = false;
                    for (auto& [d, w] : slot)
                        if (d == ld) {
                            seen = true;
                            break;
                        }
                    if (!seen)
                        slot.emplace_back(ld, std::array<Cell, 4>{Cell{x1, y1, la}, Cell{x2, y1, lb},
                                                                  Cell{x1, y2, lc}, Cell{x2, y2, ld}});
                }
            }
    for (auto& [k, slot] : tab.map) {
        (void)k;
        std::sort(slot.begin(), slot.end(),
                  [](const auto& p, const auto& q) { return p.first < q.first; });
    }
    return tab;
}

}  // namespace detail

// Lists every violation of the given kind, in lexicographic order of the
// open prefix corners.  Empty result means the condition holds.  A violation
// is identified by its configuration of eight cells: scans that reach the
// same eight cells through different role assignments report it once, under
// the first role assignment encountered.
inline std::vector<QCViolation> check_quadrangle(const Pls& a, CycleKind kind) {
    auto completions = detail::build_completions(a);
    std::vector<QCViolation> out;
    std::set<std::array<int, 24>> reported;
    auto config_key = [](const QCViolation& v) {
        std::array<std::array<int, 3>, 8> cs;
        auto cl = v.cells();
        for (int i = 0; i < 8; ++i) cs[std::size_t(i)] = {cl[std::size_t(i)].x, cl[std::size_t(i)].y, cl[std::size_t(i)].z};
        std::sort(cs.begin(), cs.end());
        std::array<int, 24> flat{};
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 3; ++j) flat[std::size_t(3 * i + j)] = cs[std::size_t(i)][std::size_t(j)];
        return flat;
    };
    for (const Cell& ca : a.cells)
        for (int bi : a.in_row[std::size_t(ca.y)]) {
            const Cell& cb = a.cells[std::size_t(bi)];
            for (int ci : a.in_col[std::size_t(ca.x)]) {
                const Cell& cc = a.cells[std::size_t(ci)];
                auto it = completions.map.find(detail::CompletionTable::key(ca.z, cb.z, cc.z));
                if (it == completions.map.end()) continue;
                for (const auto& [d, wit] : it->second) {
                    QCViolation v;
                    v.kind = kind;
                    v.ra = wit[0];
                    v.rb = wit[1];
                    v.rc = wit[2];
                    v.rd = wit[3];
                    v.oa = ca;
                    v.ob = cb;
                    v.oc = cc;
                    v.expected = d;
                    if (kind == CycleKind::label) {
                        int z = a.z_at(cb.x, cc.y);
                        if (z >= 0 && z != d) {
                            v.displaced = {cb.x, cc.y, z};
                            v.found = z;
                            if (reported.insert(config_key(v)).second) out.push_back(v);
                        }
                    } else if (kind == CycleKind::column) {
                        int x5 = a.x_at(cc.y, d);
                        if (x5 >= 0 && x5 != cb.x) {
                            v.displaced = {x5, cc.y, d};
                            v.found = d;
                            if (reported.insert(config_key(v)).second) out.push_back(v);
                        }
                    } else {
                        int y5 = a.y_at(cb.x, d);
                        if (y5 >= 0 && y5 != cc.y) {
                            v.displaced = {cb.x, y5, d};
                            v.found = d;
                            if (reported.insert(config_key(v)).second) out.push_back(v);
                        }
                    }
                }
            }
        }
    return out;
}

// Largest number of distinct closing values over all realizable signature
// prefixes of length 2r-1; 0 when the instance has no 2r-cycles of the kind,
// 1 exactly when the completion operation is well-defined.  When histogram
// is non-null it receives, for each completion count, the number of
// realizable prefixes attaining it.
inline u64 completion_defect(const Pls& pls, CycleKind kind, int r, Budget& budget,
                             std::map<u64, u64>* histogram = nullptr) {
    if (r < 2) throw input_error("cycle half-length r must be at least 2");
    Pls a = reduce_to_label_kind(pls, kind);
    u64 defect = 0;
    std::vector<char> seen(std::size_t(a.dims.nz), 0);
    std::vector<int> touched;
    detail::PrefixWalk walk(a, r, budget);
    walk.run([&](const std::vector<int>& prefix, const std::vector<detail::PrefixWalk::Pair>& pairs) {
        (void)prefix;
        touched.clear();
        for (const auto& [s, c] : pairs) {
            int z = a.z_at(a.cells[std::size_t(s)].x, a.cells[std::size_t(c)].y);
            if (z >= 0 && !seen[std::size_t(z)]) {
                seen[std::size_t(z)] = 1;
                touched.push_back(z);
            }
        }
        u64 k = touched.size();
        for (int z : touched) seen[std::size_t(z)] = 0;
        defect = std::max(defect, k);
        if (histogram) ++(*histogram)[k];
    });
    return defect;
}

// ---- group tables ----

struct GroupTable {
    int n = 0;
    std::vector<int> table;  // table[a * n + b] = a o b
    int identity = -1;

    int at(int a, int b) const { return table[std::size_t(a) * n + b]; }
};

// Returns an empty string when gt is a group, otherwise a description of the
// first failing law.
inline std::string group_law_failure(const GroupTable& gt) {
    if (gt.n <= 0) return "empty table";
    if (int(gt.table.size()) != gt.n * gt.n) return "table size mismatch";
    for (int v : gt.table)
        if (v < 0 || v >= gt.n) return "entry out of range";
    if (gt.identity < 0 || gt.identity >= gt.n) return "identity out of range";
    int e = gt.identity;
    for (int a = 0; a < gt.n; ++a) {
        if (gt.at(e, a) != a) return "left identity fails at " + std::to_string(a);
        if (gt.at(a, e) != a) return "right identity fails at " + std::to_string(a);
    }
    for (int a = 0; a < gt.n; ++a) {
        bool left = false, right = false;
        for (int b = 0; b < gt.n; ++b) {
            left |= gt.at(b, a) == e;
            right |= gt.at(a, b) == e;
        }
        if (!left || !right) return "inverse fails at " + std::to_string(a);
    }
    for (int a = 0; a < gt.n; ++a)
        for (int b = 0; b < gt.n; ++b)
            for (int c = 0; c < gt.n; ++c)
                if (gt.at(gt.at(a, b), c) != gt.at(a, gt.at(b, c)))
                    return "associativity fails at (" + std::to_string(a) + "," +
                           std::to_string(b) + "," + std::to_string(c) + ")";
    return "";
}

inline nlohmann::json group_table_to_json(const GroupTable& gt) {
    nlohmann::json rows = nlohmann::json::array();
    for (int a = 0; a < gt.n; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int b = 0; b < gt.n; ++b) row.push_back(gt.at(a, b));
        rows.push_back(row);
    }
    return nlohmann::json{{"n", gt.n}, {"identity", gt.identity}, {"table", rows}};
}

inline GroupTable group_table_from_json(const nlohmann::json& j) {
    GroupTable gt;
    gt.n = j.at("n").get<int>();
    gt.identity = j.at("identity").get<int>();
    if (gt.n <= 0) throw input_error("group order must be positive");
    gt.table.reserve(std::size_t(gt.n) * gt.n);
    for (const auto& row : j.at("table"))
        for (const auto& v : row) gt.table.push_back(v.get<int>());
    if (int(gt.table.size()) != gt.n * gt.n) throw input_error("group table shape mismatch");
    return gt;
}

// Thrown when reconstruction meets a quadrangle violation; carries the
// witness configuration.
struct qc_failure : verify_error {
    QCViolation witness;
    explicit qc_failure(QCViolation v)
        : verify_error("label quadrangle condition fails; witness rectangle at (" +
                       std::to_string(v.ra.x) + "," + std::to_string(v.ra.y) + ") expects " +
                       std::to_string(v.expected) + ", found " + std::to_string(v.found)),
          witness(std::move(v)) {}
};

// Builds the group on the label set determined by a row R and column C:
// a o b is the label at (column of a in row R, row of b in column C), with
// identity the label at (C, R).  Requires a full Latin square whose label
// quadrangle condition holds; the group laws of the result are re-verified
// by brute force.
inline GroupTable brandt_reconstruct(const Pls& a, int row_r, int col_c) {
    if (!is_full_latin_square(a)) throw input_error("reconstruction needs a full Latin square");
    int n = a.dims.nx;
    if (row_r < 0 || row_r >= n || col_c < 0 || col_c >= n)
        throw input_error("row/column out of range");
    {
        auto viol = check_quadrangle(a, CycleKind::label);
        if (!viol.empty()) throw qc_failure(viol.front());
    }
    GroupTable gt;
    gt.n = n;
    gt.table.assign(std::size_t(n) * n, -1);
    for (int la = 0; la < n; ++la)
        for (int lb = 0; lb < n; ++lb) {
            int xa = a.x_at(row_r, la);
            int yb = a.y_at(col_c, lb);
            gt.table[std::size_t(la) * n + lb] = a.z_at(xa, yb);
        }
    gt.identity = a.z_at(col_c, row_r);
    std::string fail = group_law_failure(gt);
    if (!fail.empty()) throw verify_error("reconstructed table is not a group: " + fail);
    return gt;
}

// Brute-force isomorphism search, intended for small orders.  Images are
// chosen element by element with partial homomorphism pruning; the identity
// must map to the identity.
inline bool groups_isomorphic(const GroupTable& g, const GroupTable& h) {
    if (g.n != h.n) return false;
    int n = g.n;
    std::vector<int> img(std::size_t(n), -1);
    std::vector<char> used(std::size_t(n), 0);
    img[std::size_t(g.identity)] = h.identity;
    used[std::size_t(h.identity)] = 1;

    // order: identity first, then the rest
    std::vector<int> elems;
    for (int i = 0; i < n; ++i)
        if (i != g.identity) elems.push_back(i);

    std::function<bool(std::size_t)> place = [&](std::size_t k) -> bool {
        if (k == elems.size()) {
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    if (img[std::size_t(g.at(x, y))] != h.at(img[std::size_t(x)], img[std::size_t(y)]))
                        return false;
            return true;
        }
        int x = elems[k];
        for (int tgt = 0; tgt < n; ++tgt) {
            if (used[std::size_t(tgt)]) continue;
            img[std::size_t(x)] = tgt;
            used[std::size_t(tgt)] = 1;
            bool ok = true;
            // check all products among already-placed elements
            for (int u = 0; u < n && ok; ++u) {
                if (img[std::size_t(u)] < 0) continue;
                int p1 = g.at(x, u), p2 = g.at(u, x);
                if (img[std::size_t(p1)] >= 0 &&
                    img[std::size_t(p1)] != h.at(tgt, img[std::size_t(u)]))
                    ok = false;
                if (ok && img[std::size_t(p2)] >= 0 &&
                    img[std::size_t(p2)] != h.at(img[std::size_t(u)], tgt))
                    ok = false;
            }
            if (ok && place(k + 1)) return true;
            img[std::size_t(x)] = -1;
            used[std::size_t(tgt)] = 0;
        }
        return false;
    };
    return place(0);
}

}  // namespace plsq
