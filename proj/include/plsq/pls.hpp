#pragma once
// Partial Latin squares as dense 0-based triple sets.
//
// A cell (x, y, z) reads "column x, row y carries label z".  The defining
// property is linearity: any two coordinates determine the third, so no two
// distinct cells may agree in two positions.  The same data can be read as a
// tripartite 3-uniform hypergraph whose edges are the cells; both views are
// used interchangeably here.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "plsq/common.hpp"

namespace plsq {

struct Cell {
    int x = 0, y = 0, z = 0;

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
    friend bool operator<(const Cell& a, const Cell& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    }
};

struct Dims {
    int nx = 0, ny = 0, nz = 0;

    friend bool operator==(const Dims& a, const Dims& b) {
        return a.nx == b.nx && a.ny == b.ny && a.nz == b.nz;
    }
};

// Which pair of coordinates two cells illegally share.
enum class ViolationKind { same_xy, same_xz, same_yz };

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::same_xy: return "same-column-row";
        case ViolationKind::same_xz: return "same-column-label";
        case ViolationKind::same_yz: return "same-row-label";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    Cell a, b;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

namespace detail {

// Emits one violation per unordered pair of cells agreeing in the keyed
// coordinate pair.  Sorting groups offenders together.
template <class Key>
void collect_pairs(std::vector<Cell> cells, ViolationKind kind, Key key,
                   std::vector<Violation>& out) {
    std::sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) {
        auto ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        return a < b;
    });
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i + 1;
        while (j < cells.size() && key(cells[j]) == key(cells[i])) ++j;
        for (std::size_t p = i; p < j; ++p)
            for (std::size_t q = p + 1; q < j; ++q)
                out.push_back({kind, cells[p], cells[q]});
        i = j;
    }
}

}  // namespace detail

inline std::string cell_str(const Cell& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
}

// Lists every linearity violation as a pair of witness cells.  Duplicate
// triples count as violations of all three kinds.  Out-of-range coordinates
// are reported as input errors naming the offending triple.
inline ValidationReport validate(const std::vector<Cell>& triples, const Dims& dims) {
    for (const Cell& c : triples) {
        if (c.x < 0 || c.x >= dims.nx || c.y < 0 || c.y >= dims.ny || c.z < 0 || c.z >= dims.nz)
            throw input_error("coordinate out of range in triple " + cell_str(c));
    }
    ValidationReport rep;
    detail::collect_pairs(
        triples, ViolationKind::same_xy,
        [](const Cell& c) { return std::pair<int, int>(c.x, c.y); }, rep.violations);
    detail::collect_pairs(
        triples, ViolationKind::same_xz,
        [](const Cell& c) { return std::pair<int, int>(c.x, c.z); }, rep.violations);
    detail::collect_pairs(
        triples, ViolationKind::same_yz,
        [](const Cell& c) { return std::pair<int, int>(c.y, c.z); }, rep.violations);
    rep.ok = rep.violations.empty();
    return rep;
}

// The central data type.  Cells are kept sorted lexicographically and three
// flat lookup tables give the unique third coordinate for any defined pair,
// -1 when absent.  Instances are immutable after construction and safe to
// share across threads.
struct Pls {
    Dims dims;
    std::vector<Cell> cells;

    std::vector<int> zat;  // [x * ny + y] -> z
    std::vector<int> yat;  // [x * nz + z] -> y
    std::vector<int> xat;  // [y * nz + z] -> x

    // Cell indices grouped by one coordinate, each group sorted.
    std::vector<std::vector<int>> in_col;    // by x
    std::vector<std::vector<int>> in_row;    // by y
    std::vector<std::vector<int>> in_label;  // by z

    Pls() = default;

    Pls(Dims d, std::vector<Cell> triples) : dims(d), cells(std::move(triples)) {
        ValidationReport rep = validate(cells, dims);
        if (!rep.ok) {
            const Violation& v = rep.violations.front();
            throw input_error(std::string("not a partial Latin square: cells ") + cell_str(v.a) +
                              " and " + cell_str(v.b) + " share " + to_string(v.kind) +
                              " (" + std::to_string(rep.violations.size()) + " violation(s) total)");
        }
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        rebuild_indexes();
    }

    void rebuild_indexes() {
        zat.assign(std::size_t(dims.nx) * dims.ny, -1);
        yat.assign(std::size_t(dims.nx) * dims.nz, -1);
        xat.assign(std::size_t(dims.ny) * dims.nz, -1);
        in_col.assign(std::size_t(dims.nx), {});
        in_row.assign(std::size_t(dims.ny), {});
        in_label.assign(std::size_t(dims.nz), {});
        for (int i = 0; i < int(cells.size()); ++i) {
            const Cell& c = cells[std::size_t(i)];
            zat[std::size_t(c.x) * dims.ny + c.y] = c.z;
            yat[std::size_t(c.x) * dims.nz + c.z] = c.y;
            xat[std::size_t(c.y) * dims.nz + c.z] = c.x;
            in_col[std::size_t(c.x)].push_back(i);
            in_row[std::size_t(c.y)].push_back(i);
            in_label[std::size_t(c.z)].push_back(i);
        }
    }

    std::size_t size() const { return cells.size(); }

    int z_at(int x, int y) const { return zat[std::size_t(x) * dims.ny + y]; }
    int y_at(int x, int z) const { return yat[std::size_t(x) * dims.nz + z]; }
    int x_at(int y, int z) const { return xat[std::size_t(y) * dims.nz + z]; }

    bool contains(int x, int y, int z) const { return z_at(x, y) == z; }

    // Fraction of the column-row grid that is filled; the usual density when
    // all three sides are equal.
    double density() const {
        return dims.nx == 0 || dims.ny == 0
                   ? 0.0
                   : double(cells.size()) / (double(dims.nx) * double(dims.ny));
    }

    friend bool operator==(const Pls& a, const Pls& b) {
        return a.dims == b.dims && a.cells == b.cells;
    }
};

// A (possibly partial) binary operation on [n].  table[x * n + y] is x*y,
// -1 where undefined.  Validity means injectivity in each variable
// separately, which is exactly the linearity of the associated triple set.
struct PartialBinaryOp {
    int n = 0;
    std::vector<int> table;

    PartialBinaryOp() = default;
    explicit PartialBinaryOp(int order) : n(order), table(std::size_t(order) * order, -1) {}

    int at(int x, int y) const { return table[std::size_t(x) * n + y]; }
    void set(int x, int y, int z) { table[std::size_t(x) * n + y] = z; }

    bool defined(int x, int y) const { return at(x, y) >= 0; }

    std::size_t defined_count() const {
        std::size_t k = 0;
        for (int v : table) k += (v >= 0);
        return k;
    }
};

inline Pls from_binary_op(const PartialBinaryOp& op) {
    std::vector<Cell> cells;
    cells.reserve(op.defined_count());
    for (int x = 0; x < op.n; ++x)
        for (int y = 0; y < op.n; ++y)
            if (op.defined(x, y)) {
                int z = op.at(x, y);
                if (z >= op.n) throw input_error("operation value out of range at (" +
                                                 std::to_string(x) + "," + std::to_string(y) + ")");
                cells.push_back({x, y, z});
            }
    return Pls({op.n, op.n, op.n}, std::move(cells));
}

// Inverse of from_binary_op; requires cube-shaped dims.
inline PartialBinaryOp to_binary_op(const Pls& a) {
    if (a.dims.nx != a.dims.ny || a.dims.ny != a.dims.nz)
        throw input_error("to_binary_op needs equal dims");
    PartialBinaryOp op(a.dims.nx);
    for (const Cell& c : a.cells) op.set(c.x, c.y, c.z);
    return op;
}

// perm[i] names which old coordinate (0 = column, 1 = row, 2 = label) lands
// in new position i.  Linearity is symmetric in the three roles, so the
// result is always valid.
inline Pls permute_coords(const Pls& a, const std::array<int, 3>& perm) {
    {
        std::array<int, 3> seen{0, 0, 0};
        for (int p : perm) {
            if (p < 0 || p > 2) throw input_error("permutation entries must be 0, 1, 2");
            seen[std::size_t(p)] += 1;
        }
        if (seen != std::array<int, 3>{1, 1, 1}) throw input_error("not a permutation of {0,1,2}");
    }
    auto pick = [](const Cell& c, int i) { return i == 0 ? c.x : i == 1 ? c.y : c.z; };
    auto dim = [](const Dims& d, int i) { return i == 0 ? d.nx : i == 1 ? d.ny : d.nz; };
    Dims nd{dim(a.dims, perm[0]), dim(a.dims, perm[1]), dim(a.dims, perm[2])};
    std::vector<Cell> cells;
    cells.reserve(a.cells.size());
    for (const Cell& c : a.cells)
        cells.push_back({pick(c, perm[0]), pick(c, perm[1]), pick(c, perm[2])});
    return Pls(nd, std::move(cells));
}

inline bool is_full_latin_square(const Pls& a) {
    return a.dims.nx == a.dims.ny && a.dims.ny == a.dims.nz &&
           a.cells.size() == std::size_t(a.dims.nx) * a.dims.ny;
}

}  // namespace plsq
