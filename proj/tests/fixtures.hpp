#pragma once
// Hand-built instances shared by the test binaries.

#include <vector>

#include "plsq/pls.hpp"

namespace fixtures {

using plsq::Cell;
using plsq::Dims;
using plsq::Pls;

// Order-5 Latin square that is not isotopic to a group.  Order 5 is the
// smallest that admits one: both order-4 main classes are group classes.
// The prefix (0,1,1) completes to 0 through columns {0,1} and to 3 through
// columns {2,3}, so the label quadrangle condition fails.
inline Pls ls5_nongroup() {
    const int rows[5][5] = {{0, 1, 2, 3, 4},
                            {1, 0, 3, 4, 2},
                            {2, 3, 4, 0, 1},
                            {3, 4, 1, 2, 0},
                            {4, 2, 0, 1, 3}};
    std::vector<Cell> cells;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) cells.push_back({x, y, rows[y][x]});
    return Pls(Dims{5, 5, 5}, std::move(cells));
}

// Two disjoint 2x2 blocks sharing the prefix (0, 1, 2) but completing it to
// 3 and to 4.  The eight cells form exactly one label violation and no
// column or row violation.
inline Pls two_block_conflict() {
    std::vector<Cell> cells{{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {1, 1, 3},
                            {2, 2, 0}, {3, 2, 1}, {2, 3, 2}, {3, 3, 4}};
    return Pls(Dims{4, 4, 5}, std::move(cells));
}

// First rectangle with all four corners present, read row-first from the
// lexicographically least corner choice; empty if none exists.
inline std::vector<Cell> find_rect_cycle(const Pls& a) {
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2) {
            if (x2 == x1) continue;
            for (int y1 = 0; y1 < a.dims.ny; ++y1)
                for (int y2 = 0; y2 < a.dims.ny; ++y2) {
                    if (y2 == y1) continue;
                    int za = a.z_at(x1, y1), zb = a.z_at(x2, y1);
                    int zc = a.z_at(x2, y2), zd = a.z_at(x1, y2);
                    if (za < 0 || zb < 0 || zc < 0 || zd < 0) continue;
                    return {{x1, y1, za}, {x2, y1, zb}, {x2, y2, zc}, {x1, y2, zd}};
                }
        }
    return {};
}

// The 2x2 rectangle on rows/columns {0,1} of a table containing it, as a
// row-first label 4-cycle.
inline std::vector<Cell> square_cycle(const Pls& a) {
    return {{0, 0, a.z_at(0, 0)},
            {1, 0, a.z_at(1, 0)},
            {1, 1, a.z_at(1, 1)},
            {0, 1, a.z_at(0, 1)}};
}

// A 6-cycle visiting six distinct cells of a 3x3 grid; no cell of the grid
// completes a rectangle against all six, so it has no point decomposition.
inline Pls staircase() {
    return Pls(Dims{3, 3, 6},
               {{0, 0, 0}, {1, 0, 1}, {1, 1, 2}, {2, 1, 3}, {2, 2, 4}, {0, 2, 5}});
}

inline std::vector<Cell> staircase_cycle() {
    return {{0, 0, 0}, {1, 0, 1}, {1, 1, 2}, {2, 1, 3}, {2, 2, 4}, {0, 2, 5}};
}

}  // namespace fixtures
